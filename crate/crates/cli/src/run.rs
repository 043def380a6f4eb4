use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fracmap_core::fmi::{image_window, restrict_to_image};
use fracmap_core::{
    box_counting_dimension, compare_masks, discrete_trajectory, estimate_bilipschitz, extract_boundary, fmi_flow_julia,
    fmi_julia, fmi_mandelbrot, forward_image, rasterize_zeno, render_julia, render_mandelbrot, zeno_states,
    ComplexPoint, DimensionEstimate, FmiMode, FmiScene, LipschitzBounds, MapSpec, MaskComparison, RasterField,
    ZenoDiagram,
};
use serde::Serialize;

use crate::config::{Command, ConfigError, DimensionSource, FrameSet, Resolved, SceneConfig};
use crate::image::write_image;

/// Sample pairs used for the Lipschitz bracket reported by `verify-fmt`.
const LIPSCHITZ_PAIRS: usize = 4096;
/// Lattice density used to find the window of a mapped region.
const IMAGE_WINDOW_SAMPLES: usize = 129;
const DEFAULT_SUPERSAMPLE: u32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] fracmap_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    /// 1 for configuration problems, 2 for everything that goes wrong while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Frame {
    pub file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<&'static str>,
    pub bounded_count: usize,
    pub invalid_count: usize,
}

/// Everything written to the sidecar besides the config and timing.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunStats {
    /// Bounded pixels of the main image, or summed over all frames.
    pub bounded_count: usize,
    pub invalid_count: usize,
    pub images: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<Vec<Frame>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<DimensionEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<MaskComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<LipschitzBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeno: Option<ZenoDiagram>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a SceneConfig,
    wall_time_s: f64,
    #[serde(flatten)]
    stats: &'a RunStats,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub images: Vec<PathBuf>,
    pub sidecar: PathBuf,
    pub manifest: Option<PathBuf>,
    pub stats: RunStats,
}

struct Writer<'a> {
    cfg: &'a SceneConfig,
    prefix: PathBuf,
    stats: RunStats,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        let mut name = self.prefix.file_name().unwrap_or_default().to_os_string();
        name.push(format!("{suffix}.{ext}"));
        self.prefix.with_file_name(name)
    }

    fn image(&mut self, field: &RasterField, suffix: &str) -> Result<String, RunError> {
        let path = self.path(suffix, "ppm");
        write_image(field, self.cfg.palette, &path).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
        let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        self.stats.images.push(name.clone());
        self.written.push(path);
        Ok(name)
    }

    fn main_image(&mut self, field: &RasterField) -> Result<(), RunError> {
        self.image(field, "")?;
        self.stats.bounded_count = field.bounded_count();
        self.stats.invalid_count = field.invalid_count();
        Ok(())
    }

    fn frame(
        &mut self,
        field: &RasterField,
        suffix: &str,
        k: Option<u32>,
        t: Option<f64>,
        variant: Option<&'static str>,
    ) -> Result<(), RunError> {
        let file = self.image(field, suffix)?;
        self.stats.bounded_count += field.bounded_count();
        self.stats.invalid_count += field.invalid_count();
        self.stats.frames.get_or_insert_with(Vec::new).push(Frame {
            file,
            k,
            t,
            variant,
            bounded_count: field.bounded_count(),
            invalid_count: field.invalid_count(),
        });
        Ok(())
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value).expect("sidecar serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs one scene and writes its images, sidecar and (for multi-frame
/// commands) manifest next to the configured output prefix.
pub fn run(cfg: &SceneConfig) -> Result<RunSummary, RunError> {
    let started = Instant::now();
    let res = cfg.resolve()?;
    let prefix = PathBuf::from(cfg.output());
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let mut w = Writer {
        cfg,
        prefix,
        stats: RunStats::default(),
        written: Vec::new(),
    };
    execute(cfg, &res, &mut w)?;

    let manifest = match &w.stats.frames {
        Some(frames) => {
            let path = w.path("_manifest", "json");
            write_json(&path, &serde_json::json!({ "command": cfg.command, "frames": frames }))?;
            Some(path)
        }
        None => None,
    };
    let sidecar = w.path("", "json");
    let wall_time_s = started.elapsed().as_secs_f64();
    write_json(
        &sidecar,
        &Sidecar {
            config: cfg,
            wall_time_s,
            stats: &w.stats,
        },
    )?;
    Ok(RunSummary {
        images: w.written,
        sidecar,
        manifest,
        stats: w.stats,
    })
}

fn execute(cfg: &SceneConfig, res: &Resolved, w: &mut Writer<'_>) -> Result<(), RunError> {
    let c = cfg.c.unwrap_or(ComplexPoint::ZERO);
    let map = || res.map.clone().unwrap_or_else(MapSpec::identity);
    let scene = |grid, mode| FmiScene {
        grid,
        c,
        map: map(),
        params: res.params,
        mode,
    };
    match cfg.command {
        Command::Julia => w.main_image(&render_julia(&res.grid, c, &res.params)),
        Command::Mandelbrot => w.main_image(&render_mandelbrot(&res.grid, &res.params)),
        Command::FmiJulia => w.main_image(&fmi_julia(&scene(res.grid, FmiMode::JuliaFmi))?),
        Command::FmiMandelbrot => w.main_image(&fmi_mandelbrot(&scene(res.grid, FmiMode::MandelbrotFmi))?),
        Command::DiscreteTraj => {
            let k_max = cfg.k_max.unwrap_or_default();
            let traj = discrete_trajectory(c, &map(), k_max, &res.grid, &res.params)?;
            let frames = cfg.frames.unwrap_or_default();
            if frames != FrameSet::Pushforward {
                for (k, f) in traj.pullback.iter().enumerate() {
                    w.frame(f, &format!("_k{k:02}"), Some(k as u32), None, Some("pullback"))?;
                }
            }
            if frames != FrameSet::Pullback {
                for (k, f) in traj.pushforward.iter().enumerate() {
                    w.frame(f, &format!("_push_k{k:02}"), Some(k as u32), None, Some("pushforward"))?;
                }
            }
            Ok(())
        }
        Command::FlowTraj => {
            let flow = res.flow.as_ref().expect("validated");
            let times = cfg.t_list.clone().or(cfg.t.map(|t| vec![t])).unwrap_or_default();
            for (idx, &t) in times.iter().enumerate() {
                let f = fmi_flow_julia(&res.grid, c, flow, t, &res.params)?;
                w.frame(&f, &format!("_t{idx:02}"), None, Some(t), None)?;
            }
            Ok(())
        }
        Command::Dimension => {
            let filled = match (cfg.source.expect("validated"), &res.map) {
                (DimensionSource::Julia, None) => render_julia(&res.grid, c, &res.params),
                (DimensionSource::Mandelbrot, None) => render_mandelbrot(&res.grid, &res.params),
                (DimensionSource::Julia, Some(_)) => fmi_julia(&scene(res.grid, FmiMode::JuliaFmi))?,
                (DimensionSource::Mandelbrot, Some(_)) => fmi_mandelbrot(&scene(res.grid, FmiMode::MandelbrotFmi))?,
            };
            let field = if cfg.boundary.unwrap_or(true) {
                extract_boundary(&filled)
            } else {
                filled
            };
            let (lo, hi) = cfg.box_range(&res.grid);
            w.stats.dimension = Some(box_counting_dimension(&field, lo, hi)?);
            w.main_image(&field)
        }
        Command::VerifyFmt => {
            let map = map();
            let src = render_julia(&res.grid, c, &res.params);
            let dst = match res.dst_grid {
                Some(g) => g,
                None => image_window(&map, &res.grid, IMAGE_WINDOW_SAMPLES)?,
            };
            let pushed = forward_image(&src, &map, &dst, cfg.supersample.unwrap_or(DEFAULT_SUPERSAMPLE))?;
            let pulled = restrict_to_image(&fmi_julia(&scene(dst, FmiMode::JuliaFmi))?, &map, &res.grid);
            w.stats.comparison = Some(compare_masks(&pushed, &pulled)?);
            w.stats.lipschitz = estimate_bilipschitz(&map, &res.grid, LIPSCHITZ_PAIRS).ok();
            w.image(&pushed, "_forward")?;
            w.main_image(&pulled)
        }
        Command::Zeno => {
            let diagram = zeno_states(
                cfg.d0.expect("validated"),
                cfg.t1.expect("validated"),
                cfg.n.expect("validated"),
                cfg.i0.unwrap_or(0),
            )?;
            let field = rasterize_zeno(&diagram, res.grid.px_w(), res.grid.px_h())?;
            let (lo, hi) = cfg.box_range(&res.grid);
            w.stats.dimension = box_counting_dimension(&field, lo, hi).ok();
            w.stats.zeno = Some(diagram);
            w.main_image(&field)
        }
    }
}
