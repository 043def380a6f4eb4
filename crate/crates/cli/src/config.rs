//! Scene configuration files.
//!
//! A scene is a JSON object. Complex numbers are written as `[re, im]`.
//!
//! ```json
//! {
//!   "command": "fmi-julia",
//!   "c": [-0.175, -0.655],
//!   "map": { "kind": "arcsin_root5" },
//!   "grid": { "center": [0.0, 0.0], "width": 3.0, "height": 3.0, "px_w": 512, "px_h": 512 },
//!   "iter": { "max_iter": 500, "escape_radius": 2.0 },
//!   "palette": "classic",
//!   "output": "out/scene"
//! }
//! ```
//!
//! Parsing is strict: unknown keys are rejected, and so are keys the chosen
//! command does not use.

use std::fmt;

use fracmap_core::fji::{DEFAULT_ESCAPE_RADIUS, DEFAULT_MAX_ITER};
use fracmap_core::flow::DEFAULT_RK4_DT;
use fracmap_core::{ComplexPoint, FlowSpec, GridSpec, IterParams, MapKind, MapSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::palette::Palette;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Julia,
    Mandelbrot,
    FmiJulia,
    FmiMandelbrot,
    DiscreteTraj,
    FlowTraj,
    Dimension,
    VerifyFmt,
    Zeno,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Julia => "julia",
            Command::Mandelbrot => "mandelbrot",
            Command::FmiJulia => "fmi-julia",
            Command::FmiMandelbrot => "fmi-mandelbrot",
            Command::DiscreteTraj => "discrete-traj",
            Command::FlowTraj => "flow-traj",
            Command::Dimension => "dimension",
            Command::VerifyFmt => "verify-fmt",
            Command::Zeno => "zeno",
        }
    }

    /// Keys the command cannot run without, and keys it may use besides the
    /// common ones (`grid`, `iter`, `palette`).
    fn fields(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Command::Julia => (&["c"], &[]),
            Command::Mandelbrot => (&[], &[]),
            Command::FmiJulia => (&["c", "map"], &[]),
            Command::FmiMandelbrot => (&["map"], &[]),
            Command::DiscreteTraj => (&["c", "map", "k_max"], &["frames"]),
            Command::FlowTraj => (&["c", "flow"], &["t", "t_list"]),
            Command::Dimension => (&["source"], &["c", "map", "boundary", "min_box", "max_box"]),
            Command::VerifyFmt => (&["c", "map"], &["supersample", "dst_grid"]),
            Command::Zeno => (&["d0", "t1", "n"], &["i0"]),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub center: ComplexPoint,
    pub width: f64,
    pub height: f64,
    pub px_w: usize,
    pub px_h: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            center: ComplexPoint::ZERO,
            width: 3.0,
            height: 3.0,
            px_w: 512,
            px_h: 512,
        }
    }
}

impl GridConfig {
    pub fn to_spec(&self) -> fracmap_core::Result<GridSpec> {
        GridSpec::new(self.center, self.width, self.height, self.px_w, self.px_h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IterConfig {
    pub max_iter: u32,
    pub escape_radius: f64,
}

impl Default for IterConfig {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapConfig {
    Identity,
    Affine {
        a: ComplexPoint,
        #[serde(default = "zero")]
        b: ComplexPoint,
    },
    ArccosReciprocal,
    ArcsinRoot5,
    ReciprocalSqrt,
    QuadraticParam {
        a: f64,
        b: ComplexPoint,
        c: ComplexPoint,
    },
    Flow {
        flow: FlowConfig,
        t: f64,
    },
    Iterated {
        base: Box<MapConfig>,
        times: u32,
    },
}

fn zero() -> ComplexPoint {
    ComplexPoint::ZERO
}

impl MapConfig {
    pub fn to_spec(&self) -> fracmap_core::Result<MapSpec> {
        Ok(match self {
            MapConfig::Identity => MapSpec::identity(),
            MapConfig::Affine { a, b } => MapSpec::affine(*a, *b)?,
            MapConfig::ArccosReciprocal => MapSpec::arccos_reciprocal(),
            MapConfig::ArcsinRoot5 => MapSpec::arcsin_root5(),
            MapConfig::ReciprocalSqrt => MapSpec::reciprocal_sqrt(),
            MapConfig::QuadraticParam { a, b, c } => MapSpec::quadratic_param(*a, *b, *c)?,
            MapConfig::Flow { flow, t } => MapSpec::flow(flow.to_spec()?, *t)?,
            MapConfig::Iterated { base, times } => MapSpec::new(MapKind::Iterated {
                base: Box::new(base.to_spec()?),
                times: *times,
            })?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FlowConfig {
    Linear {
        lambda: ComplexPoint,
    },
    LimitCycle,
    PeriodicForced {
        a: f64,
    },
    Rk4 {
        base: Box<FlowConfig>,
        #[serde(default = "default_dt")]
        dt: f64,
    },
}

fn default_dt() -> f64 {
    DEFAULT_RK4_DT
}

impl FlowConfig {
    pub fn to_spec(&self) -> fracmap_core::Result<FlowSpec> {
        Ok(match self {
            FlowConfig::Linear { lambda } => FlowSpec::linear(*lambda),
            FlowConfig::LimitCycle => FlowSpec::LimitCycle,
            FlowConfig::PeriodicForced { a } => FlowSpec::periodic_forced(*a)?,
            FlowConfig::Rk4 { base, dt } => FlowSpec::rk4(base.to_spec()?, *dt)?,
        })
    }
}

/// Which set the `dimension` command measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionSource {
    Julia,
    Mandelbrot,
}

/// Which frames `discrete-traj` writes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameSet {
    #[default]
    Pullback,
    Pushforward,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub command: Command,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub iter: IterConfig,
    #[serde(default)]
    pub palette: Palette,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<ComplexPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames: Option<FrameSet>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<DimensionSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_box: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_box: Option<usize>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supersample: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dst_grid: Option<GridConfig>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i0: Option<u32>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("{}missing field `{field}` required by command `{command}`", at(*line))]
    MissingField {
        field: &'static str,
        command: Command,
        line: Option<usize>,
    },
    #[error("{}field `{field}` is not used by command `{command}`", at(*line))]
    UnusedField {
        field: &'static str,
        command: Command,
        line: Option<usize>,
    },
    #[error("{}invalid value for `{field}`: {msg}", at(*line))]
    OutOfRange {
        field: String,
        msg: String,
        line: Option<usize>,
    },
    #[error("bad override `{0}`: {1}")]
    Override(String, String),
}

impl ConfigError {
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::MissingField { field, .. } | ConfigError::UnusedField { field, .. } => Some(field),
            ConfigError::OutOfRange { field, .. } => Some(field),
            _ => None,
        }
    }
}

fn at(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// Finds the line of a (possibly dotted) key in the source text.
struct Locator<'a> {
    text: Option<&'a str>,
}

impl Locator<'_> {
    fn line(&self, path: &str) -> Option<usize> {
        let text = self.text?;
        let mut from = 0;
        for part in path.split('.') {
            from += find_key(&text[from..], part)?;
        }
        Some(text[..from].matches('\n').count() + 1)
    }
}

/// Byte offset of `"key"` used as an object key.
fn find_key(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let mut start = 0;
    while let Some(pos) = text[start..].find(&needle) {
        let at = start + pos;
        let rest = text[at + needle.len()..].trim_start();
        if rest.starts_with(':') {
            return Some(at);
        }
        start = at + needle.len();
    }
    None
}

/// Core objects built from a validated config.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub grid: GridSpec,
    pub params: IterParams,
    pub map: Option<MapSpec>,
    pub flow: Option<FlowSpec>,
    pub dst_grid: Option<GridSpec>,
}

impl SceneConfig {
    fn present(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut add = |k: &'static str, on: bool| {
            if on {
                keys.push(k)
            }
        };
        add("c", self.c.is_some());
        add("map", self.map.is_some());
        add("flow", self.flow.is_some());
        add("t", self.t.is_some());
        add("t_list", self.t_list.is_some());
        add("k_max", self.k_max.is_some());
        add("frames", self.frames.is_some());
        add("source", self.source.is_some());
        add("boundary", self.boundary.is_some());
        add("min_box", self.min_box.is_some());
        add("max_box", self.max_box.is_some());
        add("supersample", self.supersample.is_some());
        add("dst_grid", self.dst_grid.is_some());
        add("d0", self.d0.is_some());
        add("t1", self.t1.is_some());
        add("n", self.n.is_some());
        add("i0", self.i0.is_some());
        keys
    }

    /// Checks required and unused keys and builds the core objects.
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        self.resolve_with(&Locator { text: None })
    }

    fn resolve_with(&self, loc: &Locator<'_>) -> Result<Resolved, ConfigError> {
        let command = self.command;
        let (required, optional) = command.fields();
        let present = self.present();
        let missing = |field: &'static str| ConfigError::MissingField {
            field,
            command,
            line: loc.line("command"),
        };
        if self.output.is_none() {
            return Err(missing("output"));
        }
        for &field in required {
            if !present.contains(&field) {
                return Err(missing(field));
            }
        }
        for field in present {
            if !required.contains(&field) && !optional.contains(&field) {
                return Err(ConfigError::UnusedField {
                    field,
                    command,
                    line: loc.line(field),
                });
            }
        }
        let range = |field: &str, e: &dyn fmt::Display| ConfigError::OutOfRange {
            field: field.to_string(),
            msg: e.to_string(),
            line: loc.line(field),
        };
        let out = self.output.as_deref().unwrap_or_default();
        if out.is_empty() || out.ends_with('/') {
            return Err(range("output", &"must name a file prefix"));
        }

        let grid = self.grid.to_spec().map_err(|e| range("grid", &e))?;
        let params = IterParams::new(self.iter.max_iter, self.iter.escape_radius).map_err(|e| range("iter", &e))?;
        let map = self
            .map
            .as_ref()
            .map(|m| m.to_spec())
            .transpose()
            .map_err(|e| range("map", &e))?;
        let flow = self
            .flow
            .as_ref()
            .map(|f| f.to_spec())
            .transpose()
            .map_err(|e| range("flow", &e))?;
        let dst_grid = self
            .dst_grid
            .map(|g| g.to_spec())
            .transpose()
            .map_err(|e| range("dst_grid", &e))?;

        match command {
            Command::FlowTraj => match (&self.t, &self.t_list) {
                (None, None) => return Err(missing("t_list")),
                (Some(_), Some(_)) => return Err(range("t", &"give either `t` or `t_list`, not both")),
                (Some(t), None) if !t.is_finite() => return Err(range("t", &"must be finite")),
                (None, Some(ts)) if ts.is_empty() || ts.iter().any(|t| !t.is_finite()) => {
                    return Err(range("t_list", &"must be a non-empty list of finite times"));
                }
                _ => {}
            },
            Command::Dimension => {
                if self.source == Some(DimensionSource::Julia) && self.c.is_none() {
                    return Err(missing("c"));
                }
                let (lo, hi) = self.box_range(&grid);
                if lo < 2 || lo >= hi || hi > grid.px_w().min(grid.px_h()) / 4 {
                    return Err(range(
                        "max_box",
                        &format!("need 2 <= min_box < max_box <= px/4, got {lo}..{hi}"),
                    ));
                }
            }
            Command::VerifyFmt => {
                if self.supersample == Some(0) {
                    return Err(range("supersample", &"must be at least 1"));
                }
            }
            Command::Zeno => {
                let (d0, t1) = (self.d0.unwrap_or_default(), self.t1.unwrap_or_default());
                if !(d0.is_finite() && d0 > 0.0) {
                    return Err(range("d0", &"must be positive"));
                }
                if !(t1.is_finite() && t1 > 0.0) {
                    return Err(range("t1", &"must be positive"));
                }
                if self.n == Some(0) {
                    return Err(range("n", &"must be at least 1"));
                }
            }
            _ => {}
        }
        Ok(Resolved {
            grid,
            params,
            map,
            flow,
            dst_grid,
        })
    }

    /// Box sizes for box counting: the configured ones or `2 ..= px/4`.
    pub fn box_range(&self, grid: &GridSpec) -> (usize, usize) {
        let lo = self.min_box.unwrap_or(2);
        let hi = self
            .max_box
            .unwrap_or_else(|| prev_power_of_two(grid.px_w().min(grid.px_h()) / 4));
        (lo, hi)
    }

    pub fn output(&self) -> &str {
        self.output.as_deref().unwrap_or_default()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn prev_power_of_two(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        1 << (usize::BITS - 1 - n.leading_zeros())
    }
}

/// Parses and validates a scene.
pub fn parse_config(text: &[u8]) -> Result<SceneConfig, ConfigError> {
    parse_with_overrides(text, &[])
}

/// Like [`parse_config`], with `key=value` overrides applied before validation.
/// Keys may be dotted (`grid.px_w=256`); values are JSON, or bare strings.
pub fn parse_with_overrides(text: &[u8], overrides: &[String]) -> Result<SceneConfig, ConfigError> {
    let text = std::str::from_utf8(text).map_err(|e| ConfigError::Syntax(format!("config is not UTF-8: {e}")))?;
    if overrides.is_empty() {
        let cfg: SceneConfig = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        cfg.resolve_with(&Locator { text: Some(text) })?;
        return Ok(cfg);
    }
    let mut doc: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    for ov in overrides {
        apply_override(&mut doc, ov)?;
    }
    // Re-render so that errors still carry line numbers (of the merged document).
    let merged = serde_json::to_string_pretty(&doc).expect("value serializes");
    let cfg: SceneConfig = serde_json::from_str(&merged)
        .map_err(|e| ConfigError::Syntax(format!("{e} (in the config after overrides)")))?;
    cfg.resolve_with(&Locator { text: Some(&merged) })?;
    Ok(cfg)
}

fn apply_override(doc: &mut Value, spec: &str) -> Result<(), ConfigError> {
    let bad = |msg: &str| ConfigError::Override(spec.to_string(), msg.to_string());
    let (key, raw) = spec.split_once('=').ok_or_else(|| bad("expected key=value"))?;
    if key.is_empty() {
        return Err(bad("empty key"));
    }
    let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    if value.is_object() {
        return Err(bad("only scalar and array values can be overridden"));
    }
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| bad("path runs through a non-object"))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split yields at least one part")
}
