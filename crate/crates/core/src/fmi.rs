//! Fractal mapping iterations.
//!
//! A fractal mapping iteration conjugates the quadratic iteration by an
//! invertible map `f`, `z_{n+1} = f(F(f⁻¹(z_n)))`. Its bounded set is computed
//! here in pullback coordinates: each pixel is mapped once through `f⁻¹` and the
//! resulting orbit of `F(z) = z² + c` is classified with the usual escape test.
//! For bi-Lipschitz `f` this is equivalent to iterating the conjugated map,
//! and the resulting set equals `f(𝓚_c)`.
//!
//! [`forward_image`] computes `f(𝓚_c)` directly by pushing source pixels
//! through `f`; comparing the two is the numerical check of that equality.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexPoint;
use crate::error::{invalid, Result};
use crate::fji::{classify, render_julia, IterParams};
use crate::grid::{GridSpec, OrbitResult, RasterField};
use crate::maps::MapSpec;

/// Supersampling factor used for the push-forward frames of a trajectory.
pub const TRAJECTORY_SUPERSAMPLE: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FmiMode {
    JuliaFmi,
    MandelbrotFmi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FmiScene {
    pub grid: GridSpec,
    pub c: ComplexPoint,
    pub map: MapSpec,
    pub params: IterParams,
    pub mode: FmiMode,
}

impl FmiScene {
    pub fn render(&self) -> RasterField {
        match self.mode {
            FmiMode::JuliaFmi => julia_pullback(&self.grid, self.c, &self.map, &self.params),
            FmiMode::MandelbrotFmi => mandelbrot_pullback(&self.grid, &self.map, &self.params),
        }
    }
}

/// Mapped Julia set `f(𝓚_c)`.
pub fn fmi_julia(scene: &FmiScene) -> Result<RasterField> {
    if scene.mode != FmiMode::JuliaFmi {
        return Err(invalid("fmi_julia needs a JuliaFmi scene"));
    }
    Ok(scene.render())
}

/// Mapped Mandelbrot set `f(𝓜)`: the orbit of 0 under `z² + f⁻¹(c')` for each pixel `c'`.
pub fn fmi_mandelbrot(scene: &FmiScene) -> Result<RasterField> {
    if scene.mode != FmiMode::MandelbrotFmi {
        return Err(invalid("fmi_mandelbrot needs a MandelbrotFmi scene"));
    }
    Ok(scene.render())
}

pub(crate) fn julia_pullback(grid: &GridSpec, c: ComplexPoint, map: &MapSpec, params: &IterParams) -> RasterField {
    let c = c.to_c64();
    RasterField::render(*grid, |z| match map.inverse(z) {
        Ok(w) => classify(w, c, params),
        Err(_) => OrbitResult::INVALID,
    })
}

fn mandelbrot_pullback(grid: &GridSpec, map: &MapSpec, params: &IterParams) -> RasterField {
    RasterField::render(*grid, |c| match map.inverse(c) {
        Ok(c) => classify(Complex64::new(0.0, 0.0), c, params),
        Err(_) => OrbitResult::INVALID,
    })
}

/// Direct image of the Bounded cells of `src` under `f`, rasterized on `dst_grid`.
///
/// Each Bounded source pixel is split into `supersample²` stratified sub-cells.
/// A sub-cell is pushed through `f` at its centre and deposits its mapped area,
/// from the local Jacobian, into the destination pixel containing the image.
/// A destination pixel is Bounded once at least half of it is covered;
/// all other cells are `Escaped(0)`.
pub fn forward_image(src: &RasterField, map: &MapSpec, dst_grid: &GridSpec, supersample: u32) -> Result<RasterField> {
    if supersample == 0 {
        return Err(invalid("supersample must be at least 1"));
    }
    let sg = *src.grid();
    let s = supersample as usize;
    let offsets: Vec<f64> = (0..s).map(|k| (k as f64 + 0.5) / s as f64).collect();
    let (hr, hi) = (sg.pitch_re() / s as f64, sg.pitch_im() / s as f64);
    let sub_area = hr * hi / (dst_grid.pitch_re() * dst_grid.pitch_im());

    let deposits: Vec<Vec<(usize, f64)>> = src
        .cells()
        .par_chunks(sg.px_w())
        .enumerate()
        .map(|(j, row)| {
            let mut out = Vec::new();
            for (i, cell) in row.iter().enumerate() {
                if !cell.is_bounded() {
                    continue;
                }
                for &oy in &offsets {
                    for &ox in &offsets {
                        let z = sg.sample(i as f64 + ox, j as f64 + oy);
                        let Ok(w) = map.forward(z) else { continue };
                        let Some((di, dj)) = dst_grid.locate_finite(w) else {
                            continue;
                        };
                        let Some(jac) = area_factor(map, z, w, 1e-3 * hr, 1e-3 * hi) else {
                            continue;
                        };
                        out.push((dst_grid.index(di, dj), jac * sub_area));
                    }
                }
            }
            out
        })
        .collect();

    let mut coverage = vec![0.0; dst_grid.len()];
    for (k, a) in deposits.into_iter().flatten() {
        coverage[k] += a;
    }
    let mask: Vec<bool> = coverage.iter().map(|&a| a >= COVERAGE_THRESHOLD).collect();
    RasterField::from_mask(*dst_grid, &mask)
}

const COVERAGE_THRESHOLD: f64 = 0.5 - 1e-9;

/// `|det Df(z)|` by one-sided differences, falling back to the other side
/// when a step leaves the domain.
fn area_factor(map: &MapSpec, z: Complex64, w: Complex64, hr: f64, hi: f64) -> Option<f64> {
    let diff = |dz: Complex64, h: f64| -> Option<Complex64> {
        if let Ok(p) = map.forward(z + dz) {
            return Some((p - w) / h);
        }
        map.forward(z - dz).ok().map(|m| (w - m) / h)
    };
    let dx = diff(Complex64::new(hr, 0.0), hr)?;
    let dy = diff(Complex64::new(0.0, hi), hi)?;
    let det = (dx.re * dy.im - dx.im * dy.re).abs();
    det.is_finite().then_some(det)
}

/// Rasters of the fractal trajectory `𝓙_0, 𝓙_1 = f(𝓙_0), …, 𝓙_{k_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Element `k` classifies `f⁻ᵏ(z)` for each pixel `z`.
    pub pullback: Vec<RasterField>,
    /// Element `k` is the `forward_image` of element 0 under `f^k`.
    pub pushforward: Vec<RasterField>,
}

/// Discrete fractal dynamics `𝓙_{k+1} = f(𝓙_k)` starting from `𝓚_c`.
///
/// The pullback variant uses `k`-fold principal-branch inverses, so for maps
/// that are not injective (such as `QuadraticParam`) it selects one preimage
/// branch; the push-forward variant involves no branch choice.
pub fn discrete_trajectory(
    c: ComplexPoint,
    map: &MapSpec,
    k_max: u32,
    grid: &GridSpec,
    params: &IterParams,
) -> Result<Trajectory> {
    let initial = render_julia(grid, c, params);
    let mut pullback = Vec::with_capacity(k_max as usize + 1);
    let mut pushforward = Vec::with_capacity(k_max as usize + 1);
    for k in 1..=k_max {
        let fk = map.iterated(k);
        pullback.push(julia_pullback(grid, c, &fk, params));
        pushforward.push(forward_image(&initial, &fk, grid, TRAJECTORY_SUPERSAMPLE)?);
    }
    pullback.insert(0, initial.clone());
    pushforward.insert(0, initial);
    Ok(Trajectory { pullback, pushforward })
}

/// Marks destination cells Invalid unless their pullback lands inside `src_grid`
/// and maps back onto the same point, i.e. unless they lie in `f(window)`.
pub fn restrict_to_image(field: &RasterField, map: &MapSpec, src_grid: &GridSpec) -> RasterField {
    let grid = *field.grid();
    let cells = field
        .cells()
        .par_iter()
        .enumerate()
        .map(|(idx, cell)| {
            let w = grid.point_c64(idx % grid.px_w(), idx / grid.px_w());
            let inside = map.inverse(w).ok().and_then(|z| {
                src_grid.locate_finite(z)?;
                let back = map.forward(z).ok()?;
                ((back - w).norm() <= 1e-6 * (1.0 + w.norm())).then_some(())
            });
            if inside.is_some() {
                *cell
            } else {
                OrbitResult::INVALID
            }
        })
        .collect();
    RasterField::from_cells(grid, cells).expect("same grid")
}

/// Bounding window of `f(src_grid)` estimated from a lattice of sample points,
/// with the same pixel count as `src_grid`.
pub fn image_window(map: &MapSpec, src_grid: &GridSpec, samples_per_side: usize) -> Result<GridSpec> {
    let n = samples_per_side.max(2);
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for b in 0..n {
        for a in 0..n {
            let x = a as f64 / (n - 1) as f64 * src_grid.px_w() as f64;
            let y = b as f64 / (n - 1) as f64 * src_grid.px_h() as f64;
            if let Ok(w) = map.forward(src_grid.sample(x, y)) {
                lo = Complex64::new(lo.re.min(w.re), lo.im.min(w.im));
                hi = Complex64::new(hi.re.max(w.re), hi.im.max(w.im));
            }
        }
    }
    if !(lo.re < hi.re && lo.im < hi.im) {
        return Err(invalid("map image of the window is degenerate"));
    }
    GridSpec::from_bounds(lo.re, hi.re, lo.im, hi.im, src_grid.px_w(), src_grid.px_h())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fji::render_mandelbrot;
    use crate::grid::OrbitStatus;

    fn cp(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    fn scene(grid: GridSpec, c: ComplexPoint, map: MapSpec, mode: FmiMode) -> FmiScene {
        FmiScene {
            grid,
            c,
            map,
            params: IterParams::new(200, 2.0).unwrap(),
            mode,
        }
    }

    #[test]
    fn identity_map_is_plain_fji() {
        let g = GridSpec::square(ComplexPoint::ZERO, 3.0, 81).unwrap();
        let c = cp(-0.7589, 0.0735);
        let s = scene(g, c, MapSpec::identity(), FmiMode::JuliaFmi);
        assert_eq!(fmi_julia(&s).unwrap(), render_julia(&g, c, &s.params));
        let gm = GridSpec::new(cp(-0.5, 0.0), 3.0, 2.4, 90, 72).unwrap();
        let sm = scene(gm, c, MapSpec::identity(), FmiMode::MandelbrotFmi);
        assert_eq!(fmi_mandelbrot(&sm).unwrap(), render_mandelbrot(&gm, &sm.params));
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let g = GridSpec::square(ComplexPoint::ZERO, 3.0, 8).unwrap();
        let s = scene(g, ComplexPoint::ZERO, MapSpec::identity(), FmiMode::MandelbrotFmi);
        assert!(fmi_julia(&s).is_err());
    }

    #[test]
    fn shifted_mandelbrot_pullbacks() {
        // c' = 0 pulls back to c = −1 (bounded), c' = 2 pulls back to c = 1 (escapes at 3).
        let map = MapSpec::affine(ComplexPoint::ONE, ComplexPoint::ONE).unwrap();
        let at = |re: f64| {
            let g = GridSpec::square(cp(re, 0.0), 1e-3, 1).unwrap();
            let s = scene(g, ComplexPoint::ZERO, map.clone(), FmiMode::MandelbrotFmi);
            fmi_mandelbrot(&s).unwrap().cells()[0].status
        };
        assert_eq!(at(0.0), OrbitStatus::Bounded);
        assert_eq!(at(2.0), OrbitStatus::Escaped(3));
    }

    #[test]
    fn domain_errors_become_invalid() {
        // 1/(1 + cos w) has a pole at w = π.
        let g = GridSpec::square(cp(std::f64::consts::PI, 0.0), 1e-10, 1).unwrap();
        let s = scene(g, cp(-0.7589, 0.0735), MapSpec::arccos_reciprocal(), FmiMode::JuliaFmi);
        assert!(fmi_julia(&s).unwrap().cells()[0].is_invalid());
    }

    #[test]
    fn forward_identity_same_grid() {
        let g = GridSpec::square(ComplexPoint::ZERO, 3.0, 64).unwrap();
        let k = render_julia(&g, cp(-0.175, -0.655), &IterParams::new(200, 2.0).unwrap());
        let img = forward_image(&k, &MapSpec::identity(), &g, 3).unwrap();
        assert_eq!(img.bounded_mask(), k.bounded_mask());
        assert!(forward_image(&k, &MapSpec::identity(), &g, 0).is_err());
    }

    #[test]
    fn forward_unmarked_cells_are_escaped_zero() {
        let g = GridSpec::square(ComplexPoint::ZERO, 3.0, 16).unwrap();
        let empty = RasterField::from_mask(g, &[false; 256]).unwrap();
        let img = forward_image(&empty, &MapSpec::identity(), &g, 2).unwrap();
        assert!(img.cells().iter().all(|c| c.status == OrbitStatus::Escaped(0)));
    }

    #[test]
    fn trajectory_k0_is_julia() {
        let g = GridSpec::square(ComplexPoint::ZERO, 3.0, 41).unwrap();
        let c = cp(-0.175, -0.655);
        let p = IterParams::new(100, 2.0).unwrap();
        let t = discrete_trajectory(c, &MapSpec::arcsin_root5(), 0, &g, &p).unwrap();
        assert_eq!(t.pullback.len(), 1);
        assert_eq!(t.pullback[0], render_julia(&g, c, &p));
        assert_eq!(t.pushforward[0], t.pullback[0]);
    }

    #[test]
    fn restriction_keeps_only_the_image_window() {
        let src = GridSpec::square(ComplexPoint::ZERO, 1.0, 16).unwrap();
        let dst = GridSpec::square(ComplexPoint::ZERO, 4.0, 16).unwrap();
        let field = RasterField::from_mask(dst, &[true; 256]).unwrap();
        let map = MapSpec::affine(cp(2.0, 0.0), ComplexPoint::ZERO).unwrap();
        let r = restrict_to_image(&field, &map, &src);
        // f(src) = [−1, 1]², the middle half of the destination window.
        for j in 0..16 {
            for i in 0..16 {
                let inside = (4..12).contains(&i) && (4..12).contains(&j);
                assert_eq!(!r.get(i, j).unwrap().is_invalid(), inside, "({i},{j})");
            }
        }
    }

    #[test]
    fn image_window_of_affine_map() {
        let src = GridSpec::square(ComplexPoint::ZERO, 3.0, 32).unwrap();
        let map = MapSpec::affine(cp(2.0, 0.0), ComplexPoint::ONE).unwrap();
        let w = image_window(&map, &src, 9).unwrap();
        assert!((w.center().re() - 1.0).abs() < 1e-12);
        assert!((w.width() - 6.0).abs() < 1e-12 && (w.height() - 6.0).abs() < 1e-12);
        assert_eq!((w.px_w(), w.px_h()), (32, 32));
    }
}
