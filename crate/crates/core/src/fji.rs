//! Fatou-Julia iteration of the quadratic family `z ↦ z² + c`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexPoint;
use crate::error::{invalid, Result};
use crate::grid::{GridSpec, OrbitResult, OrbitStatus, RasterField};

pub const DEFAULT_MAX_ITER: u32 = 500;
pub const DEFAULT_ESCAPE_RADIUS: f64 = 2.0;

/// Iteration budget and escape test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterParams {
    max_iter: u32,
    escape_radius: f64,
}

impl IterParams {
    pub fn new(max_iter: u32, escape_radius: f64) -> Result<Self> {
        if max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        if !(escape_radius.is_finite() && escape_radius > 0.0) {
            return Err(invalid(format!(
                "escape_radius must be positive and finite, got {escape_radius}"
            )));
        }
        Ok(Self {
            max_iter,
            escape_radius,
        })
    }

    pub fn max_iter(&self) -> u32 {
        self.max_iter
    }

    pub fn escape_radius(&self) -> f64 {
        self.escape_radius
    }

    /// Whether escape past the radius is permanent for the quadratic family at `c`.
    pub fn escape_is_permanent(&self, c: ComplexPoint) -> bool {
        c.abs() > 2.0 || self.escape_radius >= 2.0
    }
}

impl Default for IterParams {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
        }
    }
}

/// Iterates `z ↦ z² + c` from `z0` and reports the first iterate outside the escape disk.
pub fn classify_orbit(z0: ComplexPoint, c: ComplexPoint, p: &IterParams) -> OrbitResult {
    classify(z0.to_c64(), c.to_c64(), p)
}

/// Raw-valued [`classify_orbit`]. A non-finite seed or iterate counts as escaped.
#[inline]
pub fn classify(z0: Complex64, c: Complex64, p: &IterParams) -> OrbitResult {
    let r2 = p.escape_radius * p.escape_radius;
    let (mut x, mut y) = (z0.re, z0.im);
    for n in 0..p.max_iter {
        let m2 = x * x + y * y;
        // NaN fails the comparison; an overflowed square counts as escape.
        if !(m2 <= r2) || m2 == f64::INFINITY {
            return OrbitResult::escaped(n, m2.sqrt());
        }
        let xy = x * y;
        x = x * x - y * y + c.re;
        y = xy + xy + c.im;
    }
    OrbitResult::bounded(x.hypot(y))
}

/// Filled Julia set `𝓚_c` sampled on `grid`.
pub fn render_julia(grid: &GridSpec, c: ComplexPoint, p: &IterParams) -> RasterField {
    let c = c.to_c64();
    RasterField::render(*grid, |z| classify(z, c, p))
}

/// Mandelbrot set sampled on `grid`: each pixel is the parameter `c`, seeded at 0.
pub fn render_mandelbrot(grid: &GridSpec, p: &IterParams) -> RasterField {
    RasterField::render(*grid, |c| classify(Complex64::new(0.0, 0.0), c, p))
}

/// Keeps the Bounded cells that touch a non-Bounded 4-neighbour or the window edge.
///
/// Interior Bounded cells become `Escaped(0)`; other cells are copied through.
pub fn extract_boundary(field: &RasterField) -> RasterField {
    let grid = *field.grid();
    let (w, h) = (grid.px_w(), grid.px_h());
    let cells = field.cells();
    let bounded = |i: usize, j: usize| cells[j * w + i].is_bounded();
    let out = (0..h)
        .flat_map(|j| (0..w).map(move |i| (i, j)))
        .map(|(i, j)| {
            let cell = cells[j * w + i];
            if cell.status != OrbitStatus::Bounded {
                return cell;
            }
            let on_edge = i == 0 || j == 0 || i + 1 == w || j + 1 == h;
            if on_edge || !bounded(i - 1, j) || !bounded(i + 1, j) || !bounded(i, j - 1) || !bounded(i, j + 1) {
                cell
            } else {
                OrbitResult::escaped(0, cell.last_magnitude)
            }
        })
        .collect();
    RasterField::from_cells(grid, out).expect("boundary preserves grid size")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    /// Independent orbit oracle: plain complex arithmetic, explicit sequence.
    fn orbit(z0: Complex64, c: Complex64, len: usize) -> Vec<Complex64> {
        let mut v = vec![z0];
        for _ in 1..len {
            let z = *v.last().unwrap();
            v.push(z * z + c);
        }
        v
    }

    #[test]
    fn fixed_point_at_zero() {
        let r = classify_orbit(ComplexPoint::ZERO, ComplexPoint::ZERO, &IterParams::default());
        assert_eq!(r.status, OrbitStatus::Bounded);
        assert_eq!(r.last_magnitude, 0.0);
    }

    #[test]
    fn period_two_at_minus_one() {
        let o = orbit(Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0), 6);
        assert_eq!(
            o.iter().map(|z| z.re).collect::<Vec<_>>(),
            vec![0.0, -1.0, 0.0, -1.0, 0.0, -1.0]
        );
        let r = classify_orbit(ComplexPoint::ZERO, cp(-1.0, 0.0), &IterParams::default());
        assert_eq!(r.status, OrbitStatus::Bounded);
    }

    #[test]
    fn c_one_escapes_at_three() {
        let o = orbit(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), 4);
        let first = o.iter().position(|z| z.norm() > 2.0).unwrap();
        assert_eq!(first, 3);
        let r = classify_orbit(ComplexPoint::ZERO, cp(1.0, 0.0), &IterParams::new(500, 2.0).unwrap());
        assert_eq!(r.status, OrbitStatus::Escaped(3));
        assert_eq!(r.last_magnitude, 5.0);
    }

    #[test]
    fn c_minus_two_lands_on_fixed_point() {
        let o = orbit(Complex64::new(0.0, 0.0), Complex64::new(-2.0, 0.0), 5);
        assert_eq!(
            o.iter().map(|z| z.re).collect::<Vec<_>>(),
            vec![0.0, -2.0, 2.0, 2.0, 2.0]
        );
        let r = classify_orbit(ComplexPoint::ZERO, cp(-2.0, 0.0), &IterParams::default());
        assert_eq!(r.status, OrbitStatus::Bounded);
    }

    #[test]
    fn seed_outside_radius_escapes_immediately() {
        let r = classify_orbit(cp(3.0, 0.0), ComplexPoint::ZERO, &IterParams::default());
        assert_eq!(r.status, OrbitStatus::Escaped(0));
    }

    #[test]
    fn overflow_counts_as_escape() {
        // A huge escape radius lets the orbit overflow before the radius test trips.
        let p = IterParams::new(50, 1e300).unwrap();
        let r = classify_orbit(cp(10.0, 0.0), ComplexPoint::ZERO, &p);
        let n = r.escape_iteration().expect("escaped");
        assert!(n < 50);
        assert_eq!(r.last_magnitude, f64::MAX);
    }

    #[test]
    fn escaped_iteration_below_max_iter() {
        let p = IterParams::new(3, 2.0).unwrap();
        let r = classify_orbit(ComplexPoint::ZERO, cp(1.0, 0.0), &p);
        // 0, 1, 2 all within the radius in the first three steps.
        assert_eq!(r.status, OrbitStatus::Bounded);
        assert_eq!(r.last_magnitude, 5.0);
    }

    #[test]
    fn iter_params_validation() {
        assert!(IterParams::new(0, 2.0).is_err());
        assert!(IterParams::new(10, 0.0).is_err());
        assert!(IterParams::new(10, f64::INFINITY).is_err());
        let d = IterParams::default();
        assert_eq!((d.max_iter(), d.escape_radius()), (500, 2.0));
    }

    #[test]
    fn boundary_of_full_field_is_frame() {
        let g = GridSpec::new(ComplexPoint::ZERO, 1.0, 1.0, 6, 4).unwrap();
        let full = RasterField::from_mask(g, &vec![true; 24]).unwrap();
        let b = extract_boundary(&full);
        for j in 0..4 {
            for i in 0..6 {
                let edge = i == 0 || j == 0 || i == 5 || j == 3;
                assert_eq!(b.is_bounded(i, j), edge, "({i},{j})");
            }
        }
    }

    #[test]
    fn boundary_of_empty_field_is_empty() {
        let g = GridSpec::new(ComplexPoint::ZERO, 1.0, 1.0, 5, 5).unwrap();
        let empty = RasterField::from_mask(g, &[false; 25]).unwrap();
        assert_eq!(extract_boundary(&empty).bounded_count(), 0);
    }

    #[test]
    fn unit_disk_boundary_hugs_the_circle() {
        let g = GridSpec::square(ComplexPoint::ZERO, 3.0, 301).unwrap();
        let k0 = render_julia(&g, ComplexPoint::ZERO, &IterParams::default());
        let b = extract_boundary(&k0);
        let pitch = g.pitch_re();
        assert!(b.bounded_count() > 0);
        for j in 0..g.px_h() {
            for i in 0..g.px_w() {
                if b.is_bounded(i, j) {
                    let r = g.point_c64(i, j).norm();
                    assert!((r - 1.0).abs() <= 1.5 * pitch, "pixel ({i},{j}) at radius {r}");
                }
            }
        }
    }
}
