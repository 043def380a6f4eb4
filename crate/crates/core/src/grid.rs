//! Raster windows of the complex plane and per-pixel orbit results.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexPoint;
use crate::error::{invalid, Error, Result};

/// A rectangular window of ℂ sampled at pixel centers.
///
/// Pixel `(0, 0)` is the top-left corner of the window (minimum real part,
/// maximum imaginary part). Column index `i` grows with the real part and
/// row index `j` decreases the imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    center: ComplexPoint,
    width: f64,
    height: f64,
    px_w: usize,
    px_h: usize,
}

impl GridSpec {
    pub fn new(center: ComplexPoint, width: f64, height: f64, px_w: usize, px_h: usize) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(invalid(format!("grid width must be positive and finite, got {width}")));
        }
        if !(height.is_finite() && height > 0.0) {
            return Err(invalid(format!(
                "grid height must be positive and finite, got {height}"
            )));
        }
        if px_w == 0 || px_h == 0 {
            return Err(invalid("grid must have at least one pixel in each direction"));
        }
        Ok(Self {
            center,
            width,
            height,
            px_w,
            px_h,
        })
    }

    /// Square window of side `extent` centered at `center` with `px`×`px` pixels.
    pub fn square(center: ComplexPoint, extent: f64, px: usize) -> Result<Self> {
        Self::new(center, extent, extent, px, px)
    }

    /// Window spanning `[re_min, re_max] × [im_min, im_max]`.
    pub fn from_bounds(re_min: f64, re_max: f64, im_min: f64, im_max: f64, px_w: usize, px_h: usize) -> Result<Self> {
        let center = ComplexPoint::try_new(0.5 * (re_min + re_max), 0.5 * (im_min + im_max))?;
        Self::new(center, re_max - re_min, im_max - im_min, px_w, px_h)
    }

    pub fn center(&self) -> ComplexPoint {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn px_w(&self) -> usize {
        self.px_w
    }

    pub fn px_h(&self) -> usize {
        self.px_h
    }

    pub fn len(&self) -> usize {
        self.px_w * self.px_h
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pixel pitch along the real axis.
    pub fn pitch_re(&self) -> f64 {
        self.width / self.px_w as f64
    }

    /// Pixel pitch along the imaginary axis.
    pub fn pitch_im(&self) -> f64 {
        self.height / self.px_h as f64
    }

    pub fn re_min(&self) -> f64 {
        self.center.re() - 0.5 * self.width
    }

    pub fn re_max(&self) -> f64 {
        self.center.re() + 0.5 * self.width
    }

    pub fn im_min(&self) -> f64 {
        self.center.im() - 0.5 * self.height
    }

    pub fn im_max(&self) -> f64 {
        self.center.im() + 0.5 * self.height
    }

    /// The same pixel lattice with a different window, mapped by `z ↦ scale·z + shift`.
    pub fn affine_image(&self, scale: f64, shift: ComplexPoint) -> Result<Self> {
        let c = self.center.to_c64() * scale + shift.to_c64();
        Self::new(
            ComplexPoint::try_from(c)?,
            self.width * scale.abs(),
            self.height * scale.abs(),
            self.px_w,
            self.px_h,
        )
    }

    /// Center of pixel `(i, j)`.
    pub fn point_of(&self, i: usize, j: usize) -> Result<ComplexPoint> {
        if i >= self.px_w || j >= self.px_h {
            return Err(Error::PixelOutOfBounds {
                i,
                j,
                px_w: self.px_w,
                px_h: self.px_h,
            });
        }
        ComplexPoint::try_from(self.sample(i as f64 + 0.5, j as f64 + 0.5))
    }

    /// Center of pixel `(i, j)` without bounds checking.
    #[inline]
    pub fn point_c64(&self, i: usize, j: usize) -> Complex64 {
        // Offsets are formed as (2i + 1 - n)/(2n) so that pixels mirrored about
        // the window center get exactly negated offsets.
        let re_steps = (2 * i + 1) as f64 - self.px_w as f64;
        let im_steps = (2 * j + 1) as f64 - self.px_h as f64;
        Complex64::new(
            self.center.re() + re_steps * self.width / (2 * self.px_w) as f64,
            self.center.im() - im_steps * self.height / (2 * self.px_h) as f64,
        )
    }

    /// Point at fractional pixel coordinates `(x, y)`, where `(0, 0)` is the
    /// top-left corner of the window and `(px_w, px_h)` the bottom-right one.
    #[inline]
    pub fn sample(&self, x: f64, y: f64) -> Complex64 {
        let re_steps = 2.0 * x - self.px_w as f64;
        let im_steps = 2.0 * y - self.px_h as f64;
        Complex64::new(
            self.center.re() + re_steps * self.width / (2 * self.px_w) as f64,
            self.center.im() - im_steps * self.height / (2 * self.px_h) as f64,
        )
    }

    /// Pixel whose center is nearest to `z`.
    pub fn pixel_of(&self, z: ComplexPoint) -> Result<(usize, usize)> {
        self.locate(z.to_c64())
    }

    /// Like [`GridSpec::pixel_of`] for a raw complex value; NaN and infinities are errors.
    pub fn locate(&self, z: Complex64) -> Result<(usize, usize)> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("pixel lookup"));
        }
        self.locate_finite(z).ok_or(Error::OutOfWindow)
    }

    #[inline]
    pub(crate) fn locate_finite(&self, z: Complex64) -> Option<(usize, usize)> {
        let x = (z.re - self.center.re()) * self.px_w as f64 / self.width + 0.5 * self.px_w as f64;
        let y = (self.center.im() - z.im) * self.px_h as f64 / self.height + 0.5 * self.px_h as f64;
        let i = cell_index(x, self.px_w)?;
        let j = cell_index(y, self.px_h)?;
        Some((i, j))
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.px_w + i
    }
}

#[inline]
fn cell_index(x: f64, n: usize) -> Option<usize> {
    // The closed window includes its far edge, which belongs to the last pixel.
    if !(x >= 0.0 && x <= n as f64) {
        return None;
    }
    Some((x.floor() as usize).min(n - 1))
}

/// Boundedness verdict for one orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitStatus {
    Bounded,
    /// First iteration at which the orbit left the escape disk.
    Escaped(u32),
    /// The seed could not be formed (domain error of a map or flow).
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub status: OrbitStatus,
    /// Magnitude of the last iterate examined; `f64::MAX` stands in for overflow.
    pub last_magnitude: f64,
}

impl OrbitResult {
    pub const INVALID: Self = Self {
        status: OrbitStatus::Invalid,
        last_magnitude: 0.0,
    };

    pub fn bounded(last_magnitude: f64) -> Self {
        Self {
            status: OrbitStatus::Bounded,
            last_magnitude: finite_magnitude(last_magnitude),
        }
    }

    pub fn escaped(iteration: u32, last_magnitude: f64) -> Self {
        Self {
            status: OrbitStatus::Escaped(iteration),
            last_magnitude: finite_magnitude(last_magnitude),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.status == OrbitStatus::Bounded
    }

    pub fn is_invalid(&self) -> bool {
        self.status == OrbitStatus::Invalid
    }

    pub fn escape_iteration(&self) -> Option<u32> {
        match self.status {
            OrbitStatus::Escaped(n) => Some(n),
            _ => None,
        }
    }
}

fn finite_magnitude(m: f64) -> f64 {
    if m.is_finite() {
        m.abs()
    } else {
        f64::MAX
    }
}

/// Per-pixel orbit results over a [`GridSpec`], stored row-major from the top-left.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterField {
    grid: GridSpec,
    cells: Vec<OrbitResult>,
}

impl RasterField {
    pub fn from_cells(grid: GridSpec, cells: Vec<OrbitResult>) -> Result<Self> {
        if cells.len() != grid.len() {
            return Err(invalid(format!(
                "{} cells supplied for a {}x{} grid",
                cells.len(),
                grid.px_w(),
                grid.px_h()
            )));
        }
        Ok(Self { grid, cells })
    }

    /// Fills every cell by evaluating `f` at its pixel center, in parallel over rows.
    pub fn render<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(Complex64) -> OrbitResult + Sync,
    {
        let w = grid.px_w();
        let mut cells = vec![OrbitResult::INVALID; grid.len()];
        cells.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
            for (i, cell) in row.iter_mut().enumerate() {
                *cell = f(grid.point_c64(i, j));
            }
        });
        Self { grid, cells }
    }

    /// Builds a field from a boolean mask: `true` cells are Bounded, others Escaped(0).
    pub fn from_mask(grid: GridSpec, mask: &[bool]) -> Result<Self> {
        let cells = mask
            .iter()
            .map(|&b| {
                if b {
                    OrbitResult::bounded(0.0)
                } else {
                    OrbitResult::escaped(0, 0.0)
                }
            })
            .collect();
        Self::from_cells(grid, cells)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn cells(&self) -> &[OrbitResult] {
        &self.cells
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&OrbitResult> {
        if i < self.grid.px_w() && j < self.grid.px_h() {
            self.cells.get(self.grid.index(i, j))
        } else {
            None
        }
    }

    pub fn is_bounded(&self, i: usize, j: usize) -> bool {
        self.get(i, j).is_some_and(OrbitResult::is_bounded)
    }

    pub fn bounded_mask(&self) -> Vec<bool> {
        self.cells.iter().map(OrbitResult::is_bounded).collect()
    }

    pub fn invalid_mask(&self) -> Vec<bool> {
        self.cells.iter().map(OrbitResult::is_invalid).collect()
    }

    pub fn bounded_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_bounded()).count()
    }

    pub fn invalid_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_invalid()).count()
    }

    pub fn max_escape_iteration(&self) -> Option<u32> {
        self.cells.iter().filter_map(OrbitResult::escape_iteration).max()
    }

    /// Resamples the Bounded mask onto `dst`: each destination pixel center `w`
    /// takes the state of the source pixel nearest to `w / scale`.
    /// Destination pixels that fall outside the source window are not Bounded.
    pub fn rescaled_mask(&self, scale: f64, dst: &GridSpec) -> Vec<bool> {
        let mut mask = vec![false; dst.len()];
        for j in 0..dst.px_h() {
            for i in 0..dst.px_w() {
                let z = dst.point_c64(i, j) / scale;
                if let Some((si, sj)) = self.grid.locate_finite(z) {
                    mask[dst.index(i, j)] = self.is_bounded(si, sj);
                }
            }
        }
        mask
    }
}
