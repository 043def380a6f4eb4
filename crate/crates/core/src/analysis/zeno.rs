use serde::{Deserialize, Serialize};

use crate::complex::ComplexPoint;
use crate::error::{invalid, Result};
use crate::grid::{GridSpec, RasterField};

/// The lines of the Achilles-and-tortoise diagram from index `i0` on.
///
/// Line `i` sits at time `t_i = t1·(2 − 2^{1−i})` with height `d_i = d0·2^{−i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZenoDiagram {
    pub times: Vec<f64>,
    pub heights: Vec<f64>,
    pub i0: u32,
    pub d0: f64,
    pub t1: f64,
}

pub fn zeno_states(d0: f64, t1: f64, n: usize, i0: u32) -> Result<ZenoDiagram> {
    if !(d0.is_finite() && d0 > 0.0) {
        return Err(invalid(format!("d0 must be positive, got {d0}")));
    }
    if !(t1.is_finite() && t1 > 0.0) {
        return Err(invalid(format!("t1 must be positive, got {t1}")));
    }
    if n == 0 {
        return Err(invalid("at least one line is required"));
    }
    let idx = (0..n).map(|k| i0 as i32 + k as i32);
    let times = idx.clone().map(|i| t1 * (2.0 - 2f64.powi(1 - i))).collect();
    let heights = idx.map(|i| d0 * 2f64.powi(-i)).collect();
    Ok(ZenoDiagram {
        times,
        heights,
        i0,
        d0,
        t1,
    })
}

/// Draws the diagram as one-pixel-wide vertical lines on the window
/// `[0, 2·t1] × [0, d0]`, each rising from the bottom row to its height.
pub fn rasterize_zeno(diagram: &ZenoDiagram, px_w: usize, px_h: usize) -> Result<RasterField> {
    let (t1, d0) = (diagram.t1, diagram.d0);
    let grid = GridSpec::new(ComplexPoint::try_new(t1, 0.5 * d0)?, 2.0 * t1, d0, px_w, px_h)?;
    let mut mask = vec![false; grid.len()];
    for (&t, &d) in diagram.times.iter().zip(&diagram.heights) {
        let Ok((col, _)) = grid.pixel_of(ComplexPoint::try_new(t, 0.0)?) else {
            continue;
        };
        for row in (0..px_h).rev() {
            if grid.point_c64(col, row).im > d {
                break;
            }
            mask[grid.index(col, row)] = true;
        }
    }
    RasterField::from_mask(grid, &mask)
}
