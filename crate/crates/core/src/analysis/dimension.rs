use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::RasterField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    /// Least-squares slope of `log N(ε)` against `log(1/ε)`.
    pub slope: f64,
    pub r_squared: f64,
    /// Box sizes in pixels, ascending.
    pub scales_used: Vec<usize>,
    /// Occupied boxes at each size.
    pub counts: Vec<usize>,
}

/// Counts grid-aligned `size`×`size` boxes (anchored at the top-left pixel)
/// containing at least one Bounded cell, for each dyadic size in
/// `[min_box, max_box]`. Partial boxes along the right and bottom edges count.
pub fn box_counts(field: &RasterField, min_box: usize, max_box: usize) -> Vec<(usize, usize)> {
    let grid = field.grid();
    let mut w = grid.px_w();
    let mut h = grid.px_h();
    let mut occ = field.bounded_mask();
    let mut size = 1;
    let mut out = Vec::new();
    while size <= max_box {
        if size >= min_box {
            out.push((size, occ.iter().filter(|&&b| b).count()));
        }
        // OR-pool 2×2 blocks to get occupancy at twice the box size.
        let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
        let mut next = vec![false; nw * nh];
        for j in 0..h {
            for i in 0..w {
                if occ[j * w + i] {
                    next[(j / 2) * nw + i / 2] = true;
                }
            }
        }
        occ = next;
        w = nw;
        h = nh;
        size *= 2;
    }
    out
}

/// Box-counting (Minkowski–Bouligand) dimension of the Bounded cells.
///
/// Box sizes are the powers of two between `min_box` and `max_box`.
pub fn box_counting_dimension(field: &RasterField, min_box: usize, max_box: usize) -> Result<DimensionEstimate> {
    let grid = field.grid();
    let limit = grid.px_w().min(grid.px_h()) / 4;
    if min_box < 2 || min_box >= max_box || max_box > limit {
        return Err(invalid(format!(
            "box sizes must satisfy 2 <= min_box < max_box <= {limit}, got {min_box}..{max_box}"
        )));
    }
    if field.bounded_count() == 0 {
        return Err(Error::EmptyMask);
    }
    let counts = box_counts(field, min_box, max_box);
    if counts.len() < 3 {
        return Err(Error::InsufficientScales { found: counts.len() });
    }
    // x = log(1/ε), y = log N(ε)
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(s, n)| (-(s as f64).ln(), (n as f64).ln()))
        .collect();
    let (slope, r_squared) = least_squares(&pts);
    Ok(DimensionEstimate {
        slope,
        r_squared,
        scales_used: counts.iter().map(|&(s, _)| s).collect(),
        counts: counts.iter().map(|&(_, n)| n).collect(),
    })
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    (slope, r2)
}
