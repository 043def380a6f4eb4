use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RasterField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskComparison {
    pub jaccard: f64,
    /// Symmetric Hausdorff distance between the Bounded pixel sets, in pixels.
    /// Infinite when exactly one mask is empty.
    pub hausdorff_px: f64,
}

/// Jaccard index and Hausdorff distance between the Bounded cells of two fields.
///
/// Cells that are Invalid in either field are dropped from both masks.
pub fn compare_masks(a: &RasterField, b: &RasterField) -> Result<MaskComparison> {
    let (ga, gb) = (a.grid(), b.grid());
    if ga.px_w() != gb.px_w() || ga.px_h() != gb.px_h() {
        return Err(Error::GridMismatch(ga.px_w(), ga.px_h(), gb.px_w(), gb.px_h()));
    }
    let (w, h) = (ga.px_w(), ga.px_h());
    let mut ma = Vec::with_capacity(w * h);
    let mut mb = Vec::with_capacity(w * h);
    for (ca, cb) in a.cells().iter().zip(b.cells()) {
        let keep = !ca.is_invalid() && !cb.is_invalid();
        ma.push(keep && ca.is_bounded());
        mb.push(keep && cb.is_bounded());
    }
    let inter = ma.iter().zip(&mb).filter(|(x, y)| **x && **y).count();
    let union = ma.iter().zip(&mb).filter(|(x, y)| **x || **y).count();
    if union == 0 {
        return Err(Error::Undefined);
    }
    let jaccard = inter as f64 / union as f64;
    let hausdorff_px = directed_hausdorff(&ma, &mb, w, h).max(directed_hausdorff(&mb, &ma, w, h));
    Ok(MaskComparison { jaccard, hausdorff_px })
}

/// `max_{p ∈ from} min_{q ∈ to} |p − q|` over pixel centers.
fn directed_hausdorff(from: &[bool], to: &[bool], w: usize, h: usize) -> f64 {
    if !from.iter().any(|&x| x) {
        return 0.0;
    }
    let dist2 = distance_transform(to, w, h);
    from.iter()
        .zip(&dist2)
        .filter(|(f, _)| **f)
        .map(|(_, d)| *d)
        .fold(0.0_f64, f64::max)
        .sqrt()
}

/// Exact squared Euclidean distance from every pixel to the nearest `true`
/// pixel (row-major `w`×`h` mask). Pixels are infinitely far from an empty mask.
///
/// Separable lower-envelope algorithm of Felzenszwalb and Huttenlocher.
pub fn distance_transform(mask: &[bool], w: usize, h: usize) -> Vec<f64> {
    let mut d: Vec<f64> = mask.iter().map(|&m| if m { 0.0 } else { f64::INFINITY }).collect();
    let mut buf_in = vec![0.0; w.max(h)];
    let mut buf_out = vec![0.0; w.max(h)];
    for i in 0..w {
        for j in 0..h {
            buf_in[j] = d[j * w + i];
        }
        edt_1d(&buf_in[..h], &mut buf_out[..h]);
        for j in 0..h {
            d[j * w + i] = buf_out[j];
        }
    }
    for j in 0..h {
        buf_in[..w].copy_from_slice(&d[j * w..(j + 1) * w]);
        edt_1d(&buf_in[..w], &mut buf_out[..w]);
        d[j * w..(j + 1) * w].copy_from_slice(&buf_out[..w]);
    }
    d
}

/// `out[q] = min_p (q − p)² + f[p]`.
fn edt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0_f64; n + 1];
    let mut k = 0usize;
    let Some(start) = f.iter().position(|x| x.is_finite()) else {
        out.fill(f64::INFINITY);
        return;
    };
    v[0] = start;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in start + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                // k > 0 here: z[0] is −∞.
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *o = dq * dq + f[p];
    }
}
