use fracmap_core::{OrbitStatus, RasterField};
use serde::{Deserialize, Serialize};

pub type Rgb = [u8; 3];

pub const BOUNDED: Rgb = [0, 0, 0];
/// Reserved for Invalid cells; no escape color is magenta.
pub const INVALID: Rgb = [255, 0, 255];

/// Gradient stops of the classic palette. Every channel is non-decreasing,
/// so colors brighten monotonically with the escape count.
const CLASSIC_STOPS: [(f64, Rgb); 5] = [
    (0.0, [0, 7, 60]),
    (0.25, [20, 60, 160]),
    (0.5, [60, 150, 220]),
    (0.75, [200, 225, 240]),
    (1.0, [255, 250, 245]),
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    Grayscale,
    #[default]
    Classic,
    Mono,
}

impl Palette {
    /// Color of one cell; `max_n` is the largest escape count in the image.
    pub fn color(self, status: OrbitStatus, max_n: u32) -> Rgb {
        let n = match status {
            OrbitStatus::Bounded => return BOUNDED,
            OrbitStatus::Invalid => return INVALID,
            OrbitStatus::Escaped(n) => n,
        };
        let s = (n.min(max_n) as f64 + 1.0) / (max_n as f64 + 1.0);
        match self {
            Palette::Grayscale => {
                let v = (1.0 + 254.0 * s).round() as u8;
                [v, v, v]
            }
            Palette::Classic => gradient(s.sqrt()),
            Palette::Mono => [255, 255, 255],
        }
    }

    /// Row-major RGB bytes of the whole field, top row first.
    pub fn paint(self, field: &RasterField) -> Vec<u8> {
        let max_n = field.max_escape_iteration().unwrap_or(0);
        field
            .cells()
            .iter()
            .flat_map(|cell| self.color(cell.status, max_n))
            .collect()
    }
}

fn gradient(s: f64) -> Rgb {
    let k = CLASSIC_STOPS
        .iter()
        .position(|&(at, _)| at >= s)
        .unwrap_or(CLASSIC_STOPS.len() - 1)
        .max(1);
    let (s0, c0) = CLASSIC_STOPS[k - 1];
    let (s1, c1) = CLASSIC_STOPS[k];
    let u = ((s - s0) / (s1 - s0)).clamp(0.0, 1.0);
    let mut out = [0; 3];
    for ch in 0..3 {
        out[ch] = (c0[ch] as f64 + u * (c1[ch] as f64 - c0[ch] as f64)).round() as u8;
    }
    out
}
