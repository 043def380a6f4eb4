//! Quantitative checks on rendered sets: box-counting dimension, mask
//! comparison, and the Zeno pseudo-fractal diagrams.

mod compare;
mod dimension;
mod zeno;

pub use compare::{compare_masks, distance_transform, MaskComparison};
pub use dimension::{box_counting_dimension, box_counts, DimensionEstimate};
pub use zeno::{rasterize_zeno, zeno_states, ZenoDiagram};
