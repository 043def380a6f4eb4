//! Escape-time fractals, fractal mapping iterations and fractal dynamics.
//!
//! The crate renders filled Julia and Mandelbrot sets, transports them through
//! invertible complex maps and ODE flows, and provides the measurements
//! (box-counting dimension, mask similarity) used to check that mapped sets
//! are the images of the originals.

pub mod analysis;
pub mod complex;
pub mod error;
pub mod fji;
pub mod flow;
pub mod fmi;
pub mod grid;
pub mod maps;
pub mod sampling;

pub use analysis::{
    box_counting_dimension, compare_masks, rasterize_zeno, zeno_states, DimensionEstimate, MaskComparison, ZenoDiagram,
};
pub use complex::ComplexPoint;
pub use error::{Error, Result};
pub use fji::{classify_orbit, extract_boundary, render_julia, render_mandelbrot, IterParams};
pub use flow::{flow_apply, flow_inverse, fmi_flow_julia, ode_residual, trajectory_sweep, FlowSpec};
pub use fmi::{discrete_trajectory, fmi_julia, fmi_mandelbrot, forward_image, FmiMode, FmiScene, Trajectory};
pub use grid::{GridSpec, OrbitResult, OrbitStatus, RasterField};
pub use maps::{estimate_bilipschitz, eval_forward, eval_inverse, LipschitzBounds, MapKind, MapSpec};
