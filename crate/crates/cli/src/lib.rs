//! Scene files, palettes and image output for the `fracmap` command-line tool.

pub mod config;
pub mod image;
pub mod palette;
pub mod run;

pub use config::{parse_config, parse_with_overrides, Command, ConfigError, SceneConfig};
pub use image::{encode_ppm, write_image};
pub use palette::Palette;
pub use run::{run, RunError, RunStats, RunSummary};
