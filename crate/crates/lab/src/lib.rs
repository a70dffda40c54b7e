//! Command-line laboratory around `superbroad-core`: file formats, parallel
//! sweeps, reports and heatmaps.

pub mod cli;
pub mod exit;
pub mod grid_io;
pub mod profile_io;
pub mod render;
pub mod report;
pub mod shape_spec;
pub mod sweep;

pub use exit::{Exit, LabError};
