//! Discretized compact sets, the Hutchinson operator with sound outer
//! approximation, Hausdorff distance between grids and tail closures of orbits.

pub mod export;
mod grid;
mod hausdorff;
mod hutchinson;

use thiserror::Error;

use crate::dynamics::CoreError;

pub use grid::{grid_from_points, tail_sets, Geometry, GridSet};
pub use hausdorff::{directed_hausdorff, distance_field, hausdorff_distance};
pub use hutchinson::{
    hutchinson_fixed_point, hutchinson_iterate, hutchinson_iterate_with, hutchinson_step, hutchinson_step_with, map_image,
    map_preimage, ConvergenceTrace, Stamping, TraceEntry,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetError {
    #[error("grids are not comparable: {0}")]
    Comparability(String),
    #[error("operation needs a nonempty set")]
    EmptySet,
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Domain(String),
    #[error("cut {cut} exceeds the orbit length {len} or cuts are not increasing")]
    Index { cut: usize, len: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}
