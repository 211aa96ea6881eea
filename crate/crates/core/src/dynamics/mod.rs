//! Spaces, generator maps, address words, orbital branches, fiberwise orbits
//! and the skew-product step.

mod ifs;
mod maps;
pub mod schema;
mod space;

pub use schema::SchemaError;

use thiserror::Error;

pub use ifs::{fiberwise_orbit, orbital_branch, skew_step, Ifs, SkewState, Symbol, SymbolWord};
pub use maps::{
    eval_inverse, eval_map, lipschitz_bound, Map, MapSpec, Region, BISECTION_TOL,
    LIPSCHITZ_SAFETY, LIPSCHITZ_SAMPLES_PER_UNIT,
};
pub use space::{canonical_angle, circle_distance, Point, Space, SpaceKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid IFS: {0}")]
    InvalidIfs(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("point does not belong to a {expected} space")]
    SpaceMismatch { expected: SpaceKind },
    #[error("point {0} lies outside the space")]
    Domain(String),
    #[error("map is not invertible")]
    NotInvertible,
    #[error("inverse did not converge (residual {residual:e})")]
    Convergence { residual: f64 },
    #[error("symbol {symbol} outside alphabet 1..={k}")]
    SymbolOutOfRange { symbol: Symbol, k: usize },
    #[error("symbol stream exhausted at position {position}")]
    StreamExhausted { position: u64 },
}
