//! Circle constructions: Cantor arc sets, the Cantor-expanding PL
//! homeomorphism, and the named preset registry.

mod cantor;
pub mod presets;

use thiserror::Error;

use crate::dynamics::CoreError;

pub use cantor::{
    cantor_expanding_homeo, cantor_set, standard_pair, verify_expansion, CantorApprox, ExpansionCheck, ARC_TOL,
    MAX_LEVEL,
};
pub use presets::{cantor_candidate, make_preset, preset_names, Preset, RecommendedParams};

#[derive(Debug, Error)]
pub enum CircleError {
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invalid arc: {0}")]
    InvalidArc(String),
    #[error("incompatible Cantor structure: {0}")]
    IncompatibleStructure(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}
