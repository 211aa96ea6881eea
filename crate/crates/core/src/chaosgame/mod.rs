//! Chaos-game runners, coverage metrics, minimality checkers, contraction and
//! fibre diagnostics, nested-preimage witnesses and product density of
//! skew-product orbits.

mod contract;
mod coverage;
mod minimality;
pub mod records;
mod skew;
mod witness;

use thiserror::Error;

use crate::dynamics::CoreError;
use crate::sequences::SequenceError;
use crate::setops::SetError;

pub use contract::{
    contractibility_diagnostic, fibre_diameter, fibre_diameter_curve, point_diameter, sample_points,
    ContractDiag, MAX_INTERIOR_SAMPLES,
};
pub use coverage::{checkpoints, first_hits, run_deterministic, run_probabilistic, CoverageReport};
pub use minimality::{
    check_backward_minimality, check_backward_minimality_in, check_forward_minimality,
    check_forward_minimality_in, forward_invariant_hull, forward_orbit_closure, Direction,
    MinimalityVerdict, Outcome, SeedOutcome, Witness,
};
pub use skew::{skew_density_check, skew_density_check_in, SkewDensity, MAX_LISTED_MISSING};
pub use witness::{accepts_backward_invariant, theorem_b_witness, TheoremBWitness};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChaosError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("invalid stream: {0}")]
    InvalidStream(String),
    #[error("nested preimages became empty; K is not backward invariant at this resolution")]
    EmptyWitness,
    #[error("{0}")]
    Precondition(String),
}
