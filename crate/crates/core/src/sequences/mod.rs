//! Address sequences: disjunctive deterministic streams, random drivers with a
//! conditional lower bound, and finite-prefix verification.

mod audit;
mod disjunctive;
mod stream;

use thiserror::Error;

pub use audit::{audit_driver, DriverAudit};
pub use disjunctive::{is_disjunctive_prefix, DisjunctiveCheck};
pub use stream::{StreamPolicy, SymbolStream};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("invalid stream policy: {0}")]
    InvalidPolicy(String),
    #[error("audit needs at least {need} samples, got {got}")]
    InsufficientSamples { need: u64, got: u64 },
    #[error("symbol stream exhausted at position {position}")]
    Exhausted { position: u64 },
}

/// The Champernowne stream over `{1..k}`.
pub fn champernowne_stream(k: usize) -> Result<SymbolStream, SequenceError> {
    SymbolStream::champernowne(k)
}

/// A seeded random stream; `policy` must be `Bernoulli` or `HistoryBiased`.
/// The `seed` argument replaces the one stored in the policy.
pub fn random_stream(k: usize, policy: StreamPolicy, seed: u64) -> Result<SymbolStream, SequenceError> {
    let policy = match policy {
        StreamPolicy::Bernoulli { weights, .. } => StreamPolicy::Bernoulli { weights, seed },
        StreamPolicy::HistoryBiased { p_min, .. } => StreamPolicy::HistoryBiased { p_min, seed },
        other => {
            return Err(SequenceError::InvalidPolicy(format!(
                "{other:?} is not a random policy"
            )))
        }
    };
    SymbolStream::new(k, policy)
}
