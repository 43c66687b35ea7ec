//! Heralded generation, entanglement swapping, and the concentration round
//! with parity-mode recycling.
//!
//! Every decision made here (keep, recycle, discard, correct a sign) reads
//! only the classical herald record: QND outcome class and which detector
//! fired. Pair coefficients are never inspected by the control flow.

use thiserror::Error;
use crate::fock::FockError;

mod concentration;
mod generation;
mod herald;
mod iteration;
mod monte_carlo;
mod pair;
mod swap;

pub use concentration::{
    concentration_round, concentration_round_with, recyclable_branches, recyclable_to_pair,
    RoundModes, RoundOptions,
};
pub use generation::{generate_entanglement, Generation};
pub use herald::{Herald, HeraldEvent, ProtocolResult, Tag};
pub use iteration::{iterate_concentration, IterationLedger, RoundEntry};
pub use monte_carlo::{
    run_monte_carlo, sample_heralds, sample_yield, HeraldEstimate, RoundStatistics, YieldEstimate,
};
pub use pair::{SingleRailPair, SourceParams, PAIR_NORM_TOLERANCE};
pub use swap::{swap, swap_chain, swap_chain_along, swap_chain_closed_form, ChainOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Fock(#[from] FockError),

    /// Out-of-range physical parameters.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Inputs violate an assumption of the procedure (e.g. non-identical copies).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A result was passed to an operation that cannot consume it.
    #[error("contract error: {0}")]
    Contract(String),
}

pub type ProtoResult<T> = Result<T, ProtocolError>;
