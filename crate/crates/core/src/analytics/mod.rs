//! Yield of the iterated protocol: the closed-form series, an exhaustive
//! herald-tree oracle, and reports comparing the two with Monte Carlo.

use num_complex::Complex64 as C64;
use thiserror::Error;
use crate::fock::FockError;
use crate::protocols::ProtocolError;

mod oracle;
mod report;
mod series;

pub use oracle::{yield_oracle, MAX_ORACLE_ROUNDS};
pub use report::{
    compare_yield, entanglement_ratio, is_discrepant, YieldReport, YieldTerm, DISCREPANCY_TOLERANCE,
    RELATIVE_DISCREPANCY_TOLERANCE,
};
pub use series::yield_term;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity error: {0} rounds exceeds the oracle limit of {MAX_ORACLE_ROUNDS}")]
    Capacity(usize),

    #[error(transparent)]
    Protocol(#[from] ProtocolError),

    #[error(transparent)]
    Fock(#[from] FockError),
}

pub type AnalyticsResult<T> = Result<T, AnalyticsError>;

fn check_coefficients(alpha: C64, beta: C64) -> AnalyticsResult<()> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
        return Err(AnalyticsError::Domain(format!("|alpha|^2 + |beta|^2 = {norm}, expected 1")));
    }
    Ok(())
}
