use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid mass profile: {0}")]
    InvalidProfile(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: expected {expected} nodes on [{t0}, {t1}], got {found}")]
    ShapeMismatch {
        expected: usize,
        found: usize,
        t0: f64,
        t1: f64,
    },

    /// A Picard run blew up. The partial report is kept for diagnostics.
    #[error("fixed-point iteration diverged after {} iterations", .0.iterations)]
    Diverged(Box<SolveReport>),

    #[error("fixed-point iteration did not reach tolerance in {} iterations", .0.iterations)]
    NotConverged(Box<SolveReport>),

    #[error("integration produced a non-finite state at t = {time}")]
    Integration { time: f64 },

    #[error("no sign change of the miss function for v_init in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("oracle failure: {0}")]
    OracleFailure(String),
}

impl Error {
    /// Partial report carried by the two iteration failures.
    pub fn solve_report(&self) -> Option<&SolveReport> {
        match self {
            Error::Diverged(r) | Error::NotConverged(r) => Some(r),
            _ => None,
        }
    }
}
