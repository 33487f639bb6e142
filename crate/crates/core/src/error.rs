use thiserror::Error;

use crate::heun::Parity;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "root count mismatch for N={n}, {parity:?}, d={d}: expected {expected} real roots, found {found}"
    )]
    RootCount {
        n: usize,
        parity: Parity,
        d: f64,
        expected: usize,
        found: usize,
    },

    #[error("no branch p={p} for N={n}, {parity:?}")]
    NoBranch { n: usize, parity: Parity, p: usize },

    #[error("branch continuation jumped from g={from} to g={to} at d={d}")]
    CurveDiscontinuity { d: f64, from: f64, to: f64 },

    #[error("basis size {given} too small, need at least {needed}")]
    BasisTooSmall { given: usize, needed: usize },

    #[error("no closed form available for N={n}, {parity:?}")]
    Unsupported { n: usize, parity: Parity },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("exponent fit rejected: {0}")]
    FitRejected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
