use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A truncated series could not certify the requested tolerance within
    /// its term budget.
    #[error("series truncation failed after {terms} terms: certified tail {achieved_bound:e} exceeds tolerance {requested:e}")]
    Truncation {
        terms: usize,
        achieved_bound: f64,
        requested: f64,
    },

    /// `n * Q_n` was not divisible by `n`. This can only happen through a bug
    /// in the coefficient recurrence.
    #[error("internal consistency failure: n*Q_n not divisible by n = {n} at coefficient {k}")]
    InexactDivision { n: usize, k: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    /// The point lies outside the region where the requested formula holds.
    #[error("{operation} does not apply at x = {x}: {reason}; use {suggestion} instead")]
    Region {
        operation: &'static str,
        x: String,
        reason: String,
        suggestion: &'static str,
    },

    /// A bracketing search found no sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// Some `Re L_k` with `k >= 3` reached `max(Re L_1, Re L_2)`.
    #[error("dominance violated at x = {x}: Re L_{k} = {re_lk} >= {re_dominant}")]
    Dominance {
        x: String,
        k: u32,
        re_lk: f64,
        re_dominant: f64,
    },

    #[error("adaptive quadrature did not converge: error estimate {error_estimate:e} after {intervals} subintervals")]
    Quadrature {
        error_estimate: f64,
        intervals: usize,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors that mean "wrong region / wrong input" rather than a
    /// numerical breakdown.
    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::Region { .. } | Error::OutOfRange(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
