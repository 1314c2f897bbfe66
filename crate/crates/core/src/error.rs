use thiserror::Error;

use crate::travel_time::CheckReport;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("nonzero diagonal at {0}: {1}")]
    NonzeroDiagonal(usize, f64),
    #[error("asymmetric entries at ({0}, {1}): {2} vs {3}")]
    Asymmetric(usize, usize, f64, f64),
    #[error("negative or zero off-diagonal distance at ({0}, {1}): {2}")]
    NotPositive(usize, usize, f64),
    #[error("triangle inequality violated at ({i}, {j}, {k}): {ik} > {ij} + {jk}")]
    Triangle {
        i: usize,
        j: usize,
        k: usize,
        ij: f64,
        jk: f64,
        ik: f64,
    },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("index {index} out of range for a space of {n} points")]
    Index { index: usize, n: usize },
    #[error("correspondence does not cover {side} index {index}")]
    Coverage { side: &'static str, index: usize },
    #[error("space has {size} points, exceeding the brute-force cap {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("sensor matching is not a bijection: {0}")]
    NotBijective(String),
    #[error("travel time map is not injective: sources {p} and {q} have identical rows")]
    NonInjective { p: usize, q: usize },
    #[error("invalid space specification: {0}")]
    Spec(String),
    #[error("point outside the domain: {0}")]
    Domain(String),
    #[error("sound speed profile error: {0}")]
    Profile(String),
    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },
    #[error("BLIE precondition failed for space {which} (margin {})", report.margin)]
    Precondition { which: usize, report: Box<CheckReport> },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
