use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("k exceeds cloud size (k = {k}, N = {n})")]
    KExceedsSize { k: usize, n: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("duplicate point index {0}")]
    DuplicateIndex(usize),
    #[error("point index {index} out of range for cloud of size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("site weight must be non-positive, got {0}")]
    PositiveWeight(f64),
    #[error("instance too large for oracle ({subsets} subsets, limit {limit})")]
    OracleTooLarge { subsets: u128, limit: u128 },
    #[error("support size {size} exceeds the exact solver limit {limit}")]
    SizeGuard { size: usize, limit: usize },
    #[error("total masses differ: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },
    #[error("invalid mass {mass} at atom {index}")]
    InvalidMass { index: usize, mass: f64 },
    #[error("mass {mass} at atom {index} is not a multiple of 1/{denominator}")]
    NonRationalMass {
        index: usize,
        mass: f64,
        denominator: u64,
    },
    #[error("measure does not declare a mass denominator and none could be inferred")]
    MissingDenominator,
    #[error("mass parameter {m0} outside (0, {total}]")]
    MassParameter { m0: f64, total: f64 },
    #[error("point sets have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("degenerate support")]
    DegenerateSupport,
    #[error("degenerate bounding box")]
    DegenerateBox,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("transport problem is infeasible")]
    Infeasible,
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors produced by size or combinatorial guards.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::OracleTooLarge { .. } | Error::SizeGuard { .. } | Error::KExceedsSize { .. }
        )
    }
}
