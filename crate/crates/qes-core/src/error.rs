use num_complex::Complex64;
use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QesError {
    #[error("potential depth index N must be a positive integer")]
    InvalidBigN,
    #[error("coupling must be finite, got {0}")]
    NonFiniteCoupling(f64),
    #[error("sector split requires odd N, got N = {0}")]
    EvenNNoSplit(u32),
    #[error("expected a tridiagonal matrix, found nonzero entry at ({row}, {col})")]
    NotTridiagonal { row: usize, col: usize },
    #[error("operation needs degree >= {min}, got degree {got}")]
    DegreeTooLow { min: usize, got: usize },
    #[error("root iteration stalled after {iterations} sweeps, worst relative residual {residual:.3e}")]
    RootsNonConvergence {
        iterations: u32,
        residual: f64,
        best: Vec<Complex64>,
    },
    #[error("QR iteration failed to deflate index {index} of a {dim}x{dim} matrix")]
    EigenNonConvergence { index: usize, dim: usize },
    #[error("reality class does not change inside [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("{count} reality-class changes inside [{lo}, {hi}]; narrow the bracket")]
    AmbiguousBracket { lo: f64, hi: f64, count: usize },
    #[error("eigenvalue gap {gap:.3e} at xi = {xi} exceeds the coalescence certificate {threshold:.1e}")]
    CoalescenceNotCertified { xi: f64, gap: f64, threshold: f64 },
    #[error("{shift} is not within {tol:.1e} of any eigenvalue (closest at distance {closest:.3e})")]
    NotAnEigenvalue {
        shift: Complex64,
        closest: f64,
        tol: f64,
    },
    #[error("Fourier truncation must satisfy n_max >= 4, got {0}")]
    TruncationTooSmall(usize),
    #[error("transition estimates {first} and {second} from truncation doubling differ by more than {allowed:.1e}")]
    TruncationUnstable {
        first: f64,
        second: f64,
        allowed: f64,
    },
    #[error("periodicity ratio test inconclusive (max deviation from +/-1 was {0:.3e})")]
    InconclusivePeriodicity(f64),
    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, QesError>;
