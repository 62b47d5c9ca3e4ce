use core::fmt;

use crate::C64;

/// Result alias for all fallible operations in this crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors shared across the crate.
///
/// The split matters downstream: `SizeMismatch`, `GridTooCoarse`,
/// `OutOfRange`, `NotEven` and `InvalidInput` indicate a bad request,
/// everything else indicates that a numerical procedure failed on
/// legitimate input.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Dimensions of two operands disagree (block sizes or matrix shapes).
    SizeMismatch { expected: usize, got: usize },
    /// A sampling grid is too small for the requested band or symbol.
    GridTooCoarse { required: usize, got: usize },
    /// The symbol value at angle `theta` is singular (or numerically so).
    SingularSymbol { theta: f64 },
    /// Fourier tail of a computed series is above the requested tolerance;
    /// the grid must be refined.
    AliasWarning { tail_estimate: f64, tail_tol: f64 },
    /// `det` of the symbol winds around the origin, so logs, canonical
    /// factorizations and the geometric-mean constant do not exist.
    NonzeroWinding { winding: i64 },
    /// Exact zero pivot during LU elimination.
    SingularMatrix,
    /// Pivot ratio estimate fell below the trust threshold.
    IllConditioned { rcond: f64 },
    /// A reconstruction residual exceeded its tolerance.
    ResidualTooLarge { residual: f64, tolerance: f64 },
    /// A doubling sequence hit its cap before meeting the tolerance.
    NoConvergence { last_delta: f64, truncation: usize },
    /// A spectral point left the analyticity region of the requested function.
    RegionViolation { spectral_point: C64 },
    /// An index is outside its valid range.
    OutOfRange { index: usize, bound: usize },
    /// The operation requires an even symbol.
    NotEven,
    /// Catch-all for violated call contracts (non-finite data, bad flags, ...).
    InvalidInput(&'static str),
}

impl Error {
    /// True when the error describes a malformed request rather than a
    /// numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::SizeMismatch { .. }
                | Error::GridTooCoarse { .. }
                | Error::OutOfRange { .. }
                | Error::NotEven
                | Error::InvalidInput(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SizeMismatch { expected, got } => {
                write!(f, "size mismatch: expected {expected}, got {got}")
            }
            Error::GridTooCoarse { required, got } => {
                write!(f, "grid too coarse: need at least {required} points, got {got}")
            }
            Error::SingularSymbol { theta } => {
                write!(f, "symbol is singular at theta = {theta:.6}")
            }
            Error::AliasWarning { tail_estimate, tail_tol } => write!(
                f,
                "fourier tail {tail_estimate:.3e} above tolerance {tail_tol:.3e}; refine the grid"
            ),
            Error::NonzeroWinding { winding } => {
                write!(f, "det of symbol has winding number {winding}")
            }
            Error::SingularMatrix => write!(f, "matrix is singular"),
            Error::IllConditioned { rcond } => {
                write!(f, "matrix is ill conditioned (rcond estimate {rcond:.3e})")
            }
            Error::ResidualTooLarge { residual, tolerance } => {
                write!(f, "residual {residual:.3e} exceeds tolerance {tolerance:.3e}")
            }
            Error::NoConvergence { last_delta, truncation } => write!(
                f,
                "no convergence: last delta {last_delta:.3e} at truncation {truncation}"
            ),
            Error::RegionViolation { spectral_point } => write!(
                f,
                "spectral point {:.6}{:+.6}i outside analyticity region",
                spectral_point.re, spectral_point.im
            ),
            Error::OutOfRange { index, bound } => {
                write!(f, "index {index} out of range (bound {bound})")
            }
            Error::NotEven => write!(f, "symbol is not even"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}
