use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument or input object broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Gram-Schmidt hit a vector that is (numerically) in the span of its predecessors.
    #[error("linearly dependent input at vector {index} (residual norm {residual:e})")]
    Dependent { index: usize, residual: f64 },

    /// The two states handed to an experiment are too close to normalise by their distance.
    #[error("degenerate state pair: frobenius distance {0:e} is below 1e-12")]
    DegeneratePair(f64),

    /// A supposedly complete measurement leaked probability mass.
    #[error("outcome probabilities sum to {0}, not 1")]
    Normalisation(f64),

    #[error("invalid group descriptor {0:?}")]
    GroupDescriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        // Bound first so NaN inputs fail the check.
        let ok: bool = $cond;
        if !ok {
            return Err($crate::error::Error::Contract(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
