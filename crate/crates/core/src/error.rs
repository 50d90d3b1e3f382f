use thiserror::Error;

/// Errors produced anywhere in the codec, container, or evaluation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Unrecognized magic, version, or type tag.
    #[error("format error: {0}")]
    Format(String),

    /// Byte stream is truncated or its declared lengths disagree.
    #[error("corrupt data: {0}")]
    Corrupt(String),

    /// A value violates a data-model invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A caller-supplied parameter is out of range or inconsistent.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Rate control could not reach the requested compression rate.
    #[error("rate error: {reason} (best achieved CR {best_cr:.4}, target {target_cr})")]
    Rate {
        reason: String,
        best_cr: f64,
        target_cr: f64,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        // `!(x > 0.0)` is deliberate: it also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err($crate::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
