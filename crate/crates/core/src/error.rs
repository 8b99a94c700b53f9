use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the crate.
///
/// `Malformed` covers structural input problems (JSON syntax, dimension
/// mismatches, out-of-range indices). The two `Impossible*` variants are
/// semantic: the inputs parse fine but describe an event of probability zero.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid model: {0}")]
    InvalidModel(ValidationReport),

    #[error("impossible observation sequence: zero probability at step {t}")]
    ImpossibleObservation { t: usize },

    #[error("impossible constraint: the fixed states have zero posterior probability")]
    ImpossibleConstraint,

    #[error("refusing to enumerate {base}^{exponent} assignments (cap {cap})")]
    CapExceeded {
        base: usize,
        exponent: usize,
        cap: u64,
    },

    #[error("cannot lift weight {value} into the entropy semiring: must be finite and nonnegative")]
    InvalidWeight { value: f64 },
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }
}
