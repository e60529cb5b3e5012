use thiserror::Error;

/// Which parameter sequence an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sequence {
    Q,
    E,
}

impl std::fmt::Display for Sequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sequence::Q => f.write_str("q"),
            Sequence::E => f.write_str("e"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// `index` is 1-based, as in the documentation of the matrix form.
    #[error("{sequence}_{index} = {value} is not strictly positive")]
    NonPositiveEntry {
        sequence: Sequence,
        index: usize,
        value: f64,
    },

    #[error("{sequence}_{index} is not finite")]
    NonFiniteEntry { sequence: Sequence, index: usize },

    #[error("numeric overflow in {stage} at order {order}")]
    Overflow { stage: &'static str, order: usize },

    #[error("factorial/binomial scaling overflows binary64 at order {order}")]
    FactorialOverflow { order: usize },

    #[error("path-sum enumeration needs {terms} terms, budget is {budget}")]
    ComplexityGuard { terms: u128, budget: u64 },

    #[error("invalid order {order}: {reason}")]
    InvalidOrder { order: usize, reason: &'static str },

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("lower bound decreased from order {order} to {next}: {previous} > {value}", next = order + 1)]
    MonotonicityViolation {
        order: usize,
        previous: f64,
        value: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_order(order: usize, min: usize) -> Result<()> {
    if order < min {
        return Err(Error::InvalidOrder {
            order,
            reason: if min == 1 {
                "order must be at least 1"
            } else {
                "order must be at least 2"
            },
        });
    }
    Ok(())
}
