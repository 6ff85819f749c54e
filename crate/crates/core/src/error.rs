use thiserror::Error;

use crate::poly::Generator;
use crate::subset::Subset;

#[derive(Debug, Error)]
pub enum Error {
    /// The instance is larger than the configured ceiling; not a wrong answer.
    #[error("instance too large: {count} monomials in degree {degree} exceeds the ceiling of {ceiling}")]
    SizeCeiling {
        degree: usize,
        count: u128,
        ceiling: usize,
    },

    #[error("polynomial is not homogeneous of degree {expected}")]
    NotHomogeneous { expected: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("generator {0} does not belong to the presentation")]
    UnknownGenerator(Generator),

    #[error("degree {degree} has dimension {dim}; socle evaluation needs dimension 1")]
    SocleDimension { degree: usize, dim: usize },

    #[error("subsets {0} and {1} overlap without being nested")]
    NotLaminar(Subset, Subset),

    #[error("monomial is not standard: {0}")]
    NotStandard(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
