use thiserror::Error;

use crate::lattice::BlowupLattice;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("lattice mismatch: {left} vs {right}")]
    LatticeMismatch {
        left: BlowupLattice,
        right: BlowupLattice,
    },
    #[error("class has {got} coefficients but {lattice} has rank {expected}")]
    RankMismatch {
        lattice: BlowupLattice,
        expected: usize,
        got: usize,
    },
    #[error("primitivity is undefined for the zero class")]
    ZeroClass,
    #[error("unbounded enumeration: {0}")]
    UnboundedQuery(String),
    #[error("enumeration box too large: {0}")]
    SearchTooLarge(String),
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("sublattice is not contained in the ambient lattice: {0}")]
    NotContained(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}
