//! Exact sparse multivariate polynomials over `Z` and its localizations.

mod json;
mod poly;
mod ring;
mod symbol;

pub use poly::Polynomial;
pub use ring::CoeffRing;
pub use symbol::{Monomial, VarSymbol};

pub(crate) use poly::pow_rational;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("incompatible coefficient rings {left} and {right}")]
    IncompatibleRings { left: CoeffRing, right: CoeffRing },
    #[error("variable {0} is not bound")]
    UnboundVariable(VarSymbol),
    #[error("no weight given for variable {0}")]
    MissingWeight(VarSymbol),
    #[error("coefficient {coeff} does not lie in {ring}")]
    NotInRing { coeff: String, ring: CoeffRing },
    #[error("malformed variable symbol {0:?}")]
    BadSymbol(String),
    #[error("invalid coefficient ring: {0}")]
    InvalidRing(String),
}
