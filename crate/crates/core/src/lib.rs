//! Exact symbolic engine for generalized double point relations, the
//! universal formal group law over the Lazard ring, and the fixed-point
//! evaluation homomorphism of equivariant algebraic cobordism.

pub mod algebra;
pub mod fgl;
pub mod fixedpoint;
pub mod gdpr;
pub mod opalg;
pub mod series;

pub use algebra::{AlgebraError, CoeffRing, Monomial, Polynomial, VarSymbol};
pub use series::{SeriesError, SeriesExp, SeriesVar, TruncatedSeries};
