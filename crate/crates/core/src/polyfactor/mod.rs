//! Sparse multivariate polynomials over a prime field or the rationals,
//! with exact division, unit normalization, irreducible factorization and gcd.

mod factor;
mod field;
mod parse;
mod poly;

pub use factor::{gcd_of_factorizations, small_integer, FactorBudget, Factorization, Factorizer};
pub use field::{Coeff, Field};
pub use parse::{parse_poly, VarToken};
pub use poly::{Monomial, Poly, VarId};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("operands live over different fields ({0:?} and {1:?})")]
    FieldMismatch(Field, Field),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("the zero polynomial has no factorization or normal form")]
    ZeroPolynomial,
    #[error("operation is undefined for units")]
    Unit,
    #[error("factorization incomplete: {0}")]
    FactorizationIncomplete(String),
    #[error("syntax error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}
