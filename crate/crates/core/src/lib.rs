//! Transfinitely valued Euclidean domains.
//!
//! * [`ordinals`]: Cantor normal form arithmetic below ε₀ with the natural sum.
//! * [`polyfactor`]: sparse multivariate polynomials, factorization and gcd.
//! * [`eucworld`]: a Euclidean domain of order type `ω^α` built by adjoining
//!   quotient variables on demand, its ordinal norm, division with remainder
//!   and Euclid's algorithm with descent traces.
//! * [`motzkin`]: the minimal norm stratification of truncated classical rings.
//! * [`sampling`] and [`checks`]: seeded inputs and the property suites built on them.

pub mod checks;
pub mod eucworld;
pub mod motzkin;
pub mod ordinals;
pub mod polyfactor;
pub mod sampling;

pub use ordinals::Ordinal;
