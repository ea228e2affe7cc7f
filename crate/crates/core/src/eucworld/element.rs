use std::sync::OnceLock;

use crate::polyfactor::{Factorization, Poly};

/// An element `num / den` of the localized ring. `den` is a monic product of
/// norm-zero special primes, shares no factor with `num`, and carries no
/// scalar (scalars live in `num`).
#[derive(Clone, Debug)]
pub struct RElement {
    pub(crate) ring: u64,
    pub(crate) num: Poly,
    pub(crate) den: Poly,
    pub(crate) den_factors: Vec<(Poly, u32)>,
    pub(crate) factors: OnceLock<Factorization>,
}

impl RElement {
    pub(crate) fn new(ring: u64, num: Poly, den: Poly, den_factors: Vec<(Poly, u32)>) -> Self {
        RElement {
            ring,
            num,
            den,
            den_factors,
            factors: OnceLock::new(),
        }
    }

    pub(crate) fn with_factors(mut self, f: Factorization) -> Self {
        self.factors = OnceLock::from(f);
        self
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Irreducible factors of the denominator, with multiplicities.
    pub fn den_factors(&self) -> &[(Poly, u32)] {
        &self.den_factors
    }

    /// The factorization of the numerator, if it has been computed or was
    /// carried over from a product.
    pub fn cached_factorization(&self) -> Option<&Factorization> {
        self.factors.get()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True for nonzero scalars of the coefficient field.
    pub fn is_scalar(&self) -> bool {
        self.num.is_constant() && !self.num.is_zero() && self.den.is_one()
    }

    /// Whether `num` lies in the polynomial ring (no denominator).
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Identifier of the ring this element belongs to.
    pub fn ring_id(&self) -> u64 {
        self.ring
    }
}

impl PartialEq for RElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.num == other.num && self.den == other.den
    }
}

impl Eq for RElement {}
