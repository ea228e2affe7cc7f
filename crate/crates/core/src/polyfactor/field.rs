use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::PolyError;

/// Coefficient field of a polynomial ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    /// The prime field with `q` elements.
    Prime(u64),
    Rationals,
}

/// A field element. Which variant is valid depends on the [`Field`]; residues
/// are always kept reduced into `0..q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coeff {
    Mod(u64),
    Rat(BigRational),
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Residue of a (possibly negative) big integer modulo `q`.
pub(crate) fn bigint_mod(n: &BigInt, q: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(q));
    r.to_u64().expect("residue fits in u64")
}

impl Field {
    /// The prime field of order `q`; rejects composite `q`.
    pub fn prime(q: u64) -> Result<Field, PolyError> {
        if is_prime(q) {
            Ok(Field::Prime(q))
        } else {
            Err(PolyError::NotPrime(q))
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(q) => *q,
            Field::Rationals => 0,
        }
    }

    pub fn zero(&self) -> Coeff {
        match self {
            Field::Prime(_) => Coeff::Mod(0),
            Field::Rationals => Coeff::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Coeff {
        match self {
            Field::Prime(_) => Coeff::Mod(1),
            Field::Rationals => Coeff::Rat(BigRational::one()),
        }
    }

    pub fn from_int(&self, n: i64) -> Coeff {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Coeff {
        match self {
            Field::Prime(q) => Coeff::Mod(bigint_mod(n, *q)),
            Field::Rationals => Coeff::Rat(BigRational::from_integer(n.clone())),
        }
    }

    /// `numer / denom`; fails when the denominator vanishes in this field.
    pub fn from_ratio(&self, numer: &BigInt, denom: &BigInt) -> Result<Coeff, PolyError> {
        let d = self.from_bigint(denom);
        let inv = self.inv(&d).ok_or(PolyError::DivisionByZero)?;
        Ok(self.mul(&self.from_bigint(numer), &inv))
    }

    pub fn is_zero(&self, a: &Coeff) -> bool {
        match a {
            Coeff::Mod(x) => *x == 0,
            Coeff::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self, a: &Coeff) -> bool {
        match a {
            Coeff::Mod(x) => *x == 1,
            Coeff::Rat(r) => r.is_one(),
        }
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (Field::Prime(q), Coeff::Mod(x), Coeff::Mod(y)) => Coeff::Mod(((*x as u128 + *y as u128) % *q as u128) as u64),
            (Field::Rationals, Coeff::Rat(x), Coeff::Rat(y)) => Coeff::Rat(x + y),
            _ => panic!("coefficient does not belong to {self:?}"),
        }
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        match (self, a) {
            (Field::Prime(q), Coeff::Mod(x)) => Coeff::Mod(if *x == 0 { 0 } else { q - x }),
            (Field::Rationals, Coeff::Rat(x)) => Coeff::Rat(-x),
            _ => panic!("coefficient does not belong to {self:?}"),
        }
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (Field::Prime(q), Coeff::Mod(x), Coeff::Mod(y)) => Coeff::Mod(mul_mod(*x, *y, *q)),
            (Field::Rationals, Coeff::Rat(x), Coeff::Rat(y)) => Coeff::Rat(x * y),
            _ => panic!("coefficient does not belong to {self:?}"),
        }
    }

    pub fn inv(&self, a: &Coeff) -> Option<Coeff> {
        if self.is_zero(a) {
            return None;
        }
        Some(match (self, a) {
            (Field::Prime(q), Coeff::Mod(x)) => Coeff::Mod(pow_mod(*x, q - 2, *q)),
            (Field::Rationals, Coeff::Rat(x)) => Coeff::Rat(x.recip()),
            _ => panic!("coefficient does not belong to {self:?}"),
        })
    }

    pub fn div(&self, a: &Coeff, b: &Coeff) -> Option<Coeff> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    pub fn pow(&self, a: &Coeff, exp: u32) -> Coeff {
        (0..exp).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// All elements, for finite fields.
    pub fn elements(&self) -> Option<Vec<Coeff>> {
        match self {
            Field::Prime(q) => Some((0..*q).map(Coeff::Mod).collect()),
            Field::Rationals => None,
        }
    }

    /// Whether a coefficient is a valid element of this field.
    pub fn contains(&self, a: &Coeff) -> bool {
        match (self, a) {
            (Field::Prime(q), Coeff::Mod(x)) => x < q,
            (Field::Rationals, Coeff::Rat(_)) => true,
            _ => false,
        }
    }

    /// Parses a coefficient as written by [`Coeff`]'s `Display`.
    pub fn parse_coeff(&self, text: &str) -> Result<Coeff, PolyError> {
        let bad = || PolyError::Parse {
            position: 0,
            message: format!("invalid coefficient '{text}'"),
        };
        let (n, d) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        self.from_ratio(&n, &d)
    }

    pub fn name(&self) -> String {
        match self {
            Field::Prime(q) => format!("F{q}"),
            Field::Rationals => "Q".to_string(),
        }
    }
}

impl Coeff {
    /// The rational value, if this is a rational coefficient.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coeff::Rat(r) => Some(r),
            Coeff::Mod(_) => None,
        }
    }

    pub(crate) fn is_negative(&self) -> bool {
        matches!(self, Coeff::Rat(r) if r.is_negative())
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Mod(x) => write!(f, "{x}"),
            Coeff::Rat(r) => write!(f, "{r}"),
        }
    }
}
