//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a finite, strictly decreasing sum `ω^e₁·c₁ + … + ω^eₖ·cₖ`
//! whose exponents are themselves ordinals. Besides ordinary (left-to-right,
//! absorbing) addition we provide the Hessenberg natural sum, which adds
//! coefficients exponent by exponent and is commutative.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A single `ω^exponent · coefficient` summand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Term {
    exponent: Ordinal,
    coefficient: BigUint,
}

/// An ordinal below ε₀. The empty term list is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ordinal syntax error at byte {position}: {message}")]
pub struct OrdinalParseError {
    pub position: usize,
    pub message: String,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::from(1u64)
    }

    /// ω itself.
    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// The finite ordinal `n`.
    pub fn finite(n: impl Into<BigUint>) -> Self {
        let n = n.into();
        if n.is_zero() {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![Term {
                    exponent: Ordinal::zero(),
                    coefficient: n,
                }],
            }
        }
    }

    /// `ω^exponent`, a one-term normal form with coefficient 1.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Ordinal {
            terms: vec![Term {
                exponent,
                coefficient: BigUint::one(),
            }],
        }
    }

    /// `ω^exponent · coefficient`; zero when the coefficient is zero.
    pub fn monomial(exponent: Ordinal, coefficient: impl Into<BigUint>) -> Self {
        let coefficient = coefficient.into();
        if coefficient.is_zero() {
            return Ordinal::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent,
                coefficient,
            }],
        }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs in any order.
    /// Pairs are combined with the natural sum, so repeated exponents add up
    /// and zero coefficients vanish.
    pub fn from_terms<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Ordinal, BigUint)>,
    {
        pairs
            .into_iter()
            .fold(Ordinal::zero(), |acc, (e, c)| acc.nat_sum(&Ordinal::monomial(e, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_zero())
    }

    /// The value as a natural number, if finite.
    pub fn as_natural(&self) -> Option<BigUint> {
        match self.terms.as_slice() {
            [] => Some(BigUint::zero()),
            [t] if t.exponent.is_zero() => Some(t.coefficient.clone()),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        self.as_natural().and_then(|n| n.to_u64())
    }

    /// `(exponent, coefficient)` pairs, highest exponent first.
    pub fn terms(&self) -> impl Iterator<Item = (&Ordinal, &BigUint)> {
        self.terms.iter().map(|t| (&t.exponent, &t.coefficient))
    }

    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exponent)
    }

    /// Nesting depth of exponents; zero and finite ordinals have depth 0 and 1.
    pub fn depth(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.exponent.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    /// A successor ordinal is one whose last term has exponent 0.
    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent.is_zero())
    }

    /// Additively indecomposable: exactly one term, with coefficient 1.
    pub fn is_indecomposable(&self) -> bool {
        matches!(self.terms.as_slice(), [t] if t.coefficient.is_one())
    }

    /// Ordinary ordinal addition `self + rhs`. Terms of `self` below the
    /// leading exponent of `rhs` are absorbed.
    pub fn ord_add(&self, rhs: &Ordinal) -> Ordinal {
        let Some(lead) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent >= lead.exponent)
            .cloned()
            .collect();
        let mut rest = rhs.terms.iter();
        if let Some(last) = terms.last_mut() {
            if last.exponent == lead.exponent {
                last.coefficient += &lead.coefficient;
                rest.next();
            }
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    /// The Hessenberg natural sum `self ⊕ rhs`.
    pub fn nat_sum(&self, rhs: &Ordinal) -> Ordinal {
        let mut terms = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut a, mut b) = (self.terms.iter().peekable(), rhs.terms.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => match x.exponent.cmp(&y.exponent) {
                    Ordering::Greater => terms.push(a.next().unwrap().clone()),
                    Ordering::Less => terms.push(b.next().unwrap().clone()),
                    Ordering::Equal => {
                        terms.push(Term {
                            exponent: x.exponent.clone(),
                            coefficient: &x.coefficient + &y.coefficient,
                        });
                        a.next();
                        b.next();
                    }
                },
                (Some(_), None) => terms.push(a.next().unwrap().clone()),
                (None, Some(_)) => terms.push(b.next().unwrap().clone()),
                (None, None) => break,
            }
        }
        Ordinal { terms }
    }

    /// `self ⊕ self ⊕ … ⊕ self` (`n` copies); equals `self·n` on coefficients.
    pub fn nat_scale(&self, n: u64) -> Ordinal {
        if n == 0 {
            return Ordinal::zero();
        }
        Ordinal {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exponent: t.exponent.clone(),
                    coefficient: &t.coefficient * n,
                })
                .collect(),
        }
    }

    /// Parses the textual form, e.g. `w^(w^2)*2 + w*3 + 7`.
    pub fn parse(text: &str) -> Result<Ordinal, OrdinalParseError> {
        let mut parser = ExprParser::new(text, false);
        let value = parser.expr()?;
        parser.finish()?;
        Ok(value)
    }

    /// Evaluates an expression that may also use `(+)` for the natural sum.
    /// Operators associate to the left.
    pub fn eval(text: &str) -> Result<Ordinal, OrdinalParseError> {
        let mut parser = ExprParser::new(text, true);
        let value = parser.expr()?;
        parser.finish()?;
        Ok(value)
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exponent
            .cmp(&other.exponent)
            .then_with(|| self.coefficient.cmp(&other.coefficient))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        // lexicographic on decreasing terms; a proper prefix is smaller
        self.terms.cmp(&other.terms)
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(BigUint::from(n))
    }
}

impl From<BigUint> for Ordinal {
    fn from(n: BigUint) -> Self {
        Ordinal::finite(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            match t.exponent.as_natural() {
                Some(e) if e.is_one() => f.write_str("w")?,
                Some(e) => write!(f, "w^{e}")?,
                None => write!(f, "w^({})", t.exponent)?,
            }
            if !t.coefficient.is_one() {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Ordinal::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Ordinal {
    type Err = OrdinalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ordinal::parse(s)
    }
}

/// Recursive-descent parser shared by [`Ordinal::parse`] and [`Ordinal::eval`].
///
/// ```text
/// expr    := summand (("+" | "(+)") summand)*
/// summand := nat | "w" ["^" (nat | "(" expr ")")] ["*" nat] | "(" expr ")"
/// ```
struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    natural_sum: bool,
}

enum Op {
    Add,
    NatSum,
}

impl<'a> ExprParser<'a> {
    fn new(text: &'a str, natural_sum: bool) -> Self {
        ExprParser {
            src: text.as_bytes(),
            pos: 0,
            natural_sum,
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, OrdinalParseError> {
        Err(OrdinalParseError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), OrdinalParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(format!("expected '{}'", c as char))
        }
    }

    fn finish(&mut self) -> Result<(), OrdinalParseError> {
        if self.peek().is_some() {
            self.error("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn natural_sum_ahead(&mut self) -> bool {
        self.skip_ws();
        let mut i = self.pos;
        let next = |i: &mut usize| {
            while *i < self.src.len() && self.src[*i].is_ascii_whitespace() {
                *i += 1;
            }
            let c = self.src.get(*i).copied();
            *i += 1;
            c
        };
        next(&mut i) == Some(b'(') && next(&mut i) == Some(b'+') && next(&mut i) == Some(b')')
    }

    fn operator(&mut self) -> Result<Option<Op>, OrdinalParseError> {
        if self.natural_sum_ahead() {
            if !self.natural_sum {
                return self.error("'(+)' is only allowed in expressions");
            }
            self.expect(b'(')?;
            self.expect(b'+')?;
            self.expect(b')')?;
            return Ok(Some(Op::NatSum));
        }
        if self.eat(b'+') {
            return Ok(Some(Op::Add));
        }
        Ok(None)
    }

    fn expr(&mut self) -> Result<Ordinal, OrdinalParseError> {
        let mut acc = self.summand()?;
        while let Some(op) = self.operator()? {
            let rhs = self.summand()?;
            acc = match op {
                Op::Add => acc.ord_add(&rhs),
                Op::NatSum => acc.nat_sum(&rhs),
            };
        }
        Ok(acc)
    }

    fn natural(&mut self) -> Result<BigUint, OrdinalParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a natural number");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse::<BigUint>().expect("decimal digits"))
    }

    fn summand(&mut self) -> Result<Ordinal, OrdinalParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::finite(self.natural()?)),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'w') => {
                self.pos += 1;
                let exponent = if self.eat(b'^') {
                    if self.eat(b'(') {
                        let e = self.expr()?;
                        self.expect(b')')?;
                        e
                    } else {
                        Ordinal::finite(self.natural()?)
                    }
                } else {
                    Ordinal::one()
                };
                let coefficient = if self.eat(b'*') {
                    self.natural()?
                } else {
                    BigUint::one()
                };
                Ok(Ordinal::monomial(exponent, coefficient))
            }
            Some(_) => self.error("expected a natural number, 'w' or '('"),
            None => self.error("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        Ordinal::parse(s).unwrap()
    }

    #[test]
    fn comparisons() {
        assert_eq!(Ordinal::zero().cmp(&Ordinal::zero()), Ordering::Equal);
        assert_eq!(Ordinal::omega().cmp(&Ordinal::from(5)), Ordering::Greater);
        assert_eq!(o("w^2*2 + 3").cmp(&o("w^2*2 + w")), Ordering::Less);
        assert!(o("w^(w)") > o("w^100*7 + 3"));
    }

    #[test]
    fn ordinary_addition() {
        let g = o("w^3 + w*2");
        assert_eq!(g.ord_add(&Ordinal::zero()), g);
        assert_eq!(Ordinal::one().ord_add(&Ordinal::omega()), Ordinal::omega());
        assert_eq!(o("w*2 + 1").ord_add(&o("w + 1")), o("w*3 + 1"));
        assert_eq!(o("w^2 + 5").ord_add(&o("w^(w)")), o("w^(w)"));
    }

    #[test]
    fn natural_sum_examples() {
        assert_eq!(Ordinal::from(3).nat_sum(&Ordinal::from(4)), Ordinal::from(7));
        assert_eq!(Ordinal::omega().nat_sum(&Ordinal::omega()), o("w*2"));
        assert_eq!(o("w^2 + w*3").nat_sum(&o("w*2 + 5")), o("w^2 + w*5 + 5"));
    }

    #[test]
    fn omega_powers() {
        assert_eq!(Ordinal::omega_pow(Ordinal::zero()), Ordinal::one());
        assert_eq!(Ordinal::omega_pow(Ordinal::one()), Ordinal::omega());
        assert_eq!(Ordinal::omega_pow(Ordinal::omega()), o("w^(w)"));
    }

    #[test]
    fn indecomposables() {
        assert!(!Ordinal::zero().is_indecomposable());
        assert!(o("w^2").is_indecomposable());
        assert!(!o("w*2").is_indecomposable());
        assert!(Ordinal::one().is_indecomposable());
        assert!(!Ordinal::from(2).is_indecomposable());
    }

    #[test]
    fn text_format() {
        assert_eq!(o("w^2*3 + w + 5").to_string(), "w^2*3 + w + 5");
        assert_eq!(Ordinal::zero().to_string(), "0");
        assert_eq!(o("w^(w)"), Ordinal::omega_pow(Ordinal::omega()));
        assert_eq!(o("w^(w)").to_string(), "w^(w)");
        assert_eq!(o("w^(w^2)*2 + w*3 + 7").to_string(), "w^(w^2)*2 + w*3 + 7");
        assert_eq!(o("  w ^ ( 1 ) * 1+0 "), Ordinal::omega());
    }

    #[test]
    fn non_canonical_input_is_normalized() {
        assert_eq!(o("1 + w"), Ordinal::omega());
        assert_eq!(o("w + w^2 + 3"), o("w^2 + 3"));
        assert_eq!(o("w + w"), o("w*2"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = Ordinal::parse("w^2 + ").unwrap_err();
        assert_eq!(err.position, 6);
        let err = Ordinal::parse("w*x").unwrap_err();
        assert_eq!(err.position, 2);
        assert!(Ordinal::parse("w (+) w").is_err());
        assert!(Ordinal::parse("").is_err());
        assert!(Ordinal::parse("(w").is_err());
    }

    #[test]
    fn eval_mixes_operators() {
        assert_eq!(Ordinal::eval("w (+) w").unwrap().to_string(), "w*2");
        assert_eq!(Ordinal::eval("1 (+) w").unwrap(), o("w + 1"));
        assert_eq!(Ordinal::eval("1 + w").unwrap(), o("w"));
        assert_eq!(Ordinal::eval("(1 + w) (+) 3").unwrap(), o("w + 3"));
    }

    #[test]
    fn finite_helpers() {
        assert_eq!(o("17").as_u64(), Some(17));
        assert_eq!(o("w").as_u64(), None);
        assert!(o("w + 1").is_successor());
        assert!(!o("w*2").is_successor());
        assert_eq!(o("w^(w^(w))").depth(), 4);
        assert_eq!(o("w*2 + 1").nat_scale(3), o("w*6 + 3"));
    }

    #[test]
    fn serde_uses_text() {
        let v = o("w^2*3 + 1");
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "\"w^2*3 + 1\"");
        let back: Ordinal = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
