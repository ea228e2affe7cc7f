use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::field::{Coeff, Field};
use super::PolyError;

/// Dense variable handle. Lower ids take precedence in the monomial order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A power product, stored as `(variable, exponent)` pairs sorted by variable
/// with all exponents positive. Ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Builds a monomial from arbitrary pairs; zero exponents are dropped and
    /// repeated variables multiplied together.
    pub fn from_pairs<I: IntoIterator<Item = (VarId, u32)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *acc.entry(v).or_default() += e;
            }
        }
        Monomial(acc.into_iter().collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => continue,
                    Ordering::Greater => out.push((v, e - f)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        other.div(self).is_some()
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(v, e)| {
                    let f = other.exponent(v);
                    (f > 0).then(|| (v, e.min(f)))
                })
                .collect(),
        )
    }

    pub fn without(&self, v: VarId) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect())
    }

    pub fn with_power(&self, v: VarId, e: u32) -> Monomial {
        self.without(v).mul(&Monomial::from_pairs([(v, e)]))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (a, b) = (&self.0, &other.0);
            let (mut i, mut j) = (0, 0);
            loop {
                match (a.get(i), b.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                        // `self` has a positive exponent on a higher-precedence variable
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => {
                            if ea != eb {
                                return ea.cmp(&eb);
                            }
                            i += 1;
                            j += 1;
                        }
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with coefficients in a [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    field: Field,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero(field: Field) -> Self {
        Poly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: Field) -> Self {
        Poly::constant(field, field.one())
    }

    pub fn constant(field: Field, c: Coeff) -> Self {
        Poly::term(field, Monomial::one(), c)
    }

    pub fn from_int(field: Field, n: i64) -> Self {
        Poly::constant(field, field.from_int(n))
    }

    pub fn var(field: Field, v: VarId) -> Self {
        Poly::term(field, Monomial::var(v), field.one())
    }

    pub fn term(field: Field, m: Monomial, c: Coeff) -> Self {
        assert!(field.contains(&c), "coefficient {c} is not in {field:?}");
        let mut terms = BTreeMap::new();
        if !field.is_zero(&c) {
            terms.insert(m, c);
        }
        Poly { field, terms }
    }

    /// Sums the given terms, dropping anything that cancels.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(field: Field, terms: I) -> Self {
        let mut p = Poly::zero(field);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| self.field.is_one(&c))
    }

    /// The value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<Coeff> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Coeff {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Option<&Coeff> {
        self.leading_term().map(|(_, c)| c)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.leading_term().map(|(m, _)| m.degree())
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if self.field.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = self.field.add(existing, &c);
                if self.field.is_zero(&sum) {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_field(&self, other: &Poly) -> Result<(), PolyError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(PolyError::FieldMismatch(self.field, other.field))
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_field(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_field(other)?;
        let mut out = Poly::zero(self.field);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), self.field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    fn neg_ref(&self) -> Poly {
        Poly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), self.field.neg(c)))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if self.field.is_zero(c) {
            return Poly::zero(self.field);
        }
        Poly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(m, d)| (m.clone(), self.field.mul(c, d)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            field: self.field,
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut acc = Poly::one(self.field);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder. Long division by leading terms in the graded-lex order.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Option<Poly>, PolyError> {
        self.check_field(divisor)?;
        let Some((lm, lc)) = divisor.leading_term() else {
            return Err(PolyError::DivisionByZero);
        };
        let lc_inv = self.field.inv(lc).expect("nonzero leading coefficient");
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.field);
        while let Some((rm, rc)) = rem.leading_term() {
            let Some(qm) = rm.div(lm) else {
                return Ok(None);
            };
            let qc = self.field.mul(rc, &lc_inv);
            let neg_qc = self.field.neg(&qc);
            for (dm, dc) in &divisor.terms {
                rem.add_term(dm.mul(&qm), self.field.mul(&neg_qc, dc));
            }
            quot.add_term(qm, qc);
        }
        Ok(Some(quot))
    }

    pub fn divides(&self, other: &Poly) -> Result<bool, PolyError> {
        Ok(other.exact_div(self)?.is_some())
    }

    /// Splits off the leading coefficient: returns `(u, m)` with `self = u·m`
    /// and `m` monic in the graded-lex order.
    pub fn normalize_unit(&self) -> Result<(Coeff, Poly), PolyError> {
        let lc = self.leading_coeff().ok_or(PolyError::ZeroPolynomial)?.clone();
        let inv = self.field.inv(&lc).expect("nonzero");
        Ok((lc, self.scale(&inv)))
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_some_and(|c| self.field.is_one(c))
    }

    /// The homogeneous part of total degree `deg`.
    pub fn homogeneous_part(&self, deg: u32) -> Poly {
        Poly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == deg)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn top_part(&self) -> Poly {
        match self.degree() {
            Some(d) => self.homogeneous_part(d),
            None => self.clone(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        match degrees.next() {
            Some(d) => degrees.all(|e| e == d),
            None => true,
        }
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd(m)),
            None => Monomial::one(),
        }
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (n, c) in &self.terms {
            terms.insert(n.div(m)?, c.clone());
        }
        Some(Poly {
            field: self.field,
            terms,
        })
    }

    /// Coefficients with respect to one variable: `self = Σ coeffs[k]·v^k`.
    pub fn coefficients_in(&self, v: VarId) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exponent(v))
                .or_insert_with(|| Poly::zero(self.field))
                .add_term(m.without(v), c.clone());
        }
        out
    }

    /// Substitutes `v = 1`.
    pub fn dehomogenize(&self, v: VarId) -> Poly {
        Poly::from_terms(
            self.field,
            self.terms.iter().map(|(m, c)| (m.without(v), c.clone())),
        )
    }

    /// Multiplies each term by the power of `v` that brings it to degree `deg`.
    pub fn homogenize(&self, v: VarId, deg: u32) -> Poly {
        Poly::from_terms(
            self.field,
            self.terms.iter().map(|(m, c)| {
                let k = deg.saturating_sub(m.degree());
                (m.mul(&Monomial::from_pairs([(v, k)])), c.clone())
            }),
        )
    }

    /// Replaces variables according to `map`; unmapped variables are kept.
    pub fn rename(&self, map: &BTreeMap<VarId, VarId>) -> Poly {
        Poly::from_terms(
            self.field,
            self.terms.iter().map(|(m, c)| {
                let pairs = m.pairs().iter().map(|&(v, e)| (*map.get(&v).unwrap_or(&v), e));
                (Monomial::from_pairs(pairs), c.clone())
            }),
        )
    }

    /// Renders the polynomial with caller-supplied variable names, highest
    /// terms first.
    pub fn display_with<F: Fn(VarId) -> String>(&self, name: F) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let magnitude = if negative { self.field.neg(c) } else { c.clone() };
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let factors: Vec<String> = m
                .pairs()
                .iter()
                .map(|&(v, e)| {
                    if e == 1 {
                        name(v)
                    } else {
                        format!("{}^{}", name(v), e)
                    }
                })
                .collect();
            let unit = self.field.is_one(&magnitude);
            match (factors.is_empty(), unit) {
                (true, _) => out.push_str(&magnitude.to_string()),
                (false, true) => out.push_str(&factors.join("*")),
                (false, false) => {
                    out.push_str(&magnitude.to_string());
                    out.push('*');
                    out.push_str(&factors.join("*"));
                }
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(|v| v.to_string()))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("operands over different fields")
            }
        }
        impl $trait<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    monomial: Vec<(u32, u32)>,
    coeff: String,
}

impl Poly {
    /// Canonical JSON: a list of `{monomial: [[varid, exp], ...], coeff}`
    /// objects in decreasing monomial order.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<JsonTerm> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| JsonTerm {
                monomial: m.pairs().iter().map(|&(v, e)| (v.0, e)).collect(),
                coeff: c.to_string(),
            })
            .collect();
        serde_json::to_value(terms).expect("serializable")
    }

    pub fn from_json(field: Field, value: &serde_json::Value) -> Result<Poly, PolyError> {
        let terms: Vec<JsonTerm> =
            serde_json::from_value(value.clone()).map_err(|e| PolyError::Parse {
                position: 0,
                message: e.to_string(),
            })?;
        let mut out = Poly::zero(field);
        for t in terms {
            let m = Monomial::from_pairs(t.monomial.into_iter().map(|(v, e)| (VarId(v), e)));
            out.add_term(m, field.parse_coeff(&t.coeff)?);
        }
        Ok(out)
    }
}
