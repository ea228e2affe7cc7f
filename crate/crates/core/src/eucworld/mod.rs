//! The transfinitely valued Euclidean domain `R = U⁻¹R_∞` and its z-variant.
//!
//! Variables are materialized lazily: generators `x[β,i]` the first time they
//! are named, special variables `y` the first time a division needs the
//! quotient for a pair `(n, d)`. Every materialized variable is a genuine
//! variable of `R_∞`, so norms computed here are exact.

mod element;
mod json;

pub use element::RElement;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinals::Ordinal;
use crate::polyfactor::{
    parse_poly, Coeff, FactorBudget, Factorization, Factorizer, Field, Poly, PolyError, VarId,
    VarToken,
};

static NEXT_RING_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("invalid ring configuration: {0}")]
    InvalidConfig(String),
    #[error("generator subscript {beta} is outside 0 < beta < {bound}")]
    OutOfRange { beta: Ordinal, bound: Ordinal },
    #[error("operation requires the z-variant ring")]
    NotVariant,
    #[error("Sub is undefined on scalars")]
    ScalarSub,
    #[error("the norm of 0 is undefined")]
    ZeroElement,
    #[error("division by zero")]
    ZeroDivisor,
    #[error("gcd of two zero elements")]
    BothZero,
    #[error("element belongs to a different ring")]
    ForeignElement,
    #[error("pair is not eligible for a special quotient: {0}")]
    NotEligible(String),
    #[error("special quotients are only defined for polynomials without denominator")]
    NotPolynomial,
    #[error("denominator {0} is not a unit of the ring")]
    NotAUnit(String),
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("unknown variable: {0}")]
    UnknownVariable(String),
    #[error("k must be at least 1")]
    NonPositive,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Base,
    /// Extra variable `z` with `φ(zᵏ) = kᵏ`.
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingConfig {
    pub field: Field,
    /// The ring has Euclidean order type `ω^alpha`.
    pub alpha: Ordinal,
    pub variant: Variant,
    pub budget: FactorBudget,
    /// Allows the z-variant over a finite field, where minimality of the
    /// norm is not established.
    pub unverified_minimality: bool,
}

impl RingConfig {
    pub fn base(field: Field, alpha: Ordinal) -> Self {
        RingConfig {
            field,
            alpha,
            variant: Variant::Base,
            budget: FactorBudget::default(),
            unverified_minimality: false,
        }
    }

    /// The z-variant over the rationals with `alpha = 1`.
    pub fn z_variant() -> Self {
        RingConfig {
            field: Field::Rationals,
            alpha: Ordinal::one(),
            variant: Variant::Z,
            budget: FactorBudget::default(),
            unverified_minimality: false,
        }
    }

    pub fn validate(&self) -> Result<(), RingError> {
        if let Field::Prime(q) = self.field {
            Field::prime(q)?;
        }
        if self.alpha.is_zero() {
            return Err(RingError::InvalidConfig("alpha must be at least 1".into()));
        }
        if self.variant == Variant::Z {
            if self.alpha != Ordinal::one() {
                return Err(RingError::InvalidConfig(
                    "the z-variant requires alpha = 1".into(),
                ));
            }
            if self.field.is_finite() && !self.unverified_minimality {
                return Err(RingError::InvalidConfig(
                    "the z-variant over a finite field needs the unverified-minimality flag".into(),
                ));
            }
        }
        Ok(())
    }

    /// Whether norms computed in this ring are known to be the minimal
    /// Euclidean norm.
    pub fn minimality_verified(&self) -> bool {
        !(self.variant == Variant::Z && self.field.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Generator,
    Special,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub id: VarId,
    pub kind: VarKind,
    pub subs: BTreeSet<Ordinal>,
    pub stage: u32,
    /// `(n, d)` for special variables, `d` monic.
    pub defining_pair: Option<(Poly, Poly)>,
}

/// A registered special prime `n − y·d`, stored monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialInfo {
    pub var: VarId,
    pub n: Poly,
    pub d: Poly,
    pub prime: Poly,
    pub norm: Ordinal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisionPath {
    /// `d | n`; the remainder is 0.
    Exact,
    /// `φ(n) < φ(d)`; the quotient is 0.
    SmallNorm,
    /// Quotient through a special variable.
    General,
}

/// The data of a general-path division: `n = g·n'`, `d = g·d'` up to units,
/// quotient variable `y` for `(n', d')` and special prime `s ~ n' − y·d'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralStep {
    pub reduced_num: Poly,
    pub reduced_den: Poly,
    pub common: Poly,
    pub special_prime: Poly,
    pub special_norm: Ordinal,
    pub common_norm: Ordinal,
    /// The pair has `φ(n') < φ(d')` and is admitted because `z | n'`.
    pub extended: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionResult {
    pub numerator: RElement,
    pub divisor: RElement,
    pub quotient: RElement,
    pub remainder: RElement,
    pub divisor_norm: Ordinal,
    pub remainder_norm: Option<Ordinal>,
    pub adjoined_var: Option<VarId>,
    pub path: DivisionPath,
    pub general: Option<GeneralStep>,
}

impl DivisionResult {
    /// `remainder = 0` or `φ(remainder) < φ(divisor)`.
    pub fn descends(&self) -> bool {
        match &self.remainder_norm {
            None => self.remainder.is_zero(),
            Some(r) => *r < self.divisor_norm,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentTrace {
    pub steps: Vec<DivisionResult>,
    pub final_gcd: RElement,
}

impl DescentTrace {
    /// Norms of the successive divisors.
    pub fn norms(&self) -> Vec<Ordinal> {
        self.steps.iter().map(|s| s.divisor_norm.clone()).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        let norms = self.norms();
        norms.windows(2).all(|w| w[1] < w[0]) && self.steps.iter().all(DivisionResult::descends)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ZWeight {
    /// `zᵏ ↦ kᵏ`
    Phi,
    /// `zᵏ ↦ ω·k`
    Psi,
}

type FactorMap = BTreeMap<Poly, u32>;

fn to_map<'a, I: IntoIterator<Item = &'a (Poly, u32)>>(factors: I) -> FactorMap {
    let mut out = FactorMap::new();
    for (p, m) in factors {
        *out.entry(p.clone()).or_default() += m;
    }
    out
}

fn contains(big: &FactorMap, small: &FactorMap) -> bool {
    small
        .iter()
        .all(|(p, m)| big.get(p).copied().unwrap_or(0) >= *m)
}

fn intersect(a: &FactorMap, b: &FactorMap) -> FactorMap {
    a.iter()
        .filter_map(|(p, m)| {
            let k = (*m).min(b.get(p).copied().unwrap_or(0));
            (k > 0).then(|| (p.clone(), k))
        })
        .collect()
}

fn difference(a: &FactorMap, b: &FactorMap) -> FactorMap {
    a.iter()
        .filter_map(|(p, m)| {
            let k = m - (*m).min(b.get(p).copied().unwrap_or(0));
            (k > 0).then(|| (p.clone(), k))
        })
        .collect()
}

fn product(field: Field, factors: &FactorMap) -> Poly {
    factors
        .iter()
        .fold(Poly::one(field), |acc, (p, m)| &acc * &p.pow(*m))
}

/// Returns `(kᵏ⁺¹, (k+1)ᵏ⁺¹)`: a multiplicative norm with `ψ(z) = k` would
/// give `ψ(zᵏ⁺¹) = kᵏ⁺¹`, below `φ(zᵏ⁺¹)`.
pub fn nonmult_witness(k: u64) -> Result<(BigUint, BigUint), RingError> {
    if k == 0 {
        return Err(RingError::NonPositive);
    }
    let e = u32::try_from(k + 1).map_err(|_| RingError::NonPositive)?;
    Ok((BigUint::from(k).pow(e), BigUint::from(k + 1).pow(e)))
}

/// `kᵏ` as an ordinal.
pub fn self_power(k: u32) -> Ordinal {
    Ordinal::finite(BigUint::from(k).pow(k))
}

/// A ring instance: variable registry, quotient memo and special primes.
pub struct Ring {
    id: u64,
    config: RingConfig,
    vars: Vec<VarInfo>,
    generators: BTreeMap<(Ordinal, u32), VarId>,
    z: Option<VarId>,
    quotients: BTreeMap<(Poly, Poly), VarId>,
    specials: BTreeMap<Poly, SpecialInfo>,
    special_of_var: BTreeMap<VarId, Poly>,
    /// Irreducibles seen so far, offered to the factorizer for trial division.
    hints: RwLock<BTreeSet<Poly>>,
}

impl Ring {
    pub fn new(config: RingConfig) -> Result<Ring, RingError> {
        config.validate()?;
        let mut ring = Ring {
            id: NEXT_RING_ID.fetch_add(1, Ordering::Relaxed),
            config,
            vars: Vec::new(),
            generators: BTreeMap::new(),
            z: None,
            quotients: BTreeMap::new(),
            specials: BTreeMap::new(),
            special_of_var: BTreeMap::new(),
            hints: RwLock::new(BTreeSet::new()),
        };
        if ring.config.variant == Variant::Z {
            let z = ring.push_var(VarKind::Z, BTreeSet::from([Ordinal::one()]), 0, None);
            ring.z = Some(z);
        }
        Ok(ring)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn config(&self) -> &RingConfig {
        &self.config
    }

    pub fn field(&self) -> Field {
        self.config.field
    }

    pub fn variant(&self) -> Variant {
        self.config.variant
    }

    /// `ω^alpha`, the strict upper bound of every norm.
    pub fn order_type(&self) -> Ordinal {
        Ordinal::omega_pow(self.config.alpha.clone())
    }

    pub fn vars(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn var_info(&self, v: VarId) -> Option<&VarInfo> {
        self.vars.get(v.0 as usize)
    }

    pub fn z_var(&self) -> Option<VarId> {
        self.z
    }

    pub fn specials(&self) -> impl Iterator<Item = &SpecialInfo> {
        self.specials.values()
    }

    pub fn special_of_var(&self, v: VarId) -> Option<&SpecialInfo> {
        self.special_of_var.get(&v).and_then(|p| self.specials.get(p))
    }

    pub fn var_name(&self, v: VarId) -> String {
        match self.var_info(v) {
            Some(info) => match info.kind {
                VarKind::Generator => {
                    let beta = info.subs.iter().next().expect("generator subscript");
                    format!("x[{beta},{}]", info.stage)
                }
                VarKind::Z => "z".to_string(),
                VarKind::Special => format!("y{}", v.0),
            },
            None => v.to_string(),
        }
    }

    fn push_var(
        &mut self,
        kind: VarKind,
        subs: BTreeSet<Ordinal>,
        stage: u32,
        defining_pair: Option<(Poly, Poly)>,
    ) -> VarId {
        let id = VarId(u32::try_from(self.vars.len()).expect("variable registry overflow"));
        self.vars.push(VarInfo {
            id,
            kind,
            subs,
            stage,
            defining_pair,
        });
        id
    }

    /// The generator `x[β,stage]`, created on first use.
    pub fn gen_var(&mut self, beta: &Ordinal, stage: u32) -> Result<VarId, RingError> {
        let bound = self.order_type();
        if beta.is_zero() || *beta >= bound {
            return Err(RingError::OutOfRange {
                beta: beta.clone(),
                bound,
            });
        }
        if let Some(v) = self.generators.get(&(beta.clone(), stage)) {
            return Ok(*v);
        }
        let v = self.push_var(
            VarKind::Generator,
            BTreeSet::from([beta.clone()]),
            stage,
            None,
        );
        self.generators.insert((beta.clone(), stage), v);
        Ok(v)
    }

    pub fn gen(&mut self, beta: &Ordinal, stage: u32) -> Result<RElement, RingError> {
        let v = self.gen_var(beta, stage)?;
        Ok(self.var_element(v))
    }

    pub fn gen_z(&self) -> Result<RElement, RingError> {
        let z = self.z.ok_or(RingError::NotVariant)?;
        Ok(self.var_element(z))
    }

    /// The variable `v` as a ring element.
    pub fn var_element(&self, v: VarId) -> RElement {
        let field = self.field();
        let p = Poly::var(field, v);
        RElement::new(self.id, p.clone(), Poly::one(field), Vec::new())
            .with_factors(Factorization::new(field.one(), [(p, 1)]))
    }

    pub fn zero(&self) -> RElement {
        let field = self.field();
        RElement::new(self.id, Poly::zero(field), Poly::one(field), Vec::new())
    }

    pub fn one(&self) -> RElement {
        self.scalar(self.field().one())
    }

    pub fn scalar(&self, c: Coeff) -> RElement {
        let field = self.field();
        if field.is_zero(&c) {
            return self.zero();
        }
        RElement::new(self.id, Poly::constant(field, c.clone()), Poly::one(field), Vec::new())
            .with_factors(Factorization::unit(c))
    }

    fn check_poly(&self, p: &Poly) -> Result<(), RingError> {
        if p.field() != self.field() {
            return Err(PolyError::FieldMismatch(p.field(), self.field()).into());
        }
        match p.vars().into_iter().find(|v| self.var_info(*v).is_none()) {
            Some(v) => Err(RingError::UnknownVariable(v.to_string())),
            None => Ok(()),
        }
    }

    fn check(&self, r: &RElement) -> Result<(), RingError> {
        if r.ring == self.id {
            Ok(())
        } else {
            Err(RingError::ForeignElement)
        }
    }

    /// A polynomial of `R_∞` as an element.
    pub fn element(&self, p: Poly) -> Result<RElement, RingError> {
        self.check_poly(&p)?;
        let field = self.field();
        Ok(RElement::new(self.id, p, Poly::one(field), Vec::new()))
    }

    /// `num / den`, where `den` must factor into scalars and norm-zero special
    /// primes.
    pub fn fraction(&self, num: Poly, den: Poly) -> Result<RElement, RingError> {
        self.check_poly(&num)?;
        self.check_poly(&den)?;
        if den.is_zero() {
            return Err(RingError::ZeroDivisor);
        }
        let field = self.field();
        let df = self.factor_poly(&den)?;
        if df.factors.iter().any(|(p, _)| !self.is_unit_prime(p)) {
            return Err(RingError::NotAUnit(self.display_poly(&den)));
        }
        let inv = field.inv(&df.unit).expect("nonzero scalar");
        let num = num.scale(&inv);
        let den = product(field, &to_map(&df.factors));
        Ok(self.canonicalize(&RElement::new(self.id, num, den, df.factors)))
    }

    /// Parses the element grammar; generators are materialized as needed.
    /// Errors in resolving a variable are reported as ring errors.
    pub fn parse(&mut self, text: &str) -> Result<RElement, RingError> {
        let field = self.field();
        let mut resolve_err = None;
        let parsed = parse_poly(text, field, |token| {
            let v = match token {
                VarToken::X { beta, stage } => self.gen_var(beta, *stage),
                VarToken::Z => self.z.ok_or(RingError::NotVariant),
                VarToken::Y(id) => match self.var_info(VarId(*id)) {
                    Some(info) if info.kind == VarKind::Special => Ok(VarId(*id)),
                    _ => Err(RingError::UnknownVariable(format!("y{id}"))),
                },
            };
            v.map_err(|e| {
                let msg = e.to_string();
                resolve_err.get_or_insert(e);
                msg
            })
        });
        let p = match (parsed, resolve_err) {
            (Ok(p), _) => p,
            (Err(_), Some(e)) => return Err(e),
            (Err(e), None) => return Err(e.into()),
        };
        self.element(p)
    }

    pub fn display(&self, r: &RElement) -> String {
        let num = self.display_poly(&r.num);
        if r.den.is_one() {
            num
        } else {
            format!("({num})/({})", self.display_poly(&r.den))
        }
    }

    pub fn display_poly(&self, p: &Poly) -> String {
        p.display_with(|v| self.var_name(v))
    }

    fn from_factors<N, D>(&self, unit: Coeff, num: N, den: D) -> RElement
    where
        N: IntoIterator<Item = (Poly, u32)>,
        D: IntoIterator<Item = (Poly, u32)>,
    {
        let field = self.field();
        let mut num_map = FactorMap::new();
        for (p, m) in num {
            *num_map.entry(p).or_default() += m;
        }
        let mut den_map = FactorMap::new();
        for (p, m) in den {
            *den_map.entry(p).or_default() += m;
        }
        let common = intersect(&num_map, &den_map);
        let num_map = difference(&num_map, &common);
        let den_map = difference(&den_map, &common);
        let fact = Factorization::new(unit, num_map);
        let num_poly = fact.expand(field);
        let den_poly = product(field, &den_map);
        RElement::new(self.id, num_poly, den_poly, den_map.into_iter().collect()).with_factors(fact)
    }

    /// Cancels denominator primes that divide the numerator. Idempotent.
    pub fn canonicalize(&self, r: &RElement) -> RElement {
        let field = self.field();
        if r.num.is_zero() {
            return self.zero();
        }
        let mut num = r.num.clone();
        let mut cancelled = FactorMap::new();
        let mut kept: Vec<(Poly, u32)> = Vec::new();
        for (s, m) in to_map(&r.den_factors) {
            let mut left = m;
            while left > 0 {
                match num.exact_div(&s) {
                    Ok(Some(q)) => {
                        num = q;
                        left -= 1;
                    }
                    _ => break,
                }
            }
            if left < m {
                cancelled.insert(s.clone(), m - left);
            }
            if left > 0 {
                kept.push((s, left));
            }
        }
        let den = product(field, &to_map(&kept));
        let out = RElement::new(self.id, num, den, kept);
        match r.factors.get() {
            Some(f) => {
                let rest = difference(&to_map(&f.factors), &cancelled);
                out.with_factors(Factorization::new(f.unit.clone(), rest))
            }
            None => out,
        }
    }

    pub fn neg(&self, a: &RElement) -> RElement {
        let field = self.field();
        let out = RElement::new(self.id, -&a.num, a.den.clone(), a.den_factors.clone());
        match a.factors.get() {
            Some(f) => out.with_factors(Factorization {
                unit: field.neg(&f.unit),
                factors: f.factors.clone(),
            }),
            None => out,
        }
    }

    pub fn add(&self, a: &RElement, b: &RElement) -> Result<RElement, RingError> {
        self.check(a)?;
        self.check(b)?;
        if a.den == b.den {
            let sum = RElement::new(self.id, &a.num + &b.num, a.den.clone(), a.den_factors.clone());
            return Ok(self.canonicalize(&sum));
        }
        let num = &(&a.num * &b.den) + &(&b.num * &a.den);
        let den = &a.den * &b.den;
        let den_factors = to_map(a.den_factors.iter().chain(&b.den_factors))
            .into_iter()
            .collect();
        Ok(self.canonicalize(&RElement::new(self.id, num, den, den_factors)))
    }

    pub fn sub(&self, a: &RElement, b: &RElement) -> Result<RElement, RingError> {
        self.add(a, &self.neg(b))
    }

    /// Products carry known factorizations forward.
    pub fn mul(&self, a: &RElement, b: &RElement) -> Result<RElement, RingError> {
        self.check(a)?;
        self.check(b)?;
        let field = self.field();
        if a.is_zero() || b.is_zero() {
            return Ok(self.zero());
        }
        let den = a.den_factors.iter().chain(&b.den_factors).cloned();
        if let (Some(fa), Some(fb)) = (a.factors.get(), b.factors.get()) {
            let unit = field.mul(&fa.unit, &fb.unit);
            let num = fa.factors.iter().chain(&fb.factors).cloned();
            return Ok(self.from_factors(unit, num, den));
        }
        let num = &a.num * &b.num;
        let den_poly = &a.den * &b.den;
        let den_factors = to_map(a.den_factors.iter().chain(&b.den_factors))
            .into_iter()
            .collect();
        Ok(self.canonicalize(&RElement::new(self.id, num, den_poly, den_factors)))
    }

    pub fn pow(&self, a: &RElement, e: u32) -> Result<RElement, RingError> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }

    fn factor_poly(&self, p: &Poly) -> Result<Factorization, RingError> {
        let fact = {
            let hints = self.hints.read().expect("hint lock poisoned");
            Factorizer::new(self.field(), self.config.budget)
                .with_hints(hints.iter())
                .factor(p)?
        };
        let mut hints = self.hints.write().expect("hint lock poisoned");
        for (f, _) in &fact.factors {
            if !hints.contains(f) {
                hints.insert(f.clone());
            }
        }
        Ok(fact)
    }

    /// Factorization of the numerator, computed at most once per element.
    pub fn factorization<'r>(&self, r: &'r RElement) -> Result<&'r Factorization, RingError> {
        self.check(r)?;
        if r.is_zero() {
            return Err(RingError::ZeroElement);
        }
        if let Some(f) = r.factors.get() {
            return Ok(f);
        }
        let f = self.factor_poly(&r.num)?;
        Ok(r.factors.get_or_init(|| f))
    }

    fn is_z(&self, p: &Poly) -> bool {
        self.z.is_some_and(|z| *p == Poly::var(self.field(), z))
    }

    fn is_unit_prime(&self, p: &Poly) -> bool {
        self.specials.get(p).is_some_and(|s| s.norm.is_zero())
    }

    fn stage_of_poly(&self, p: &Poly) -> u32 {
        p.vars()
            .into_iter()
            .filter_map(|v| self.var_info(v).map(|i| i.stage))
            .max()
            .unwrap_or(0)
    }

    /// Largest stage of a variable occurring in `r`.
    pub fn stage_of(&self, r: &RElement) -> u32 {
        self.stage_of_poly(&r.num).max(self.stage_of_poly(&r.den))
    }

    fn sub_of_poly(&self, p: &Poly) -> BTreeSet<Ordinal> {
        p.vars()
            .into_iter()
            .filter_map(|v| self.var_info(v))
            .flat_map(|i| i.subs.iter().cloned())
            .collect()
    }

    /// Union of the first indices of all variables occurring in `r`.
    pub fn sub_of(&self, r: &RElement) -> Result<BTreeSet<Ordinal>, RingError> {
        self.check(r)?;
        if r.num.is_constant() && r.den.is_constant() {
            return Err(RingError::ScalarSub);
        }
        let mut out = self.sub_of_poly(&r.num);
        out.extend(self.sub_of_poly(&r.den));
        Ok(out)
    }

    /// Norm of a monic irreducible that is not `z`.
    fn prime_norm(&self, p: &Poly) -> Ordinal {
        if let Some(info) = self.specials.get(p) {
            return info.norm.clone();
        }
        self.sub_of_poly(p)
            .into_iter()
            .next_back()
            .unwrap_or_else(Ordinal::zero)
    }

    fn factor_norm<'a, I>(&self, factors: I, weight: ZWeight) -> Ordinal
    where
        I: IntoIterator<Item = (&'a Poly, &'a u32)>,
    {
        factors.into_iter().fold(Ordinal::zero(), |acc, (p, m)| {
            let part = if self.is_z(p) {
                match weight {
                    ZWeight::Phi => self_power(*m),
                    ZWeight::Psi => Ordinal::omega().nat_scale(u64::from(*m)),
                }
            } else {
                self.prime_norm(p).nat_scale(u64::from(*m))
            };
            acc.nat_sum(&part)
        })
    }

    /// The norm φ. Denominators and scalars contribute 0.
    pub fn norm(&self, r: &RElement) -> Result<Ordinal, RingError> {
        let f = self.factorization(r)?;
        Ok(self.factor_norm(f.factors.iter().map(|(p, m)| (p, m)), ZWeight::Phi))
    }

    /// The monoid norm ψ of the z-variant: φ except `ψ(zᵏ) = ω·k`.
    pub fn psi_monoid(&self, r: &RElement) -> Result<Ordinal, RingError> {
        if self.config.variant != Variant::Z {
            return Err(RingError::NotVariant);
        }
        let f = self.factorization(r)?;
        Ok(self.factor_norm(f.factors.iter().map(|(p, m)| (p, m)), ZWeight::Psi))
    }

    /// Identifies `p` as a unit multiple of a registered special prime.
    pub fn special_info(&self, p: &Poly) -> Result<Option<SpecialInfo>, RingError> {
        self.check_poly(p)?;
        if p.is_zero() {
            return Err(RingError::ZeroElement);
        }
        if p.is_constant() || self.factor_poly(p)?.count() != 1 {
            return Err(RingError::NotIrreducible);
        }
        let (_, monic) = p.normalize_unit()?;
        Ok(self.specials.get(&monic).cloned())
    }

    fn check_eligible(
        &self,
        phi_n: &Ordinal,
        phi_d: &Ordinal,
        z_divides_n: bool,
    ) -> Result<bool, RingError> {
        if phi_d.is_zero() {
            return Err(RingError::NotEligible("φ(d) = 0".into()));
        }
        if phi_n >= phi_d {
            Ok(false)
        } else if self.config.variant == Variant::Z && z_divides_n {
            Ok(true)
        } else {
            Err(RingError::NotEligible(format!("φ(n) = {phi_n} < φ(d) = {phi_d}")))
        }
    }

    /// The special variable `y` for `(n, d)`, with special prime `n − y·d`.
    pub fn adjoin_quotient(&mut self, n: &RElement, d: &RElement) -> Result<VarId, RingError> {
        self.check(n)?;
        self.check(d)?;
        if n.is_zero() || d.is_zero() {
            return Err(RingError::NotEligible("both members must be nonzero".into()));
        }
        if !n.is_polynomial() || !d.is_polynomial() {
            return Err(RingError::NotPolynomial);
        }
        let nf = to_map(&self.factorization(n)?.factors);
        let df = to_map(&self.factorization(d)?.factors);
        if !intersect(&nf, &df).is_empty() {
            return Err(RingError::NotEligible("gcd(n, d) is not 1".into()));
        }
        let phi_n = self.factor_norm(&nf, ZWeight::Phi);
        let phi_d = self.factor_norm(&df, ZWeight::Phi);
        let z_divides = nf.keys().any(|p| self.is_z(p));
        self.check_eligible(&phi_n, &phi_d, z_divides)?;
        let field = self.field();
        let (lc, d_monic) = d.num.normalize_unit()?;
        let n_scaled = n.num.scale(&field.inv(&lc).expect("nonzero"));
        Ok(self.adjoin_pair(n_scaled, d_monic, &phi_d))
    }

    fn adjoin_pair(&mut self, n: Poly, d: Poly, phi_d: &Ordinal) -> VarId {
        if let Some(v) = self.quotients.get(&(n.clone(), d.clone())) {
            return *v;
        }
        let stage = 1 + self.stage_of_poly(&n).max(self.stage_of_poly(&d));
        let mut subs = self.sub_of_poly(&n);
        subs.extend(self.sub_of_poly(&d));
        subs.insert(Ordinal::zero());
        let norm = subs
            .range(..phi_d.clone())
            .next_back()
            .cloned()
            .expect("0 lies below a positive norm");
        let v = self.push_var(VarKind::Special, subs, stage, Some((n.clone(), d.clone())));
        let field = self.field();
        let y = Poly::var(field, v);
        let (_, prime) = (&n - &(&y * &d))
            .normalize_unit()
            .expect("n − y·d is nonzero");
        self.hints
            .get_mut()
            .expect("hint lock poisoned")
            .insert(prime.clone());
        self.special_of_var.insert(v, prime.clone());
        self.specials.insert(
            prime.clone(),
            SpecialInfo {
                var: v,
                n: n.clone(),
                d: d.clone(),
                prime,
                norm,
            },
        );
        self.quotients.insert((n, d), v);
        v
    }

    /// Splits factors into norm-positive ones and units of the ring.
    fn split_units(&self, factors: &[(Poly, u32)]) -> (FactorMap, FactorMap) {
        let (units, positive): (Vec<_>, Vec<_>) =
            factors.iter().partition(|(p, _)| self.is_unit_prime(p));
        (to_map(positive), to_map(units))
    }

    /// `d | n` in the localized ring.
    pub fn divides(&self, d: &RElement, n: &RElement) -> Result<bool, RingError> {
        self.check(d)?;
        self.check(n)?;
        if d.is_zero() {
            return Err(RingError::ZeroDivisor);
        }
        if n.is_zero() {
            return Ok(true);
        }
        let (d_pos, _) = self.split_units(&self.factorization(d)?.factors);
        let (n_pos, _) = self.split_units(&self.factorization(n)?.factors);
        Ok(contains(&n_pos, &d_pos))
    }

    /// Whether `a` and `b` differ by a unit of the ring.
    pub fn associated(&self, a: &RElement, b: &RElement) -> Result<bool, RingError> {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => Ok(true),
            (false, false) => Ok(self.divides(a, b)? && self.divides(b, a)?),
            _ => Ok(false),
        }
    }

    /// The gcd from factor multisets, normalized to a monic polynomial.
    pub fn factor_gcd(&self, a: &RElement, b: &RElement) -> Result<RElement, RingError> {
        let field = self.field();
        match (a.is_zero(), b.is_zero()) {
            (true, true) => Err(RingError::BothZero),
            (true, false) | (false, true) => {
                let x = if a.is_zero() { b } else { a };
                let (pos, _) = self.split_units(&self.factorization(x)?.factors);
                Ok(self.from_factors(field.one(), pos, []))
            }
            (false, false) => {
                let (pa, _) = self.split_units(&self.factorization(a)?.factors);
                let (pb, _) = self.split_units(&self.factorization(b)?.factors);
                Ok(self.from_factors(field.one(), intersect(&pa, &pb), []))
            }
        }
    }

    /// Division with remainder: `n = q·d + r` with `r = 0` or `φ(r) < φ(d)`.
    pub fn divide(&mut self, n: &RElement, d: &RElement) -> Result<DivisionResult, RingError> {
        self.check(n)?;
        self.check(d)?;
        if d.is_zero() {
            return Err(RingError::ZeroDivisor);
        }
        let field = self.field();
        let df = self.factorization(d)?.clone();
        let divisor_norm = self.factor_norm(df.factors.iter().map(|(p, m)| (p, m)), ZWeight::Phi);
        let done = |quotient: RElement, remainder: RElement, remainder_norm, path| DivisionResult {
            numerator: n.clone(),
            divisor: d.clone(),
            quotient,
            remainder,
            divisor_norm: divisor_norm.clone(),
            remainder_norm,
            adjoined_var: None,
            path,
            general: None,
        };
        if n.is_zero() {
            return Ok(done(self.zero(), self.zero(), None, DivisionPath::Exact));
        }
        let nf = self.factorization(n)?.clone();
        let (n_pos, n_units) = self.split_units(&nf.factors);
        let (d_pos, d_units) = self.split_units(&df.factors);
        let scalar = field.div(&nf.unit, &df.unit).expect("nonzero unit");
        let n_den = to_map(&n.den_factors);
        let d_den = to_map(&d.den_factors);

        if contains(&n_pos, &d_pos) {
            let num = difference(&n_pos, &d_pos)
                .into_iter()
                .chain(n_units.clone())
                .chain(d_den.clone());
            let den = n_den.clone().into_iter().chain(d_units.clone());
            let q = self.from_factors(scalar, num, den);
            return Ok(done(q, self.zero(), None, DivisionPath::Exact));
        }

        let numerator_norm = self.factor_norm(&n_pos, ZWeight::Phi);
        if numerator_norm < divisor_norm {
            let r = n.clone();
            return Ok(done(self.zero(), r, Some(numerator_norm), DivisionPath::SmallNorm));
        }

        let common = intersect(&n_pos, &d_pos);
        let n_red = difference(&n_pos, &common);
        let d_red = difference(&d_pos, &common);
        let phi_nr = self.factor_norm(&n_red, ZWeight::Phi);
        let phi_dr = self.factor_norm(&d_red, ZWeight::Phi);
        let z_divides = n_red.keys().any(|p| self.is_z(p));
        let extended = self.check_eligible(&phi_nr, &phi_dr, z_divides)?;
        let n_red_poly = product(field, &n_red);
        let d_red_poly = product(field, &d_red);
        let y = self.adjoin_pair(n_red_poly.clone(), d_red_poly.clone(), &phi_dr);
        let info = self.special_of_var(y).expect("registered special").clone();
        let y_poly = Poly::var(field, y);

        let quotient = self.from_factors(
            scalar,
            n_units
                .clone()
                .into_iter()
                .chain(d_den)
                .chain([(y_poly.clone(), 1)]),
            n_den.clone().into_iter().chain(d_units),
        );
        let raw = &n_red_poly - &(&y_poly * &d_red_poly);
        let lc = raw.leading_coeff().expect("nonzero").clone();
        let remainder = self.from_factors(
            field.mul(&nf.unit, &lc),
            n_units
                .into_iter()
                .chain(common.clone())
                .chain([(info.prime.clone(), 1)]),
            n_den,
        );
        let remainder_norm = self.norm(&remainder)?;
        Ok(DivisionResult {
            adjoined_var: Some(y),
            path: DivisionPath::General,
            general: Some(GeneralStep {
                reduced_num: n_red_poly,
                reduced_den: d_red_poly,
                common_norm: self.factor_norm(&common, ZWeight::Phi),
                common: product(field, &common),
                special_prime: info.prime,
                special_norm: info.norm,
                extended,
            }),
            ..done(quotient, remainder, Some(remainder_norm), DivisionPath::General)
        })
    }

    /// The Euclidean algorithm from `(a, b)`, recording every division.
    pub fn euclid_gcd(&mut self, a: &RElement, b: &RElement) -> Result<DescentTrace, RingError> {
        self.check(a)?;
        self.check(b)?;
        if a.is_zero() && b.is_zero() {
            return Err(RingError::BothZero);
        }
        let (mut n, mut d) = (a.clone(), b.clone());
        let mut steps = Vec::new();
        while !d.is_zero() {
            let step = self.divide(&n, &d)?;
            n = d;
            d = step.remainder.clone();
            steps.push(step);
        }
        Ok(DescentTrace {
            steps,
            final_gcd: n,
        })
    }
}
