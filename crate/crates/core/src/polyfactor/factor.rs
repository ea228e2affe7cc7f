//! Irreducible factorization by bounded exhaustive search.
//!
//! Every candidate divisor `g` of `c` has a top homogeneous part dividing the
//! top part of `c`, so the top part is factored first (it has one fewer
//! effective variable after dehomogenizing) and only its divisors are tried as
//! leading forms. The lower-degree coefficients are then enumerated over the
//! field (finite case) or over bounded integers (rational case).
//!
//! Cheap certificates short-circuit the search: total degree one, degree one
//! in some variable with coprime coefficients, or an irreducible top part.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{bigint_mod, pow_mod, Coeff, Field};
use super::poly::{Monomial, Poly, VarId};
use super::PolyError;

/// Search limits for [`Factorizer`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorBudget {
    /// Largest candidate divisor degree tried over the rationals.
    pub max_degree: u32,
    /// Largest absolute value of an integer coefficient tried over the rationals.
    pub max_height: i64,
    /// Total number of enumerated candidates per factorization before giving up.
    pub max_candidates: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            max_degree: 4,
            max_height: 10,
            max_candidates: 4_000_000,
        }
    }
}

/// `unit · Π factorᵢ^mᵢ`, factors monic, irreducible and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    pub unit: Coeff,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn unit(unit: Coeff) -> Self {
        Factorization {
            unit,
            factors: Vec::new(),
        }
    }

    /// Merges repeated factors and sorts.
    pub fn new(unit: Coeff, factors: impl IntoIterator<Item = (Poly, u32)>) -> Self {
        let mut merged: BTreeMap<Poly, u32> = BTreeMap::new();
        for (p, m) in factors {
            if m > 0 {
                *merged.entry(p).or_default() += m;
            }
        }
        Factorization {
            unit,
            factors: merged.into_iter().collect(),
        }
    }

    /// Multiplies everything back out.
    pub fn expand(&self, field: Field) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(field, self.unit.clone()), |acc, (p, m)| &acc * &p.pow(*m))
    }

    /// Number of irreducible factors counted with multiplicity.
    pub fn count(&self) -> u32 {
        self.factors.iter().map(|(_, m)| m).sum()
    }

    pub fn multiplicity(&self, p: &Poly) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, m)| *m)
            .unwrap_or(0)
    }
}

enum Split {
    Irreducible,
    /// A proper monic divisor. `certified` divisors are known irreducible.
    Factor { divisor: Poly, certified: bool },
}

/// Factorization engine over a fixed field. `hints` are polynomials already
/// known to be irreducible, up to a unit; they are tried by trial division
/// first. A reducible hint yields an incomplete factorization.
pub struct Factorizer<'a> {
    field: Field,
    budget: FactorBudget,
    hints: Vec<Cow<'a, Poly>>,
    spent: std::cell::Cell<u64>,
}

const RATIONAL_EVAL_MODULUS: u64 = (1 << 61) - 1;
const MAX_POINTS: usize = 256;

impl<'a> Factorizer<'a> {
    pub fn new(field: Field, budget: FactorBudget) -> Self {
        Factorizer {
            field,
            budget,
            hints: Vec::new(),
            spent: std::cell::Cell::new(0),
        }
    }

    pub fn with_hints<I: IntoIterator<Item = &'a Poly>>(mut self, hints: I) -> Self {
        self.hints = hints
            .into_iter()
            .filter(|h| !h.is_constant())
            .map(|h| match h.normalize_unit() {
                Ok((_, m)) if m != *h => Cow::Owned(m),
                _ => Cow::Borrowed(h),
            })
            .collect();
        self
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Complete factorization into monic irreducibles.
    pub fn factor(&self, a: &Poly) -> Result<Factorization, PolyError> {
        self.spent.set(0);
        self.factor_inner(a)
    }

    fn factor_inner(&self, a: &Poly) -> Result<Factorization, PolyError> {
        if a.field() != self.field {
            return Err(PolyError::FieldMismatch(a.field(), self.field));
        }
        let (unit, monic) = a.normalize_unit()?;
        let mut found: Vec<(Poly, u32)> = Vec::new();
        let content = monic.monomial_content();
        for &(v, e) in content.pairs() {
            found.push((Poly::var(self.field, v), e));
        }
        let mut rest = monic.div_monomial(&content).expect("content divides");
        if rest.is_constant() {
            return Ok(Factorization::new(unit, found));
        }
        for h in self.applicable_hints(&rest) {
            while let Some(q) = self.divide_by_hint(&rest, h)? {
                found.push((h.clone(), 1));
                rest = q;
            }
            if rest.is_constant() {
                break;
            }
        }
        let mut stack = Vec::new();
        if !rest.is_constant() {
            stack.push(rest);
        }
        while let Some(c) = stack.pop() {
            match self.split(&c)? {
                Split::Irreducible => found.push((c, 1)),
                Split::Factor { divisor, certified } => {
                    let cofactor = c.exact_div(&divisor)?.expect("split returns a divisor");
                    let (_, cofactor) = cofactor.normalize_unit()?;
                    if certified {
                        found.push((divisor, 1));
                    } else {
                        stack.push(divisor);
                    }
                    stack.push(cofactor);
                }
            }
        }
        Ok(Factorization::new(unit, found))
    }

    fn applicable_hints(&self, a: &Poly) -> Vec<&Poly> {
        let vars = a.vars();
        let deg = a.degree().unwrap_or(0);
        let lm = a.leading_term().map(|(m, _)| m.clone()).unwrap_or_default();
        self.hints
            .iter()
            .map(|h| h.as_ref())
            .filter(|h| {
                h.degree().unwrap_or(0) <= deg
                    && h.leading_term().is_some_and(|(m, _)| m.divides(&lm))
                    && h.vars().is_subset(&vars)
            })
            .collect()
    }

    fn divide_by_hint(&self, a: &Poly, h: &Poly) -> Result<Option<Poly>, PolyError> {
        if a.is_constant() {
            return Ok(None);
        }
        match a.leading_term() {
            Some((lm, _)) if h.leading_term().is_some_and(|(m, _)| m.divides(lm)) => a.exact_div(h),
            _ => Ok(None),
        }
    }

    /// Finds a proper divisor of a monic, nonconstant `c` without monomial
    /// content, or proves irreducibility.
    fn split(&self, c: &Poly) -> Result<Split, PolyError> {
        let deg = c.degree().expect("nonzero");
        if deg == 1 {
            return Ok(Split::Irreducible);
        }
        if let Some(result) = self.linear_certificate(c)? {
            return Ok(result);
        }
        let top = c.top_part();
        let top_factors = self.factor_homogeneous(&top)?;
        if c.is_homogeneous() {
            return Ok(match top_factors.first() {
                Some((p, _)) if top_factors.iter().map(|(_, m)| m).sum::<u32>() > 1 => Split::Factor {
                    divisor: p.clone(),
                    certified: true,
                },
                _ => Split::Irreducible,
            });
        }
        if top_factors.iter().map(|(_, m)| m).sum::<u32>() <= 1 {
            return Ok(Split::Irreducible);
        }
        self.search(c, &top_factors)
    }

    /// If `c` has degree one in some variable `v`, write `c = A·v + B`. Then
    /// `c` is irreducible iff `gcd(A, B) = 1`, and otherwise any common
    /// irreducible factor of `A` and `B` divides `c`.
    fn linear_certificate(&self, c: &Poly) -> Result<Option<Split>, PolyError> {
        for v in c.vars() {
            if c.degree_in(v) != 1 {
                continue;
            }
            let coeffs = c.coefficients_in(v);
            let a = &coeffs[&1];
            let b = coeffs.get(&0).cloned().unwrap_or_else(|| Poly::zero(self.field));
            if a.is_constant() {
                return Ok(Some(Split::Irreducible));
            }
            let a_factors = self.factor_inner(a)?;
            for (f, _) in &a_factors.factors {
                if f.divides(&b)? {
                    return Ok(Some(Split::Factor {
                        divisor: f.clone(),
                        certified: true,
                    }));
                }
            }
            return Ok(Some(Split::Irreducible));
        }
        Ok(None)
    }

    /// Factors a monic homogeneous polynomial by dehomogenizing in its last
    /// variable.
    fn factor_homogeneous(&self, h: &Poly) -> Result<Vec<(Poly, u32)>, PolyError> {
        let (_, h) = h.normalize_unit()?;
        let content = h.monomial_content();
        let mut out: Vec<(Poly, u32)> = content
            .pairs()
            .iter()
            .map(|&(v, e)| (Poly::var(self.field, v), e))
            .collect();
        let rest = h.div_monomial(&content).expect("content divides");
        if rest.is_constant() {
            return Ok(out);
        }
        let v = *rest.vars().iter().next_back().expect("nonconstant");
        let affine = rest.dehomogenize(v);
        let affine_factors = self.factor_inner(&affine)?;
        let mut total = 0;
        for (p, m) in affine_factors.factors {
            let d = p.degree().unwrap_or(0);
            total += d * m;
            let (_, ph) = p.homogenize(v, d).normalize_unit()?;
            out.push((ph, m));
        }
        let deficit = rest.degree().unwrap_or(0) - total;
        if deficit > 0 {
            out.push((Poly::var(self.field, v), deficit));
        }
        Ok(Factorization::new(self.field.one(), out).factors)
    }

    fn charge(&self, n: u64) -> Result<(), PolyError> {
        let spent = self.spent.get().saturating_add(n);
        self.spent.set(spent);
        if spent > self.budget.max_candidates {
            Err(PolyError::FactorizationIncomplete(format!(
                "candidate budget of {} exhausted",
                self.budget.max_candidates
            )))
        } else {
            Ok(())
        }
    }

    /// Enumerates candidate divisors in increasing degree.
    fn search(&self, c: &Poly, top_factors: &[(Poly, u32)]) -> Result<Split, PolyError> {
        let deg = c.degree().expect("nonzero");
        let vars: Vec<VarId> = c.vars().into_iter().collect();
        let ctx = SearchContext::new(self.field, c, &vars);
        let rational = !self.field.is_finite();
        let mut first_degree = 1;
        if rational && vars.len() == 1 {
            if let Some(root_factor) = self.rational_root_factor(c, vars[0])? {
                return Ok(Split::Factor {
                    divisor: root_factor,
                    certified: true,
                });
            }
            if deg <= 3 {
                return Ok(Split::Irreducible);
            }
            first_degree = 2;
        }
        for e in first_degree..=deg / 2 {
            if rational && e > self.budget.max_degree {
                break;
            }
            let lower = lower_monomials(c, &vars, e);
            for top in divisors_of_degree(self.field, top_factors, e) {
                for lead in ctx.leading_forms(&top, self.budget.max_height) {
                    if let Some(g) = self.enumerate_lower(c, &ctx, &lead, &lower)? {
                        let (_, g) = g.normalize_unit()?;
                        return Ok(Split::Factor {
                            divisor: g,
                            certified: !rational,
                        });
                    }
                }
            }
        }
        if rational {
            return Err(PolyError::FactorizationIncomplete(format!(
                "no divisor of degree <= {} with coefficients bounded by {} found for {}",
                self.budget.max_degree.min(deg / 2),
                self.budget.max_height,
                c
            )));
        }
        Ok(Split::Irreducible)
    }

    /// Complete linear-factor test for a univariate rational polynomial via
    /// the rational root theorem.
    fn rational_root_factor(&self, c: &Poly, v: VarId) -> Result<Option<Poly>, PolyError> {
        const MAX_ROOT_SEARCH: u64 = 1_000_000_000_000;
        let p = primitive_integer(c);
        let integer = |m: &Monomial| -> BigInt {
            p.coeff(m).as_rational().map(|r| r.numer().clone()).unwrap_or_default()
        };
        let lead = integer(p.leading_term().expect("nonzero").0).abs();
        let constant = integer(&Monomial::one()).abs();
        let small = |n: &BigInt| n.to_u64().filter(|&n| n <= MAX_ROOT_SEARCH);
        let (Some(lead), Some(constant)) = (small(&lead), small(&constant)) else {
            return Err(PolyError::FactorizationIncomplete(format!(
                "coefficients of {c} too large for the rational root search"
            )));
        };
        let divisors = |n: u64| -> Vec<u64> {
            let mut out = Vec::new();
            let mut d = 1;
            while d * d <= n {
                if n % d == 0 {
                    out.push(d);
                    out.push(n / d);
                }
                d += 1;
            }
            out
        };
        self.charge((lead as f64).sqrt() as u64 + (constant as f64).sqrt() as u64)?;
        let x = Poly::var(self.field, v);
        for num in divisors(constant) {
            for den in divisors(lead) {
                for sign in [1i64, -1] {
                    let root = BigRational::new(BigInt::from(num) * sign, BigInt::from(den));
                    let value = p.terms().fold(BigRational::zero(), |acc, (m, k)| {
                        let r = k.as_rational().expect("rational");
                        acc + r * num_traits::pow(root.clone(), m.exponent(v) as usize)
                    });
                    if value.is_zero() {
                        return Ok(Some(&x - &Poly::constant(self.field, Coeff::Rat(root))));
                    }
                }
            }
        }
        Ok(None)
    }

    fn enumerate_lower(
        &self,
        c: &Poly,
        ctx: &SearchContext,
        lead: &Poly,
        lower: &[Monomial],
    ) -> Result<Option<Poly>, PolyError> {
        let alphabet = ctx.alphabet(self.budget.max_height);
        let radix = alphabet.len() as u64;
        let space = (radix as f64).powi(lower.len() as i32);
        if space > (self.budget.max_candidates.saturating_sub(self.spent.get())) as f64 {
            return Err(PolyError::FactorizationIncomplete(format!(
                "search space of {space:.0} candidates exceeds the remaining budget"
            )));
        }
        let constant_required = !self.field.is_zero(&c.constant_term());
        let lead_vals = ctx.eval_all(lead);
        let mono_vals: Vec<Vec<u64>> = lower.iter().map(|m| ctx.eval_monomial(m)).collect();
        let mut digits = vec![0usize; lower.len()];
        let mut vals = lead_vals.clone();
        let m = ctx.modulus;
        let mut count = 0u64;
        loop {
            count += 1;
            let constant_ok = !constant_required
                || lower
                    .iter()
                    .zip(&digits)
                    .any(|(mono, &d)| mono.is_one() && alphabet[d].1 != 0);
            if constant_ok && ctx.passes_filter(&vals) {
                let g = build_candidate(self.field, lead, lower, &digits, &alphabet);
                if c.exact_div(&g)?.is_some() {
                    self.charge(count)?;
                    return Ok(Some(g));
                }
            }
            // odometer step with incremental evaluation
            let mut i = 0;
            loop {
                if i == digits.len() {
                    self.charge(count)?;
                    return Ok(None);
                }
                let old = alphabet[digits[i]].1;
                digits[i] = (digits[i] + 1) % radix as usize;
                let new = alphabet[digits[i]].1;
                let delta = (new + m - old) % m;
                for (v, mv) in vals.iter_mut().zip(&mono_vals[i]) {
                    *v = ((*v as u128 + delta as u128 * *mv as u128) % m as u128) as u64;
                }
                if digits[i] != 0 {
                    break;
                }
                i += 1;
            }
            if count >= 1 << 16 {
                self.charge(count)?;
                count = 0;
            }
        }
    }
}

fn build_candidate(
    field: Field,
    lead: &Poly,
    lower: &[Monomial],
    digits: &[usize],
    alphabet: &[(Coeff, u64)],
) -> Poly {
    let extra = lower
        .iter()
        .zip(digits)
        .map(|(m, &d)| (m.clone(), alphabet[d].0.clone()));
    lead + &Poly::from_terms(field, extra)
}

/// Monomials of total degree `< e` in `vars`, respecting the per-variable
/// degrees of `c`.
fn lower_monomials(c: &Poly, vars: &[VarId], e: u32) -> Vec<Monomial> {
    let bounds: Vec<u32> = vars.iter().map(|&v| c.degree_in(v)).collect();
    let mut out = Vec::new();
    let mut exps = vec![0u32; vars.len()];
    fn rec(i: usize, left: u32, vars: &[VarId], bounds: &[u32], exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == vars.len() {
            out.push(Monomial::from_pairs(vars.iter().copied().zip(exps.iter().copied())));
            return;
        }
        for k in 0..=left.min(bounds[i]) {
            exps[i] = k;
            rec(i + 1, left - k, vars, bounds, exps, out);
        }
        exps[i] = 0;
    }
    if e > 0 {
        rec(0, e - 1, vars, &bounds, &mut exps, &mut out);
    }
    out.sort();
    out
}

/// Monic products of sub-multisets of `factors` with total degree `e`.
fn divisors_of_degree(field: Field, factors: &[(Poly, u32)], e: u32) -> Vec<Poly> {
    let mut out = BTreeSet::new();
    fn rec(field: Field, i: usize, left: u32, acc: Poly, factors: &[(Poly, u32)], out: &mut BTreeSet<Poly>) {
        if left == 0 {
            out.insert(acc);
            return;
        }
        if i == factors.len() {
            return;
        }
        let (p, m) = &factors[i];
        let d = p.degree().unwrap_or(0);
        let mut acc_k = acc;
        for k in 0..=*m {
            if k * d > left {
                break;
            }
            rec(field, i + 1, left - k * d, acc_k.clone(), factors, out);
            acc_k = &acc_k * p;
        }
    }
    rec(field, 0, e, Poly::one(field), factors, &mut out);
    out.into_iter().collect()
}

/// Evaluation points and alphabet shared by one search.
struct SearchContext {
    field: Field,
    modulus: u64,
    points: Vec<Vec<u64>>,
    vars: Vec<VarId>,
    /// Points where the integer image of `c` is nonzero; a divisor must be
    /// nonzero there too.
    nonzero_at: Vec<bool>,
    /// Leading coefficient of the primitive integer image of `c` (rationals).
    integer_lc: Option<BigInt>,
}

fn residue(field: Field, c: &Coeff, modulus: u64) -> u64 {
    match c {
        Coeff::Mod(x) => *x,
        Coeff::Rat(r) => {
            let n = bigint_mod(r.numer(), modulus);
            let d = bigint_mod(r.denom(), modulus);
            debug_assert!(field == Field::Rationals);
            ((n as u128 * pow_mod(d, modulus - 2, modulus) as u128) % modulus as u128) as u64
        }
    }
}

/// Scales a rational polynomial to a primitive integer polynomial with
/// positive leading coefficient.
fn primitive_integer(p: &Poly) -> Poly {
    let mut lcm = BigInt::one();
    for (_, c) in p.terms() {
        if let Some(r) = c.as_rational() {
            lcm = lcm.lcm(r.denom());
        }
    }
    let scaled = p.scale(&Coeff::Rat(BigRational::from_integer(lcm)));
    let mut content = BigInt::zero();
    for (_, c) in scaled.terms() {
        content = content.gcd(c.as_rational().expect("rational").numer());
    }
    if scaled.leading_coeff().is_some_and(Coeff::is_negative) {
        content = -content;
    }
    if content.is_zero() {
        return scaled;
    }
    scaled.scale(&Coeff::Rat(BigRational::new(BigInt::one(), content)))
}

impl SearchContext {
    fn new(field: Field, c: &Poly, vars: &[VarId]) -> Self {
        let (modulus, values): (u64, Vec<u64>) = match field {
            Field::Prime(q) => (q, (0..q).collect()),
            Field::Rationals => (RATIONAL_EVAL_MODULUS, vec![0, 1, 2, 3, RATIONAL_EVAL_MODULUS - 1, RATIONAL_EVAL_MODULUS - 2]),
        };
        let mut points: Vec<Vec<u64>> = vec![Vec::new()];
        for _ in vars {
            let mut next = Vec::new();
            'outer: for p in &points {
                for &v in &values {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                    if next.len() >= MAX_POINTS * values.len() {
                        break 'outer;
                    }
                }
            }
            points = next;
        }
        points.truncate(MAX_POINTS);
        let integer_image = match field {
            Field::Rationals => primitive_integer(c),
            Field::Prime(_) => c.clone(),
        };
        let integer_lc = integer_image
            .leading_coeff()
            .and_then(|c| c.as_rational())
            .map(|r| r.numer().clone());
        let mut ctx = SearchContext {
            field,
            modulus,
            points,
            vars: vars.to_vec(),
            nonzero_at: Vec::new(),
            integer_lc,
        };
        ctx.nonzero_at = ctx.eval_all(&integer_image).iter().map(|&v| v != 0).collect();
        ctx
    }

    fn eval_monomial(&self, m: &Monomial) -> Vec<u64> {
        self.points
            .iter()
            .map(|pt| {
                m.pairs().iter().fold(1u64, |acc, &(v, e)| {
                    let idx = self.vars.iter().position(|&w| w == v).expect("search variable");
                    ((acc as u128 * pow_mod(pt[idx], e as u64, self.modulus) as u128) % self.modulus as u128) as u64
                })
            })
            .collect()
    }

    fn eval_all(&self, p: &Poly) -> Vec<u64> {
        let mut out = vec![0u64; self.points.len()];
        for (m, c) in p.terms() {
            let r = residue(self.field, c, self.modulus);
            for (o, mv) in out.iter_mut().zip(self.eval_monomial(m)) {
                *o = ((*o as u128 + r as u128 * mv as u128) % self.modulus as u128) as u64;
            }
        }
        out
    }

    fn passes_filter(&self, vals: &[u64]) -> bool {
        vals.iter().zip(&self.nonzero_at).all(|(&v, &nz)| !nz || v != 0)
    }

    /// Coefficient alphabet paired with the residue used for evaluation.
    fn alphabet(&self, height: i64) -> Vec<(Coeff, u64)> {
        match self.field {
            Field::Prime(q) => (0..q).map(|x| (Coeff::Mod(x), x)).collect(),
            Field::Rationals => {
                let mut out = vec![(self.field.zero(), 0)];
                for k in 1..=height {
                    for s in [k, -k] {
                        let c = self.field.from_int(s);
                        let r = residue(self.field, &c, self.modulus);
                        out.push((c, r));
                    }
                }
                out
            }
        }
    }

    /// Leading forms to try for a monic top divisor: itself over a finite
    /// field; over the rationals, its primitive integer image times every
    /// admissible leading-coefficient multiplier.
    fn leading_forms(&self, top: &Poly, height: i64) -> Vec<Poly> {
        match self.field {
            Field::Prime(_) => vec![top.clone()],
            Field::Rationals => {
                let prim = primitive_integer(top);
                let lc = prim
                    .leading_coeff()
                    .and_then(|c| c.as_rational())
                    .map(|r| r.numer().clone())
                    .unwrap_or_else(BigInt::one);
                let target = self.integer_lc.clone().unwrap_or_else(BigInt::one).abs();
                (1..=height.max(1))
                    .filter(|&k| (target.clone() % (&lc * BigInt::from(k))).is_zero())
                    .map(|k| prim.scale(&self.field.from_int(k)))
                    .collect()
            }
        }
    }
}

impl Factorizer<'_> {
    /// True iff `a` has exactly one irreducible factor, counted with
    /// multiplicity.
    pub fn is_irreducible(&self, a: &Poly) -> Result<bool, PolyError> {
        if a.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if a.is_constant() {
            return Err(PolyError::Unit);
        }
        Ok(self.factor(a)?.count() == 1)
    }

    /// Monic gcd as the intersection of factor multisets; `gcd(a, 0)` is the
    /// normalization of `a`.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Result<Poly, PolyError> {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => Err(PolyError::ZeroPolynomial),
            (true, false) => Ok(b.normalize_unit()?.1),
            (false, true) => Ok(a.normalize_unit()?.1),
            (false, false) => {
                let fa = self.factor(a)?;
                let fb = self.factor(b)?;
                Ok(gcd_of_factorizations(self.field, &fa, &fb))
            }
        }
    }
}

/// Product of the common factors with minimal multiplicities.
pub fn gcd_of_factorizations(field: Field, a: &Factorization, b: &Factorization) -> Poly {
    a.factors.iter().fold(Poly::one(field), |acc, (p, m)| {
        let k = (*m).min(b.multiplicity(p));
        &acc * &p.pow(k)
    })
}

/// Integer-valued helper for callers that need a rational coefficient as `i64`.
pub fn small_integer(c: &Coeff) -> Option<i64> {
    match c {
        Coeff::Mod(x) => i64::try_from(*x).ok(),
        Coeff::Rat(r) if r.is_integer() => r.numer().to_i64(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const F2: Field = Field::Prime(2);

    fn var(f: Field, i: u32) -> Poly {
        Poly::var(f, VarId(i))
    }

    fn engine(f: Field) -> Factorizer<'static> {
        Factorizer::new(f, FactorBudget::default())
    }

    #[test]
    fn factors_over_f2() {
        let (x, y) = (var(F2, 0), var(F2, 1));
        let one = Poly::one(F2);
        let a = &(&(&(&x * &x) + &(&x * &y)) + &x) + &y;
        let f = engine(F2).factor(&a).unwrap();
        assert_eq!(f.unit, Coeff::Mod(1));
        let expected = Factorization::new(Coeff::Mod(1), [(&x + &one, 1), (&x + &y, 1)]);
        assert_eq!(f, expected);
        assert_eq!(f.expand(F2), a);
    }

    #[test]
    fn worked_example_is_prime() {
        // x5·x1 − x3², with ids 0, 1, 2 for subscripts 5, 1, 3
        let f = Field::Prime(2);
        let r = &(&var(f, 0) * &var(f, 1)) - &var(f, 2).pow(2);
        let fact = engine(f).factor(&r).unwrap();
        assert_eq!(fact.count(), 1);
        assert_eq!(fact.factors[0].0, r);
        let q = Field::Rationals;
        let r = &(&var(q, 0) * &var(q, 1)) - &var(q, 2).pow(2);
        assert_eq!(engine(q).factor(&r).unwrap().count(), 1);
    }

    #[test]
    fn constants_have_empty_factorization() {
        let f = engine(F2).factor(&Poly::one(F2)).unwrap();
        assert!(f.factors.is_empty());
        assert!(engine(F2).factor(&Poly::zero(F2)).is_err());
    }

    #[test]
    fn irreducibility() {
        let x = var(F2, 0);
        let one = Poly::one(F2);
        let e = engine(F2);
        assert!(e.is_irreducible(&x).unwrap());
        assert!(!e.is_irreducible(&x.pow(2)).unwrap());
        assert!(e.is_irreducible(&(&(&x.pow(2) + &x) + &one)).unwrap());
        assert!(!e.is_irreducible(&(&x.pow(2) + &one)).unwrap());
        assert!(matches!(e.is_irreducible(&one), Err(PolyError::Unit)));
    }

    #[test]
    fn gcd_examples() {
        let (x, y, z) = (var(F2, 0), var(F2, 1), var(F2, 2));
        let one = Poly::one(F2);
        let e = engine(F2);
        assert_eq!(e.gcd(&(&x * &y), &(&x * &z)).unwrap(), x);
        assert_eq!(e.gcd(&(&x * &y), &one).unwrap(), one);
        let a = &(&x + &one).pow(2) * &(&x + &y);
        let b = &(&x + &one) * &y;
        assert_eq!(e.gcd(&a, &b).unwrap(), &x + &one);
        assert_eq!(e.gcd(&a, &Poly::zero(F2)).unwrap(), a);
        assert!(e.gcd(&Poly::zero(F2), &Poly::zero(F2)).is_err());
    }

    #[test]
    fn univariate_over_f3() {
        let f3 = Field::Prime(3);
        let x = var(f3, 0);
        let one = Poly::one(f3);
        // (x² + 1) is irreducible over F3, (x + 1)(x + 2) = x² − 1
        let a = &(&x.pow(2) + &one) * &(&x.pow(2) - &one);
        let fact = engine(f3).factor(&a).unwrap();
        assert_eq!(fact.count(), 3);
        assert_eq!(fact.expand(f3), a);
    }

    #[test]
    fn rational_products() {
        let q = Field::Rationals;
        let (x, y) = (var(q, 0), var(q, 1));
        let two = Poly::from_int(q, 2);
        // (x − y)(x + y) and (2x + 1)(x·y + 3)
        let a = &x.pow(2) - &y.pow(2);
        let fa = engine(q).factor(&a).unwrap();
        assert_eq!(fa.count(), 2);
        let b = &(&(&two * &x) + &Poly::one(q)) * &(&(&x * &y) + &Poly::from_int(q, 3));
        let fb = engine(q).factor(&b).unwrap();
        assert_eq!(fb.count(), 2);
        assert_eq!(fb.unit, q.from_int(2));
        assert_eq!(fb.expand(q), b);
    }

    #[test]
    fn rational_budget_is_reported() {
        let q = Field::Rationals;
        let x = var(q, 0);
        // x⁴ + 1 has no rational factorization, but bounded search cannot prove it
        let a = &x.pow(4) + &Poly::one(q);
        assert!(matches!(
            engine(q).factor(&a),
            Err(PolyError::FactorizationIncomplete(_))
        ));
        // the top part x² + y² dehomogenizes to x² + 1, which has no rational root
        let (x, y) = (var(q, 0), var(q, 1));
        let b = &(&x.pow(2) + &y.pow(2)) + &Poly::one(q);
        assert_eq!(engine(q).factor(&b).unwrap().count(), 1);
        // cubic with the root 1/2
        let c = &(&(&Poly::from_int(q, 2) * &x) - &Poly::one(q)) * &(&x.pow(2) + &Poly::from_int(q, 5));
        let fc = engine(q).factor(&c).unwrap();
        assert_eq!(fc.count(), 2);
        assert_eq!(fc.expand(q), c);
    }

    #[test]
    fn hints_are_used() {
        let (x, y) = (var(F2, 0), var(F2, 1));
        let one = Poly::one(F2);
        let h = &(&(&x * &y) + &x.pow(3)) + &one;
        let a = &h * &(&y + &one);
        let hints = [h.clone()];
        let e = Factorizer::new(F2, FactorBudget::default()).with_hints(hints.iter());
        let fact = e.factor(&a).unwrap();
        assert_eq!(fact.multiplicity(&h), 1);
    }

    #[test]
    fn lower_monomials_respect_bounds() {
        let (x, y) = (var(F2, 0), var(F2, 1));
        let c = &x.pow(3) + &y;
        let ms = lower_monomials(&c, &[VarId(0), VarId(1)], 3);
        // degree < 3 with deg_y ≤ 1: 1, x, y, x², xy
        assert_eq!(ms.len(), 5);
    }
}
