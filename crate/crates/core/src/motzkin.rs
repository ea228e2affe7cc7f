//! Motzkin's stratification `S_0 ⊆ S_1 ⊆ …` of truncated classical rings and
//! the minimal Euclidean norm `τ` it induces.
//!
//! `d ∈ S_α` iff every nonzero residue class modulo `d` meets `⋃_{β<α} S_β`.
//! For ℤ the least absolute remainder of a class has `|r| ≤ |d|/2`, and for
//! `F_q[t]` the remainder has degree below `deg d`; both lie inside the
//! truncation, so the truncated fixed point agrees with the untruncated `τ`
//! on every element it ranks. The element 0 is never ranked.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::ordinals::Ordinal;
use crate::polyfactor::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MotzkinError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model has {elements} elements, over the budget of {budget}")]
    TooLarge { elements: u64, budget: u64 },
    #[error("tau is undefined at 0")]
    Zero,
    #[error("stratification stalled with {0} unranked elements")]
    Stalled(usize),
}

/// A truncated Euclidean domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingModel {
    /// Integers with `1 ≤ |x| ≤ bound`.
    Integers { bound: u64 },
    /// Nonzero polynomials over `F_q` of degree at most `degree`.
    Polys { q: u64, degree: u32 },
}

impl RingModel {
    pub fn validate(&self) -> Result<(), MotzkinError> {
        match *self {
            RingModel::Integers { bound } if bound < 2 => {
                Err(MotzkinError::InvalidModel("integer bound must be at least 2".into()))
            }
            RingModel::Polys { q, .. } if Field::prime(q).is_err() => {
                Err(MotzkinError::InvalidModel(format!("{q} is not prime")))
            }
            RingModel::Polys { degree: 0, .. } => {
                Err(MotzkinError::InvalidModel("degree bound must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Number of nonzero elements, saturating.
    pub fn size(&self) -> u64 {
        match *self {
            RingModel::Integers { bound } => bound.saturating_mul(2),
            RingModel::Polys { q, degree } => q.saturating_pow(degree + 1).saturating_sub(1),
        }
    }
}

impl fmt::Display for RingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingModel::Integers { bound } => write!(f, "int:{bound}"),
            RingModel::Polys { q, degree } => write!(f, "poly:{q}:{degree}"),
        }
    }
}

impl FromStr for RingModel {
    type Err = MotzkinError;

    /// `int:N` or `poly:q:D`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MotzkinError::InvalidModel(format!("expected int:N or poly:q:D, got {s:?}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let model = match parts.as_slice() {
            ["int", n] => RingModel::Integers {
                bound: n.parse().map_err(|_| bad())?,
            },
            ["poly", q, d] => RingModel::Polys {
                q: q.parse().map_err(|_| bad())?,
                degree: d.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        model.validate()?;
        Ok(model)
    }
}

/// A nonzero element of a model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Int(i64),
    /// Coefficients from the constant term up, no trailing zeros.
    Poly(Vec<u64>),
}

impl Elem {
    /// Degree of a polynomial element, `|x|`'s bit length − 1 for an integer.
    pub fn size_rank(&self) -> u32 {
        match self {
            Elem::Int(x) => tau_int(*x).expect("nonzero"),
            Elem::Poly(c) => (c.len() - 1) as u32,
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Int(x) => write!(f, "{x}"),
            Elem::Poly(c) => {
                let mut first = true;
                for (i, a) in c.iter().enumerate().rev() {
                    if *a == 0 {
                        continue;
                    }
                    if !first {
                        f.write_str(" + ")?;
                    }
                    first = false;
                    match (i, *a) {
                        (0, a) => write!(f, "{a}")?,
                        (1, 1) => f.write_str("t")?,
                        (1, a) => write!(f, "{a}*t")?,
                        (i, 1) => write!(f, "t^{i}")?,
                        (i, a) => write!(f, "{a}*t^{i}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// `⌊log₂|x|⌋`.
pub fn tau_int(x: i64) -> Result<u32, MotzkinError> {
    if x == 0 {
        Err(MotzkinError::Zero)
    } else {
        Ok(63 - x.unsigned_abs().leading_zeros())
    }
}

/// Dense indexing of a model's elements and the arithmetic the fixed point
/// needs.
struct Space {
    model: RingModel,
}

impl Space {
    fn len(&self) -> usize {
        match self.model {
            RingModel::Integers { bound } => 2 * bound as usize + 1,
            RingModel::Polys { q, degree } => q.pow(degree + 1) as usize,
        }
    }

    fn is_zero_index(&self, i: usize) -> bool {
        match self.model {
            RingModel::Integers { bound } => i == bound as usize,
            RingModel::Polys { .. } => i == 0,
        }
    }

    fn elem(&self, i: usize) -> Elem {
        match self.model {
            RingModel::Integers { bound } => Elem::Int(i as i64 - bound as i64),
            RingModel::Polys { q, .. } => {
                let mut c = Vec::new();
                let mut n = i as u64;
                while n > 0 {
                    c.push(n % q);
                    n /= q;
                }
                Elem::Poly(c)
            }
        }
    }

    fn index(&self, e: &Elem) -> Option<usize> {
        match (self.model, e) {
            (RingModel::Integers { bound }, Elem::Int(x)) => {
                (x.unsigned_abs() <= bound).then(|| (x + bound as i64) as usize)
            }
            (RingModel::Polys { q, degree }, Elem::Poly(c)) => {
                if c.len() > degree as usize + 1 {
                    return None;
                }
                Some(c.iter().rev().fold(0u64, |acc, a| acc * q + a) as usize)
            }
            _ => None,
        }
    }

    fn is_unit(&self, i: usize) -> bool {
        match self.elem(i) {
            Elem::Int(x) => x.unsigned_abs() == 1,
            Elem::Poly(c) => c.len() == 1,
        }
    }

    /// In-bound members of every nonzero residue class modulo `d`, least
    /// remainder first. Empty for units.
    fn classes(&self, d: usize) -> Vec<Vec<usize>> {
        match self.model {
            RingModel::Integers { bound } => {
                let m = self.elem(d);
                let Elem::Int(m) = m else { unreachable!() };
                let m = m.unsigned_abs() as i64;
                let n = bound as i64;
                (1..m)
                    .map(|c| {
                        let r = if c > m / 2 { c - m } else { c };
                        let mut members = vec![r];
                        let mut k = 1;
                        loop {
                            let mut any = false;
                            for x in [r + k * m, r - k * m] {
                                if x.abs() <= n {
                                    members.push(x);
                                    any = true;
                                }
                            }
                            if !any {
                                break;
                            }
                            k += 1;
                        }
                        members.into_iter().map(|x| (x + n) as usize).collect()
                    })
                    .collect()
            }
            RingModel::Polys { q, degree } => {
                let Elem::Poly(dc) = self.elem(d) else { unreachable!() };
                let k = (dc.len() - 1) as u32;
                let remainders = q.pow(k) as usize;
                let multipliers = q.pow(degree - k + 1) as usize;
                let products: Vec<Vec<u64>> = (0..multipliers)
                    .map(|m| match self.elem(m) {
                        Elem::Poly(mc) => poly_mul(&mc, &dc, q),
                        Elem::Int(_) => unreachable!(),
                    })
                    .collect();
                (1..remainders)
                    .map(|r| {
                        let Elem::Poly(rc) = self.elem(r) else { unreachable!() };
                        products
                            .iter()
                            .map(|p| {
                                let s = poly_add(&rc, p, q);
                                self.index(&Elem::Poly(s)).expect("within degree bound")
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        let p = match (self.model, a, b) {
            (_, Elem::Int(x), Elem::Int(y)) => Elem::Int(x.checked_mul(*y)?),
            (RingModel::Polys { q, .. }, Elem::Poly(x), Elem::Poly(y)) => Elem::Poly(poly_mul(x, y, q)),
            _ => return None,
        };
        self.index(&p).map(|_| p)
    }
}

fn trim(mut c: Vec<u64>) -> Vec<u64> {
    while c.last() == Some(&0) {
        c.pop();
    }
    c
}

fn poly_add(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % q)
        .collect();
    trim(out)
}

fn poly_mul(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % q;
        }
    }
    trim(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataResult {
    pub model: RingModel,
    /// `τ` on every nonzero element of the truncation.
    pub rank: BTreeMap<Elem, u32>,
    /// One more than the largest attained rank.
    pub rho: Ordinal,
    /// `|S_α|` for `α = 0, 1, …` up to stabilization.
    pub levels: Vec<usize>,
}

impl StrataResult {
    pub fn rank_of(&self, e: &Elem) -> Option<u32> {
        self.rank.get(e).copied()
    }

    /// `element<TAB>rank` lines, header first.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("element\trank\n");
        for (e, r) in &self.rank {
            out.push_str(&format!("{e}\t{r}\n"));
        }
        out
    }

    /// Elements whose rank differs from the classical closed form
    /// (`⌊log₂|x|⌋` on ℤ, degree on `F_q[t]`).
    pub fn closed_form_violations(&self) -> Vec<(Elem, u32, u32)> {
        self.rank
            .iter()
            .filter(|(e, r)| e.size_rank() != **r)
            .map(|(e, r)| (e.clone(), *r, e.size_rank()))
            .collect()
    }

    pub fn summary_json(&self) -> Value {
        let violations: Vec<Value> = self
            .closed_form_violations()
            .into_iter()
            .map(|(e, got, want)| json!({"element": e.to_string(), "rank": got, "expected": want}))
            .collect();
        json!({
            "model": self.model.to_string(),
            "elements": self.rank.len(),
            "rho": self.rho.to_string(),
            "levels": self.levels,
            "type_check": type_check(self),
            "violations": violations,
        })
    }
}

/// Largest model [`stratify`] accepts by default.
pub const DEFAULT_MAX_ELEMENTS: u64 = 1 << 16;

/// Computes the stratification level by level until every element is ranked.
pub fn stratify(model: RingModel, max_elements: u64) -> Result<StrataResult, MotzkinError> {
    model.validate()?;
    let elements = model.size();
    if elements > max_elements {
        return Err(MotzkinError::TooLarge {
            elements,
            budget: max_elements,
        });
    }
    let space = Space { model };
    let n = space.len();
    let mut rank: Vec<Option<u32>> = vec![None; n];
    let mut pending: Vec<usize> = Vec::new();
    for i in 0..n {
        if space.is_zero_index(i) {
            continue;
        }
        if space.is_unit(i) {
            rank[i] = Some(0);
        } else {
            pending.push(i);
        }
    }
    let mut levels = vec![n - 1 - pending.len()];
    let mut classes: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    let mut alpha = 0u32;
    while !pending.is_empty() {
        alpha += 1;
        let mut joined = Vec::new();
        for &d in &pending {
            let cls = classes.entry(d).or_insert_with(|| space.classes(d));
            let ok = cls
                .iter()
                .all(|members| members.iter().any(|&m| rank[m].is_some_and(|r| r < alpha)));
            if ok {
                joined.push(d);
            }
        }
        if joined.is_empty() {
            return Err(MotzkinError::Stalled(pending.len()));
        }
        for &d in &joined {
            rank[d] = Some(alpha);
            classes.remove(&d);
        }
        pending.retain(|d| rank[*d].is_none());
        levels.push(n - 1 - pending.len());
    }
    let rank: BTreeMap<Elem, u32> = rank
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (space.elem(i), r)))
        .collect();
    Ok(StrataResult {
        model,
        rank,
        rho: Ordinal::finite(alpha + 1),
        levels,
    })
}

/// True iff the attained ranks are exactly `{0, 1, …, m}`.
pub fn type_check(result: &StrataResult) -> bool {
    let mut attained: Vec<u32> = result.rank.values().copied().collect();
    attained.sort_unstable();
    attained.dedup();
    !attained.is_empty() && attained.iter().enumerate().all(|(i, r)| i as u32 == *r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Every in-bound pair.
    Exhaustive,
    Random { pairs: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LenstraViolation {
    pub x: Elem,
    pub y: Elem,
    pub rank_x: u32,
    pub rank_y: u32,
    pub rank_xy: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LenstraReport {
    pub checked: u64,
    /// Pairs whose product leaves the truncation.
    pub skipped: u64,
    pub violations: Vec<LenstraViolation>,
}

/// Checks `rank(x·y) ≥ rank(x) + rank(y)` over pairs of ranked elements.
pub fn lenstra_check(result: &StrataResult, sampling: Sampling) -> LenstraReport {
    let space = Space {
        model: result.model,
    };
    let elems: Vec<(&Elem, u32)> = result.rank.iter().map(|(e, r)| (e, *r)).collect();
    let mut report = LenstraReport::default();
    let mut visit = |x: &Elem, rx: u32, y: &Elem, ry: u32| match space.mul(x, y) {
        Some(p) => {
            report.checked += 1;
            let rxy = result.rank_of(&p).expect("product is ranked");
            if rxy < rx + ry {
                report.violations.push(LenstraViolation {
                    x: x.clone(),
                    y: y.clone(),
                    rank_x: rx,
                    rank_y: ry,
                    rank_xy: rxy,
                });
            }
        }
        None => report.skipped += 1,
    };
    match sampling {
        Sampling::Exhaustive => {
            for &(x, rx) in &elems {
                for &(y, ry) in &elems {
                    visit(x, rx, y, ry);
                }
            }
        }
        Sampling::Random { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..pairs {
                let (x, rx) = elems[rng.gen_range(0..elems.len())];
                let (y, ry) = elems[rng.gen_range(0..elems.len())];
                visit(x, rx, y, ry);
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: u64) -> StrataResult {
        stratify(RingModel::Integers { bound: n }, DEFAULT_MAX_ELEMENTS).unwrap()
    }

    #[test]
    fn model_parsing() {
        assert_eq!("int:16".parse::<RingModel>().unwrap(), RingModel::Integers { bound: 16 });
        assert_eq!(
            "poly:3:4".parse::<RingModel>().unwrap(),
            RingModel::Polys { q: 3, degree: 4 }
        );
        assert!("int:1".parse::<RingModel>().is_err());
        assert!("poly:4:2".parse::<RingModel>().is_err());
        assert!("poly:2:0".parse::<RingModel>().is_err());
        assert!("mat:2".parse::<RingModel>().is_err());
        assert_eq!(RingModel::Polys { q: 2, degree: 8 }.size(), 511);
    }

    #[test]
    fn tau_int_values() {
        assert_eq!(tau_int(1), Ok(0));
        assert_eq!(tau_int(2), Ok(1));
        assert_eq!(tau_int(-5), Ok(2));
        assert_eq!(tau_int(1024), Ok(10));
        assert_eq!(tau_int(0), Err(MotzkinError::Zero));
    }

    #[test]
    fn smallest_integer_model() {
        let r = int(2);
        assert_eq!(r.rank_of(&Elem::Int(1)), Some(0));
        assert_eq!(r.rank_of(&Elem::Int(-1)), Some(0));
        assert_eq!(r.rank_of(&Elem::Int(2)), Some(1));
        assert_eq!(r.rank_of(&Elem::Int(-2)), Some(1));
        assert_eq!(r.rank_of(&Elem::Int(0)), None);
        assert_eq!(r.rho, Ordinal::finite(2u32));
    }

    #[test]
    fn integer_ranks_match_log2() {
        let r = int(300);
        assert!(r.closed_form_violations().is_empty());
        assert!(type_check(&r));
        assert_eq!(r.rank.len(), 600);
    }

    #[test]
    fn polynomial_ranks_are_degrees() {
        let r = stratify(RingModel::Polys { q: 2, degree: 3 }, DEFAULT_MAX_ELEMENTS).unwrap();
        assert_eq!(r.rank_of(&Elem::Poly(vec![1, 0, 0, 1])), Some(3));
        assert!(r.closed_form_violations().is_empty());
        let r = stratify(RingModel::Polys { q: 3, degree: 3 }, DEFAULT_MAX_ELEMENTS).unwrap();
        assert!(r.closed_form_violations().is_empty());
        assert_eq!(r.rank.len(), 80);
    }

    #[test]
    fn levels_grow_until_stable() {
        let r = int(64);
        assert!(r.levels.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*r.levels.last().unwrap(), r.rank.len());
        assert_eq!(r.levels.len(), 7);
    }

    #[test]
    fn type_check_rejects_gaps() {
        let mut r = int(8);
        assert!(type_check(&r));
        r.rank = BTreeMap::from([(Elem::Int(1), 0), (Elem::Int(2), 2)]);
        assert!(!type_check(&r));
        let f = stratify(RingModel::Polys { q: 2, degree: 8 }, DEFAULT_MAX_ELEMENTS).unwrap();
        assert!(type_check(&f));
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            stratify(RingModel::Integers { bound: 1000 }, 100),
            Err(MotzkinError::TooLarge { .. })
        ));
    }

    #[test]
    fn lenstra_instances() {
        let r = int(32);
        assert_eq!(r.rank_of(&Elem::Int(6)), Some(2));
        let rep = lenstra_check(&r, Sampling::Exhaustive);
        assert!(rep.violations.is_empty());
        assert!(rep.checked > 0 && rep.skipped > 0);
        assert_eq!(rep.checked + rep.skipped, 64 * 64);

        let f = stratify(RingModel::Polys { q: 2, degree: 4 }, DEFAULT_MAX_ELEMENTS).unwrap();
        let space = Space { model: f.model };
        for (x, rx) in &f.rank {
            for (y, ry) in &f.rank {
                if let Some(p) = space.mul(x, y) {
                    assert_eq!(f.rank_of(&p), Some(rx + ry));
                }
            }
        }
        let rep = lenstra_check(&f, Sampling::Random { pairs: 500, seed: 7 });
        assert_eq!(rep.checked + rep.skipped, 500);
        assert!(rep.violations.is_empty());
    }

    /// Every pair `(n, d)` admits a quotient `q` with `d | n` or
    /// `rank(n − q·d) < rank(d)`, searching quotients inside the truncation.
    #[test]
    fn rank_is_a_euclidean_norm() {
        let r = int(40);
        for n in -40i64..=40 {
            for d in (-40i64..=40).filter(|d| *d != 0) {
                if n % d == 0 {
                    continue;
                }
                let ok = (-80i64..=80).any(|q| {
                    let rem = n - q * d;
                    rem != 0 && rem.abs() <= 40 && r.rank_of(&Elem::Int(rem)).unwrap() < r.rank_of(&Elem::Int(d)).unwrap()
                });
                assert!(ok, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn tsv_and_json() {
        let r = int(4);
        let tsv = r.to_tsv();
        assert!(tsv.starts_with("element\trank\n"));
        assert!(tsv.contains("-4\t2\n"));
        let v = r.summary_json();
        assert_eq!(v["model"], "int:4");
        assert_eq!(v["rho"], "3");
        assert_eq!(v["violations"], json!([]));
        let p = Elem::Poly(vec![1, 2, 0, 1]);
        assert_eq!(p.to_string(), "t^3 + 2*t + 1");
    }
}
