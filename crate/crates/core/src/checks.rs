//! Seeded property suites over every module, as run by `check all`.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eucworld::{
    nonmult_witness, DescentTrace, DivisionPath, DivisionResult, RElement, Ring, RingConfig,
    RingError,
};
use crate::motzkin::{self, RingModel, Sampling};
use crate::ordinals::Ordinal;
use crate::polyfactor::{FactorBudget, Factorization, Factorizer, Field, Poly, VarId};
use crate::sampling::{random_ordinal, random_poly, ElementSampler};

pub const DEFAULT_SEED: u64 = 1;

/// Outcome of one property suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        CheckReport {
            name: name.to_string(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Generators used by the base-ring suites (α = 2).
pub fn base_betas() -> Vec<Ordinal> {
    ["1", "2", "3", "5", "w", "w + 1", "w*2", "w*3 + 2", "w*7"]
        .iter()
        .map(|s| Ordinal::parse(s).expect("literal"))
        .collect()
}

/// Natural-sum algebra on random pairs and triples below `ω^ω`.
pub fn ordinal_algebra(seed: u64, pairs: usize) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new("ordinal natural sum algebra");
    for _ in 0..pairs {
        let a = random_ordinal(&mut rng, 5, 6);
        let b = random_ordinal(&mut rng, 5, 6);
        let c = random_ordinal(&mut rng, 5, 6);
        rep.check(a.nat_sum(&b) == b.nat_sum(&a), || format!("commutativity: {a}, {b}"));
        rep.check(
            a.nat_sum(&b).nat_sum(&c) == a.nat_sum(&b.nat_sum(&c)),
            || format!("associativity: {a}, {b}, {c}"),
        );
        rep.check(
            (a.nat_sum(&b) == a.nat_sum(&c)) == (b == c),
            || format!("cancellation: {a}, {b}, {c}"),
        );
        if b < c {
            rep.check(a.nat_sum(&b) < a.nat_sum(&c), || format!("monotonicity: {a}, {b}, {c}"));
        }
        rep.check(a.ord_add(&b) <= a.nat_sum(&b), || format!("ord_add bound: {a}, {b}"));
    }
    rep
}

/// Stratification of `int:bound` against `⌊log₂|x|⌋`.
pub fn integer_tau(bound: u64) -> Result<CheckReport, motzkin::MotzkinError> {
    let mut rep = CheckReport::new(&format!("tau on int:{bound}"));
    let r = motzkin::stratify(RingModel::Integers { bound }, motzkin::DEFAULT_MAX_ELEMENTS)?;
    for (e, rank) in &r.rank {
        let motzkin::Elem::Int(x) = e else { continue };
        rep.check(motzkin::tau_int(*x) == Ok(*rank), || format!("rank({x}) = {rank}"));
    }
    rep.check(r.rank.len() as u64 == 2 * bound, || "missing elements".into());
    rep.check(motzkin::type_check(&r), || "ranks are not an initial segment".into());
    Ok(rep)
}

/// Stratification of `F_q[t]` against the degree.
pub fn polynomial_degree(q: u64, degree: u32) -> Result<CheckReport, motzkin::MotzkinError> {
    let model = RingModel::Polys { q, degree };
    let mut rep = CheckReport::new(&format!("tau on {model}"));
    let r = motzkin::stratify(model, motzkin::DEFAULT_MAX_ELEMENTS)?;
    for (e, rank) in &r.rank {
        rep.check(e.size_rank() == *rank, || format!("rank({e}) = {rank}"));
    }
    rep.check(r.rank.len() as u64 == model.size(), || "missing elements".into());
    Ok(rep)
}

/// `rank(xy) ≥ rank(x) + rank(y)` on every in-bound pair of `int:bound`.
pub fn lenstra_int(bound: u64) -> Result<CheckReport, motzkin::MotzkinError> {
    let mut rep = CheckReport::new(&format!("lenstra on int:{bound}"));
    let r = motzkin::stratify(RingModel::Integers { bound }, motzkin::DEFAULT_MAX_ELEMENTS)?;
    let out = motzkin::lenstra_check(&r, Sampling::Exhaustive);
    rep.cases = out.checked;
    rep.failures = out
        .violations
        .iter()
        .map(|v| format!("rank({}·{}) = {} < {} + {}", v.x, v.y, v.rank_xy, v.rank_x, v.rank_y))
        .collect();
    Ok(rep)
}

/// Sub and φ of `x[5,0]·x[1,0] − x[3,0]²`.
pub fn worked_example() -> Result<CheckReport, RingError> {
    let mut rep = CheckReport::new("worked example");
    for field in [Field::Prime(2), Field::Prime(3), Field::Rationals] {
        let mut ring = Ring::new(RingConfig::base(field, Ordinal::one()))?;
        let r = ring.parse("x[5,0]*x[1,0] - x[3,0]^2")?;
        let subs: Vec<Ordinal> = ring.sub_of(&r)?.into_iter().collect();
        let want: Vec<Ordinal> = [1u32, 3, 5].into_iter().map(Ordinal::finite).collect();
        rep.check(subs == want, || format!("Sub over {}", field.name()));
        rep.check(ring.norm(&r)? == Ordinal::finite(5u32), || format!("φ over {}", field.name()));
        rep.check(ring.factorization(&r)?.count() == 1, || "not prime".into());
    }
    Ok(rep)
}

/// Divisions and Euclid traces drawn from a base ring over `F₂` with α = 2.
pub struct DescentRun {
    pub ring: Ring,
    pub divisions: Vec<DivisionResult>,
    pub traces: Vec<DescentTrace>,
}

const POOL_CAP: usize = 48;

pub fn descent_workload(seed: u64, divisions: usize, traces: usize) -> Result<DescentRun, RingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ring = Ring::new(RingConfig::base(Field::Prime(2), Ordinal::finite(2u32)))?;
    let mut sampler = ElementSampler::new(&mut ring, &base_betas(), 2)?;
    sampler.max_vars = 3;
    let mut pool: Vec<RElement> = Vec::new();
    let remember = |pool: &mut Vec<RElement>, e: &RElement| {
        if !e.is_zero() && !e.is_scalar() {
            if pool.len() == POOL_CAP {
                pool.remove(0);
            }
            pool.push(e.clone());
        }
    };
    let mut out = Vec::with_capacity(divisions);
    while out.len() < divisions {
        let (n, d) = sampler.pair(&ring, &mut rng, &pool)?;
        let res = ring.divide(&n, &d)?;
        remember(&mut pool, &res.quotient);
        remember(&mut pool, &res.remainder);
        out.push(res);
    }
    let mut ts = Vec::with_capacity(traces);
    while ts.len() < traces {
        let (a, b) = sampler.pair(&ring, &mut rng, &pool)?;
        let t = ring.euclid_gcd(&a, &b)?;
        if let Some(last) = t.steps.first() {
            remember(&mut pool, &last.remainder);
        }
        ts.push(t);
    }
    Ok(DescentRun {
        ring,
        divisions: out,
        traces: ts,
    })
}

/// `n·Πdens = (q·d + r)·Πdens` as polynomials.
pub fn division_identity(res: &DivisionResult) -> bool {
    let (n, q, d, r) = (&res.numerator, &res.quotient, &res.divisor, &res.remainder);
    let lhs = &(n.num() * q.den()) * &(d.den() * r.den());
    let qd = &(q.num() * d.num()) * r.den();
    let rr = &(r.num() * q.den()) * d.den();
    lhs == &(&qd + &rr) * n.den()
}

/// Descent, the general-path norm splitting, the division identity, the
/// order-type bound and agreement of Euclid with factor gcds.
pub fn descent(seed: u64, divisions: usize, traces: usize) -> Result<Vec<CheckReport>, RingError> {
    let run = descent_workload(seed, divisions, traces)?;
    let ring = &run.ring;
    let bound = ring.order_type();
    let mut desc = CheckReport::new("euclidean descent");
    let mut split = CheckReport::new("general-path norm splitting");
    let mut ident = CheckReport::new("division identity");
    let mut order = CheckReport::new("norms below the order type");
    let mut gcds = CheckReport::new("euclid agrees with factor gcd");
    let all_steps = run
        .divisions
        .iter()
        .chain(run.traces.iter().flat_map(|t| t.steps.iter()));
    for res in all_steps {
        desc.check(res.descends(), || ring.display(&res.numerator));
        ident.check(division_identity(res), || ring.display(&res.numerator));
        order.check(res.divisor_norm < bound, || res.divisor_norm.to_string());
        if let Some(r) = &res.remainder_norm {
            order.check(*r < bound, || r.to_string());
        }
        if res.path == DivisionPath::General {
            let g = res.general.as_ref().expect("general data");
            let y = Poly::var(ring.field(), res.adjoined_var.expect("quotient variable"));
            let s = ring.element(&g.reduced_num - &(&y * &g.reduced_den))?;
            let common = ring.element(g.common.clone())?;
            let want = ring.norm(&s)?.nat_sum(&ring.norm(&common)?);
            split.check(res.remainder_norm.as_ref() == Some(&want), || {
                format!("{} / {}", ring.display(&res.numerator), ring.display(&res.divisor))
            });
        }
    }
    for t in &run.traces {
        desc.check(t.strictly_decreasing(), || format!("{:?}", t.norms()));
        let first = &t.steps[0];
        let fg = ring.factor_gcd(&first.numerator, &first.divisor)?;
        gcds.check(ring.associated(&fg, &t.final_gcd)?, || ring.display(&t.final_gcd));
    }
    Ok(vec![desc, split, ident, order, gcds])
}

/// `φ(xy) = φ(x) ⊕ φ(y)` with the product refactored from scratch.
pub fn multiplicativity(seed: u64, products: usize) -> Result<CheckReport, RingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ring = Ring::new(RingConfig::base(Field::Prime(2), Ordinal::finite(2u32)))?;
    let mut sampler = ElementSampler::new(&mut ring, &base_betas(), 1)?;
    sampler.max_vars = 3;
    let mut rep = CheckReport::new("norm is additive on products");
    for _ in 0..products {
        let x = sampler.fresh(&ring, &mut rng)?;
        let y = sampler.fresh(&ring, &mut rng)?;
        let xy = ring.element(x.num() * y.num())?;
        let want = ring.norm(&x)?.nat_sum(&ring.norm(&y)?);
        rep.check(ring.norm(&xy)? == want, || ring.display(&xy));
    }
    Ok(rep)
}

/// Norms of `z`-powers, the non-multiplicativity witness and the growth of
/// the gap `φ(z^{2ℓ}) − 2φ(z^ℓ)`.
pub fn z_variant(max_k: u32) -> Result<CheckReport, RingError> {
    let ring = Ring::new(RingConfig::z_variant())?;
    let z = ring.gen_z()?;
    let mut rep = CheckReport::new("z-variant norms");
    let phi = |k: u32| -> Result<BigUint, RingError> {
        let n = ring.norm(&ring.pow(&z, k)?)?;
        Ok(n.as_natural().expect("finite"))
    };
    for k in 1..=max_k {
        rep.check(phi(k)? == BigUint::from(k).pow(k), || format!("φ(z^{k})"));
        let (lhs, rhs) = nonmult_witness(u64::from(k))?;
        rep.check(lhs < rhs, || format!("witness {k}"));
    }
    for i in 1..max_k {
        for j in 1..=(max_k - i) {
            let prod = ring.mul(&ring.pow(&z, i)?, &ring.pow(&z, j)?)?;
            let lhs = ring.norm(&prod)?;
            let rhs = Ordinal::finite(phi(i)?).nat_sum(&Ordinal::finite(phi(j)?));
            rep.check(lhs > rhs, || format!("superadditivity at ({i}, {j})"));
        }
    }
    let gap = |l: u32| -> Result<BigUint, RingError> { Ok(phi(2 * l)? - phi(l)? * 2u32) };
    for l in 1..max_k.min(7) - 1 {
        rep.check(gap(l)? < gap(l + 1)?, || format!("gap at {l}"));
    }
    Ok(rep)
}

/// `ψ(xy) = ψ(x) ⊕ ψ(y)` in the z-variant, with the product refactored.
pub fn monoid(seed: u64, products: usize) -> Result<CheckReport, RingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ring = Ring::new(RingConfig::z_variant())?;
    let betas: Vec<Ordinal> = (1u32..=4).map(Ordinal::finite).collect();
    let mut sampler = ElementSampler::new(&mut ring, &betas, 1)?;
    sampler.max_z_power = 3;
    let mut rep = CheckReport::new("monoid norm is additive");
    let z = ring.gen_z()?;
    for k in 1..=8u32 {
        let zk = ring.pow(&z, k)?;
        rep.check(
            ring.psi_monoid(&zk)? == Ordinal::omega().nat_scale(u64::from(k)),
            || format!("ψ(z^{k})"),
        );
    }
    for _ in 0..products {
        let x = sampler.fresh(&ring, &mut rng)?;
        let y = sampler.fresh(&ring, &mut rng)?;
        let xy = ring.element(x.num() * y.num())?;
        let want = ring.psi_monoid(&x)?.nat_sum(&ring.psi_monoid(&y)?);
        rep.check(ring.psi_monoid(&xy)? == want, || ring.display(&xy));
        rep.check(
            ring.norm(&xy)? >= ring.norm(&x)?.nat_sum(&ring.norm(&y)?),
            || format!("superadditivity of φ at {}", ring.display(&xy)),
        );
    }
    Ok(rep)
}

/// Whether some polynomial of degree `1..=deg(p)/2` in the variables of `p`
/// divides `p`, by enumerating every coefficient vector.
pub fn has_proper_divisor(p: &Poly) -> bool {
    let field = p.field();
    let Some(elements) = field.elements() else {
        panic!("exhaustive divisor search needs a finite field");
    };
    let vars: Vec<VarId> = p.vars().into_iter().collect();
    let half = p.degree().unwrap_or(0) / 2;
    if half == 0 {
        return false;
    }
    let mut monos = crate::sampling::monomials_up_to(&vars, half);
    monos.push(crate::polyfactor::Monomial::one());
    let q = elements.len();
    let total = (q as u128).pow(monos.len() as u32);
    (0..total).any(|code| {
        let mut c = code;
        let terms = monos.iter().map(|m| {
            let digit = (c % q as u128) as usize;
            c /= q as u128;
            (m.clone(), elements[digit].clone())
        });
        let g = Poly::from_terms(field, terms.collect::<Vec<_>>());
        !g.is_constant() && g.divides(p).unwrap_or(false)
    })
}

/// Random products of irreducibles over `F₂` (≤ 3 variables, factor degree
/// ≤ 3) factor back to the generating multiset.
pub fn factor_round_trip(seed: u64, count: usize) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = Field::Prime(2);
    let vars = [VarId(0), VarId(1), VarId(2)];
    let factorizer = Factorizer::new(field, FactorBudget::default());
    let mut rep = CheckReport::new("factorizer round trip over F2");
    for _ in 0..count {
        let parts = rng.gen_range(1..=3);
        let mut chosen = Vec::new();
        while chosen.len() < parts {
            let nv = rng.gen_range(1..=3);
            let deg = rng.gen_range(1..=3);
            let p = random_poly(&mut rng, field, &vars[..nv], deg);
            if !has_proper_divisor(&p) {
                chosen.push((p.normalize_unit().expect("nonzero").1, 1));
            }
        }
        let want = Factorization::new(field.one(), chosen);
        let product = want.expand(field);
        match factorizer.factor(&product) {
            Ok(got) => {
                rep.check(got.factors == want.factors, || product.to_string());
                for (f, _) in &got.factors {
                    rep.check(!has_proper_divisor(f), || format!("{f} is reducible"));
                }
            }
            Err(e) => rep.check(false, || format!("{product}: {e}")),
        }
    }
    rep
}

/// Every suite with its default size.
pub fn run_all(seed: u64) -> Result<Vec<CheckReport>, String> {
    let mut out = vec![ordinal_algebra(seed, 1000)];
    out.push(integer_tau(1024).map_err(|e| e.to_string())?);
    out.push(polynomial_degree(2, 8).map_err(|e| e.to_string())?);
    out.push(lenstra_int(256).map_err(|e| e.to_string())?);
    out.push(worked_example().map_err(|e| e.to_string())?);
    out.extend(descent(seed, 200, 50).map_err(|e| e.to_string())?);
    out.push(multiplicativity(seed, 500).map_err(|e| e.to_string())?);
    out.push(z_variant(8).map_err(|e| e.to_string())?);
    out.push(monoid(seed, 200).map_err(|e| e.to_string())?);
    out.push(factor_round_trip(seed, 200));
    Ok(out)
}
