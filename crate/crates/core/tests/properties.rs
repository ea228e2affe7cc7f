use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use transfinite_euclid::checks::{base_betas, descent_workload, division_identity};
use transfinite_euclid::eucworld::{Ring, RingConfig};
use transfinite_euclid::motzkin::{self, Elem, RingModel};
use transfinite_euclid::polyfactor::{
    parse_poly, Coeff, FactorBudget, Factorizer, Field, Monomial, Poly, VarId, VarToken,
};
use transfinite_euclid::sampling::ElementSampler;
use transfinite_euclid::Ordinal;

const EXPONENTS: [&str; 8] = ["0", "1", "2", "3", "w", "w + 1", "w*2", "w^2"];

fn ordinal() -> impl Strategy<Value = Ordinal> {
    prop::collection::vec((0..EXPONENTS.len(), 1u32..9), 0..5).prop_map(|terms| {
        let terms = terms
            .into_iter()
            .map(|(e, c)| (Ordinal::parse(EXPONENTS[e]).unwrap(), c.into()));
        Ordinal::from_terms(terms.collect::<Vec<_>>())
    })
}

const F3: Field = Field::Prime(3);

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), 0i64..3), 0..6).prop_map(|terms| {
        let terms = terms.into_iter().map(|((a, b, c), k)| {
            (
                Monomial::from_pairs([(VarId(0), a), (VarId(1), b), (VarId(2), c)]),
                F3.from_int(k),
            )
        });
        Poly::from_terms(F3, terms.collect::<Vec<_>>())
    })
}

/// Irreducible factors of each input, the way a ring supplies them when it
/// factors a product of known elements.
fn irreducible_parts(ps: &[&Poly]) -> Vec<Poly> {
    let fz = Factorizer::new(F3, FactorBudget::default());
    ps.iter()
        .flat_map(|p| fz.factor(p).unwrap().factors.into_iter().map(|(f, _)| f))
        .collect()
}

#[test]
fn hints_are_normalized_to_monic() {
    let v = |i| Poly::var(F3, VarId(i));
    let h = &Poly::one(F3) + &v(2).scale(&F3.from_int(2));
    let p = &h * &v(1);
    let fz = Factorizer::new(F3, FactorBudget::default()).with_hints([&h]);
    let f = fz.factor(&p).unwrap();
    assert!(f.factors.iter().all(|(q, _)| q.is_monic()));
    assert_eq!(f.expand(F3), p);
}

proptest! {
    #[test]
    fn natural_sum_is_a_commutative_cancellative_monoid(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.nat_sum(&b), b.nat_sum(&a));
        prop_assert_eq!(a.nat_sum(&b).nat_sum(&c), a.nat_sum(&b.nat_sum(&c)));
        prop_assert_eq!(a.nat_sum(&Ordinal::zero()), a.clone());
        prop_assert_eq!(a.nat_sum(&b) == a.nat_sum(&c), b == c);
    }

    #[test]
    fn natural_sum_is_strictly_monotone(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.nat_sum(&b).cmp(&a.nat_sum(&c)), b.cmp(&c));
        prop_assert!(a.ord_add(&b) <= a.nat_sum(&b));
        prop_assert!(a <= a.nat_sum(&b));
    }

    #[test]
    fn ordinal_text_round_trips(a in ordinal()) {
        let text = a.to_string();
        prop_assert_eq!(Ordinal::parse(&text).unwrap(), a.clone());
        prop_assert_eq!(Ordinal::parse(&text).unwrap().to_string(), text);
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Ordinal>(&json).unwrap(), a);
    }

    #[test]
    fn ordinal_order_is_total_and_antisymmetric(a in ordinal(), b in ordinal()) {
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        prop_assert_eq!(a == b, a.cmp(&b).is_eq());
    }

    #[test]
    fn polynomial_ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(F3), a.clone());
    }

    #[test]
    fn exact_division_inverts_multiplication(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        let ab = &a * &b;
        prop_assert_eq!(ab.exact_div(&b).unwrap(), Some(a));
    }

    #[test]
    fn factorization_round_trips(a in poly()) {
        prop_assume!(!a.is_zero());
        let f = Factorizer::new(F3, FactorBudget::default()).factor(&a).unwrap();
        prop_assert_eq!(f.expand(F3), a.clone());
        for (p, _) in &f.factors {
            prop_assert!(p.is_monic());
            prop_assert!(!p.is_constant());
        }
    }

    #[test]
    fn factorization_ignores_input_scaling(a in poly(), b in poly()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let hints = irreducible_parts(&[&a, &b]);
        let fz = Factorizer::new(F3, FactorBudget::default()).with_hints(&hints);
        let one = fz.factor(&(&a * &b)).unwrap();
        let two = fz.factor(&(&b.scale(&F3.from_int(2)) * &a)).unwrap();
        prop_assert_eq!(one.factors, two.factors);
    }

    #[test]
    fn gcd_divides_both_and_collects_common_factors(a in poly(), b in poly(), c in poly()) {
        prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
        let hints = irreducible_parts(&[&a, &b, &c]);
        let fz = Factorizer::new(F3, FactorBudget::default()).with_hints(&hints);
        let ac = &a * &c;
        let bc = &b * &c;
        let g = fz.gcd(&ac, &bc).unwrap();
        prop_assert!(g.divides(&ac).unwrap());
        prop_assert!(g.divides(&bc).unwrap());
        prop_assert!(c.divides(&g).unwrap());
    }

    #[test]
    fn poly_json_round_trips(a in poly()) {
        prop_assert_eq!(Poly::from_json(F3, &a.to_json()).unwrap(), a);
    }

    #[test]
    fn poly_text_round_trips(a in poly()) {
        let names = ["x[1,0]", "x[2,0]", "x[3,0]"];
        let text = a.display_with(|v| names[v.0 as usize].to_string());
        let back = parse_poly(&text, F3, |t| match t {
            VarToken::X { beta, .. } => Ok(VarId(beta.as_u64().unwrap() as u32 - 1)),
            _ => Err("unexpected".into()),
        })
        .unwrap();
        prop_assert_eq!(back, a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn base_norm_is_additive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ring = Ring::new(RingConfig::base(Field::Prime(2), Ordinal::finite(2u32))).unwrap();
        let sampler = ElementSampler::new(&mut ring, &base_betas(), 1).unwrap();
        let x = sampler.fresh(&ring, &mut rng).unwrap();
        let y = sampler.fresh(&ring, &mut rng).unwrap();
        let fresh = ring.element(x.num() * y.num()).unwrap();
        prop_assert_eq!(
            ring.norm(&fresh).unwrap(),
            ring.norm(&x).unwrap().nat_sum(&ring.norm(&y).unwrap())
        );
        prop_assert!(ring.norm(&fresh).unwrap() < ring.order_type());
    }

    #[test]
    fn variant_norm_is_superadditive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ring = Ring::new(RingConfig::z_variant()).unwrap();
        let betas: Vec<Ordinal> = (1u32..=3).map(Ordinal::finite).collect();
        let mut sampler = ElementSampler::new(&mut ring, &betas, 1).unwrap();
        sampler.max_z_power = 3;
        let x = sampler.fresh(&ring, &mut rng).unwrap();
        let y = sampler.fresh(&ring, &mut rng).unwrap();
        let xy = ring.mul(&x, &y).unwrap();
        let sum = ring.norm(&x).unwrap().nat_sum(&ring.norm(&y).unwrap());
        let z = ring.z_var().unwrap();
        let both_z = x.num().degree_in(z) > 0 && y.num().degree_in(z) > 0;
        if both_z {
            prop_assert!(ring.norm(&xy).unwrap() > sum);
        } else {
            prop_assert!(ring.norm(&xy).unwrap() >= sum);
        }
        prop_assert_eq!(
            ring.psi_monoid(&xy).unwrap(),
            ring.psi_monoid(&x).unwrap().nat_sum(&ring.psi_monoid(&y).unwrap())
        );
    }

    #[test]
    fn divisions_descend_and_satisfy_the_identity(seed in any::<u64>()) {
        let run = descent_workload(seed, 20, 4).unwrap();
        for res in run.divisions.iter().chain(run.traces.iter().flat_map(|t| t.steps.iter())) {
            prop_assert!(res.descends());
            prop_assert!(division_identity(res));
            prop_assert_eq!(run.ring.canonicalize(&res.remainder), res.remainder.clone());
            prop_assert_eq!(run.ring.canonicalize(&res.quotient), res.quotient.clone());
        }
        for t in &run.traces {
            prop_assert!(t.strictly_decreasing());
        }
    }

    #[test]
    fn special_primes_take_the_truncated_norm(seed in any::<u64>()) {
        let run = descent_workload(seed, 20, 0).unwrap();
        for s in run.ring.specials() {
            let e = run.ring.element(s.n.clone()).unwrap();
            let d = run.ring.element(s.d.clone()).unwrap();
            let phi_d = run.ring.norm(&d).unwrap();
            let info = run.ring.var_info(s.var).unwrap();
            let want = info.subs.iter().filter(|b| **b < phi_d).max().unwrap().clone();
            prop_assert_eq!(&s.norm, &want);
            prop_assert!(run.ring.norm(&e).unwrap() >= phi_d);
            let prime = run.ring.element(s.prime.clone()).unwrap();
            prop_assert_eq!(run.ring.norm(&prime).unwrap(), want);
        }
    }
}

#[test]
fn indecomposables_below_omega_times_five() {
    let below = |i: u32, j: u32| Ordinal::omega().nat_scale(u64::from(i)).nat_sum(&Ordinal::finite(j));
    let all: Vec<Ordinal> = (0..5).flat_map(|i| (0..12).map(move |j| below(i, j))).collect();
    for a in &all {
        let split = all
            .iter()
            .filter(|b| *b < a)
            .any(|b| all.iter().filter(|c| *c < a).any(|c| b.ord_add(c) == *a));
        assert_eq!(a.is_indecomposable(), !a.is_zero() && !split, "{a}");
    }
}

/// Every nonzero class modulo `d` has a member of smaller rank, and the
/// largest class minimum is exactly `rank(d) − 1`.
#[test]
fn stratification_is_minimal_within_the_truncation() {
    let n = 96i64;
    let r = motzkin::stratify(RingModel::Integers { bound: n as u64 }, 1 << 16).unwrap();
    let rank = |x: i64| r.rank_of(&Elem::Int(x)).unwrap();
    for d in (-n..=n).filter(|d| d.abs() > 1) {
        let m = d.abs();
        let class_min = |c: i64| {
            (-n..=n)
                .filter(|x| *x != 0 && x.rem_euclid(m) == c)
                .map(rank)
                .min()
                .unwrap()
        };
        let worst = (1..m).map(class_min).max().unwrap();
        assert_eq!(worst + 1, rank(d), "d = {d}");
    }
    for u in [-1, 1] {
        assert_eq!(rank(u), 0);
    }
}

#[test]
fn polynomial_stratification_is_minimal() {
    let q = 3u64;
    let r = motzkin::stratify(RingModel::Polys { q, degree: 3 }, 1 << 16).unwrap();
    let ranks: BTreeMap<Elem, u32> = r.rank.clone();
    for (e, rk) in &ranks {
        let Elem::Poly(c) = e else { unreachable!() };
        let units = c.len() == 1;
        assert_eq!(*rk == 0, units);
    }
    assert!(motzkin::type_check(&r));
    assert_eq!(r.rho, Ordinal::finite(4u32));
    let levels = &r.levels;
    assert!(levels.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn coefficient_helpers_agree() {
    assert_eq!(F3.from_int(-1), Coeff::Mod(2));
}

