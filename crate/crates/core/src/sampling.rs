//! Seeded random inputs for property suites.

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::eucworld::{RElement, Ring, RingError};
use crate::ordinals::Ordinal;
use crate::polyfactor::{Coeff, Field, Monomial, Poly, PolyError, VarId};

/// An ordinal below `ω^ω` with exponents `< max_exponent` and coefficients
/// `≤ max_coeff`; 0 is included.
pub fn random_ordinal<R: Rng>(rng: &mut R, max_exponent: u32, max_coeff: u32) -> Ordinal {
    let terms = (0..max_exponent).rev().filter_map(|e| {
        rng.gen_bool(0.5)
            .then(|| (Ordinal::finite(e), BigUint::from(rng.gen_range(1..=max_coeff))))
    });
    let terms: Vec<(Ordinal, BigUint)> = terms.collect();
    Ordinal::from_terms(terms)
}

fn random_coeff<R: Rng>(rng: &mut R, field: Field) -> Coeff {
    match field {
        Field::Prime(q) => field.from_int(rng.gen_range(1..q) as i64),
        Field::Rationals => {
            let c = rng.gen_range(1..=3i64);
            field.from_int(if rng.gen_bool(0.5) { c } else { -c })
        }
    }
}

/// All monomials in `vars` of total degree `1..=max_degree`.
pub fn monomials_up_to(vars: &[VarId], max_degree: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for &v in vars {
        let mut next = Vec::new();
        for m in &out {
            for e in 0..=(max_degree - m.degree()) {
                next.push(m.with_power(v, e));
            }
        }
        out = next;
    }
    out.retain(|m| !m.is_one());
    out.sort();
    out
}

/// A nonconstant polynomial in `vars` of total degree `≤ max_degree`, each
/// monomial present with probability ½ and a random constant term.
pub fn random_poly<R: Rng>(rng: &mut R, field: Field, vars: &[VarId], max_degree: u32) -> Poly {
    let monos = monomials_up_to(vars, max_degree);
    loop {
        let mut terms: Vec<(Monomial, Coeff)> = Vec::new();
        for m in &monos {
            if rng.gen_bool(0.5) {
                terms.push((m.clone(), random_coeff(rng, field)));
            }
        }
        if terms.is_empty() {
            continue;
        }
        if rng.gen_bool(0.5) {
            terms.push((Monomial::one(), random_coeff(rng, field)));
        }
        let p = Poly::from_terms(field, terms);
        if !p.is_constant() {
            return p;
        }
    }
}

/// Draws ring elements from a fixed set of generators.
#[derive(Clone, Debug)]
pub struct ElementSampler {
    pub vars: Vec<VarId>,
    pub max_vars: usize,
    pub max_degree: u32,
    /// Largest `k` of an extra `zᵏ` factor in the z-variant. 0 disables it.
    pub max_z_power: u32,
}

/// Upper bound on redraws when a factorization exceeds its budget.
const MAX_REDRAWS: usize = 64;

impl ElementSampler {
    /// Materializes `x[β, i]` for every listed `β` and `i < stages`.
    pub fn new(ring: &mut Ring, betas: &[Ordinal], stages: u32) -> Result<Self, RingError> {
        let mut vars = Vec::new();
        for beta in betas {
            for i in 0..stages {
                vars.push(ring.gen_var(beta, i)?);
            }
        }
        Ok(ElementSampler {
            vars,
            max_vars: 2,
            max_degree: 2,
            max_z_power: 0,
        })
    }

    /// A random nonconstant polynomial element with its factorization
    /// computed. Draws whose factorization exceeds the budget are redrawn.
    pub fn fresh<R: Rng>(&self, ring: &Ring, rng: &mut R) -> Result<RElement, RingError> {
        let field = ring.field();
        for _ in 0..MAX_REDRAWS {
            let k = rng.gen_range(1..=self.max_vars.min(self.vars.len()));
            let vars: Vec<VarId> = self.vars.choose_multiple(rng, k).copied().collect();
            let mut p = random_poly(rng, field, &vars, self.max_degree);
            if let (Some(z), true) = (ring.z_var(), self.max_z_power > 0) {
                if rng.gen_bool(0.5) {
                    let e = rng.gen_range(1..=self.max_z_power);
                    p = &p * &Poly::var(field, z).pow(e);
                }
            }
            let e = ring.element(p)?;
            match ring.factorization(&e) {
                Ok(_) => return Ok(e),
                Err(RingError::Poly(PolyError::FactorizationIncomplete(_))) => continue,
                Err(err) => return Err(err),
            }
        }
        Err(RingError::Poly(PolyError::FactorizationIncomplete(
            "sampler could not draw a factorizable element".into(),
        )))
    }

    /// A division input `(n, d)`: independent draws, pairs with a common
    /// factor, or earlier results from `pool`.
    pub fn pair<R: Rng>(
        &self,
        ring: &Ring,
        rng: &mut R,
        pool: &[RElement],
    ) -> Result<(RElement, RElement), RingError> {
        let pick = |rng: &mut R| -> Result<RElement, RingError> {
            match pool.choose(rng) {
                Some(e) if rng.gen_bool(0.5) => Ok(e.clone()),
                _ => self.fresh(ring, rng),
            }
        };
        match rng.gen_range(0..4) {
            0 => Ok((self.fresh(ring, rng)?, self.fresh(ring, rng)?)),
            1 => {
                let c = self.fresh(ring, rng)?;
                let a = self.fresh(ring, rng)?;
                let b = self.fresh(ring, rng)?;
                Ok((ring.mul(&a, &c)?, ring.mul(&b, &c)?))
            }
            2 => {
                let a = self.fresh(ring, rng)?;
                let b = self.fresh(ring, rng)?;
                Ok((ring.mul(&a, &b)?, pick(rng)?))
            }
            _ => Ok((pick(rng)?, pick(rng)?)),
        }
    }
}
