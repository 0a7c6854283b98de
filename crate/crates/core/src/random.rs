//! Seeded generators of random symbolic forms for identity checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exact::{Atom, Monomial, Rational, Scalar, SymCoeff};
use crate::nhform::NHForm;
use crate::quasimod::{QMForm, VVTuple};
use crate::vvops::TripleParams;

pub type SymRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SymRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small random rational with numerator in [−9, 9] and denominator in [1, 5].
pub fn rational(rng: &mut SymRng) -> Rational {
    Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

/// Random rational that is not an integer.
pub fn non_integer(rng: &mut SymRng) -> Rational {
    loop {
        let r = Rational::new(rng.gen_range(-40..=40), rng.gen_range(2..=7));
        if !r.is_integer() {
            return r;
        }
    }
}

fn nonzero_rational(rng: &mut SymRng) -> Rational {
    loop {
        let r = rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

/// Random triple with ab + (1−a)c = 1 and a ≠ 1.
pub fn triple(rng: &mut SymRng) -> TripleParams {
    loop {
        let a = rational(rng);
        if a.is_one() {
            continue;
        }
        let b = rational(rng);
        let c = (Rational::one() - &a * &b) / (Rational::one() - &a);
        if let Ok(p) = TripleParams::new(a, b, c) {
            return p;
        }
    }
}

fn random_atom(rng: &mut SymRng, allow_eigen: bool) -> Atom {
    if allow_eigen && rng.gen_bool(0.35) {
        // two fixed eigen-generators with distinct weights and eigenvalues
        let (gen, weight, mu) = if rng.gen_bool(0.5) {
            (10, Rational::new(3, 2), Rational::new(5, 3))
        } else {
            (11, Rational::integer(-2), Rational::new(-7, 4))
        };
        Atom::Eigen {
            gen,
            weight,
            mu,
            step: rng.gen_range(-1..=1),
        }
    } else {
        Atom::Hol {
            gen: rng.gen_range(0..3),
            weight: Rational::integer(0),
            deriv: rng.gen_range(0..3),
        }
    }
}

/// Random element of the free ring: a few monomials of degree ≤ 2.
pub fn sym_coeff(rng: &mut SymRng, allow_eigen: bool) -> SymCoeff {
    let mut c = SymCoeff::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let deg = rng.gen_range(1..=2);
        let mut m = Monomial::one();
        for _ in 0..deg {
            m = m.mul(&Monomial::atom(random_atom(rng, allow_eigen)));
        }
        let mut s = Scalar::from(nonzero_rational(rng));
        if rng.gen_bool(0.15) {
            s = s.shift(if rng.gen_bool(0.5) { 1 } else { -1 });
        }
        c.add_term(m, &s);
    }
    c
}

/// Random nearly holomorphic form with Y-degree at most `max_y`.
pub fn nhform(rng: &mut SymRng, weight: Rational, max_y: u32, allow_eigen: bool) -> NHForm<SymCoeff> {
    let mut parts: Vec<(u32, SymCoeff)> = Vec::new();
    for t in 0..=max_y {
        if rng.gen_bool(0.6) {
            parts.push((t, sym_coeff(rng, allow_eigen)));
        }
    }
    let f = NHForm::new(weight.clone(), parts);
    if f.is_zero() {
        NHForm::holomorphic(weight, sym_coeff(rng, allow_eigen))
    } else {
        f
    }
}

/// Random tuple of the given length with a nonzero top component.
pub fn tuple(rng: &mut SymRng, k: &Rational, len: usize, allow_eigen: bool) -> VVTuple<SymCoeff> {
    let comps = (0..len)
        .map(|s| {
            let w = k - Rational::integer(2 * s as i64);
            if s + 1 == len || rng.gen_bool(0.8) {
                nhform(rng, w, 1, allow_eigen)
            } else {
                NHForm::zero(w)
            }
        })
        .collect();
    VVTuple::new(k.clone(), comps)
}

/// Random quasi-modular form of exact depth `depth`.
pub fn qmform(rng: &mut SymRng, k: &Rational, depth: usize, allow_eigen: bool) -> QMForm<SymCoeff> {
    tuple(rng, k, depth + 1, allow_eigen).to_qm()
}
