use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{Rational, Scalar};
use crate::error::{Error, Result};

/// Generator of the free differential ring.
///
/// `Hol` is the p-th τ-derivative of an abstract holomorphic function.
/// `Eigen` is the j-th rung δ^j φ (j ≥ 0) or (4y²∂τ̄)^{−j} φ (j < 0) of an abstract
/// function φ of weight `weight` with Δ_weight φ = −μ φ.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Atom {
    Hol {
        gen: u32,
        weight: Rational,
        deriv: u32,
    },
    Eigen {
        gen: u32,
        weight: Rational,
        mu: Rational,
        step: i32,
    },
}

impl Atom {
    pub fn hol(gen: u32, weight: Rational) -> Atom {
        Atom::Hol {
            gen,
            weight,
            deriv: 0,
        }
    }

    pub fn eigen(gen: u32, weight: Rational, mu: Rational) -> Atom {
        Atom::Eigen {
            gen,
            weight,
            mu,
            step: 0,
        }
    }

    /// Weight at which the rewriting rules below act as δ; 0 for holomorphic atoms
    /// (so that δ_W = ∂).
    pub fn intrinsic_weight(&self) -> Rational {
        match self {
            Atom::Hol { .. } => Rational::zero(),
            Atom::Eigen { weight, step, .. } => weight + Rational::integer(2 * *step as i64),
        }
    }

    pub fn is_holomorphic(&self) -> bool {
        matches!(self, Atom::Hol { .. })
    }

    /// Eigenvalue ν_j with Δ G_j = −ν_j G_j: ν_j = μ + j·w + j(j−1).
    fn nu(weight: &Rational, mu: &Rational, j: i32) -> Rational {
        let j = j as i64;
        mu + &(weight * Rational::integer(j)) + Rational::integer(j * (j - 1))
    }

    fn with_step(&self, s: i32) -> Atom {
        match self {
            Atom::Eigen {
                gen, weight, mu, ..
            } => Atom::Eigen {
                gen: *gen,
                weight: weight.clone(),
                mu: mu.clone(),
                step: s,
            },
            a => a.clone(),
        }
    }

    /// δ at the intrinsic weight, as (scalar, atom).
    fn raise(&self) -> (Rational, Atom) {
        match self {
            Atom::Hol { gen, weight, deriv } => (
                Rational::one(),
                Atom::Hol {
                    gen: *gen,
                    weight: weight.clone(),
                    deriv: deriv + 1,
                },
            ),
            Atom::Eigen {
                weight, mu, step, ..
            } => {
                let next = self.with_step(step + 1);
                if *step >= 0 {
                    (Rational::one(), next)
                } else {
                    (-Atom::nu(weight, mu, step + 1), next)
                }
            }
        }
    }

    /// 4y²∂τ̄, as (scalar, atom); `None` when it vanishes.
    fn lower(&self) -> Option<(Rational, Atom)> {
        match self {
            Atom::Hol { .. } => None,
            Atom::Eigen {
                weight, mu, step, ..
            } => {
                let prev = self.with_step(step - 1);
                if *step <= 0 {
                    Some((Rational::one(), prev))
                } else {
                    Some((-Atom::nu(weight, mu, *step), prev))
                }
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Hol { gen, deriv, .. } => match deriv {
                0 => write!(f, "g{gen}"),
                p => write!(f, "g{gen}^({p})"),
            },
            Atom::Eigen { gen, step, .. } => write!(f, "G{gen}[{step}]"),
        }
    }
}

/// Product of atoms with positive exponents, sorted by atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(vec![])
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(a, 1)])
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    fn normalize(mut v: Vec<(Atom, u32)>) -> Self {
        v.retain(|(_, p)| *p > 0);
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Atom, u32)> = Vec::with_capacity(v.len());
        for (a, p) in v {
            match out.last_mut() {
                Some((b, q)) if *b == a => *q += p,
                _ => out.push((a, p)),
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Monomial::normalize(v)
    }

    pub fn intrinsic_weight(&self) -> Rational {
        self.0
            .iter()
            .map(|(a, p)| a.intrinsic_weight() * Rational::integer(*p as i64))
            .sum()
    }

    pub fn is_holomorphic(&self) -> bool {
        self.0.iter().all(|(a, _)| a.is_holomorphic())
    }

    /// Apply a rule to one factor at a time (Leibniz over the product).
    fn leibniz(&self, rule: impl Fn(&Atom) -> Option<(Rational, Atom)>) -> Vec<(Rational, Monomial)> {
        let mut out = Vec::new();
        for (i, (a, p)) in self.0.iter().enumerate() {
            let Some((c, b)) = rule(a) else { continue };
            let mut v = self.0.clone();
            v[i].1 -= 1;
            v.push((b, 1));
            out.push((c * Rational::integer(*p as i64), Monomial::normalize(v)));
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (a, p)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *p == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{p}")?;
            }
        }
        Ok(())
    }
}

/// Element of the free differential ring: Scalar-linear combination of monomials.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "SymRepr", into = "SymRepr")]
pub struct SymCoeff {
    terms: BTreeMap<Monomial, Scalar>,
}

#[derive(Serialize, Deserialize)]
struct SymTerm {
    coeff: Scalar,
    monomial: Monomial,
}

#[derive(Serialize, Deserialize)]
struct SymRepr {
    terms: Vec<SymTerm>,
}

impl From<SymRepr> for SymCoeff {
    fn from(r: SymRepr) -> Self {
        let mut s = SymCoeff::zero();
        for t in r.terms {
            let m = Monomial::normalize(t.monomial.0);
            s.add_term(m, &t.coeff);
        }
        s
    }
}

impl From<SymCoeff> for SymRepr {
    fn from(s: SymCoeff) -> Self {
        SymRepr {
            terms: s
                .terms
                .into_iter()
                .map(|(monomial, coeff)| SymTerm { coeff, monomial })
                .collect(),
        }
    }
}

impl SymCoeff {
    pub fn zero() -> Self {
        SymCoeff::default()
    }

    pub fn one() -> Self {
        SymCoeff::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut s = SymCoeff::zero();
        s.add_term(Monomial::one(), &c);
        s
    }

    pub fn atom(a: Atom) -> Self {
        let mut s = SymCoeff::zero();
        s.add_term(Monomial::atom(a), &Scalar::one());
        s
    }

    /// The holomorphic generator g_i of the given weight tag.
    pub fn generator(gen: u32, weight: Rational) -> Self {
        SymCoeff::atom(Atom::hol(gen, weight))
    }

    /// A Δ-eigenfunction generator: Δ_weight φ = −μ φ.
    pub fn eigen_generator(gen: u32, weight: Rational, mu: Rational) -> Self {
        SymCoeff::atom(Atom::eigen(gen, weight, mu))
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_default();
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|m| m.is_holomorphic())
    }

    pub fn scale(&self, s: &Scalar) -> SymCoeff {
        let mut out = SymCoeff::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &(c * s));
        }
        out
    }

    pub fn scale_q(&self, r: &Rational) -> SymCoeff {
        self.scale(&Scalar::from(r.clone()))
    }

    /// δ_m c split as R + Y·S, where R collects the intrinsic raises and
    /// S = Σ (W − m)·(part of intrinsic weight W).
    pub fn raise_split(&self, m: &Rational) -> (SymCoeff, SymCoeff) {
        let mut r = SymCoeff::zero();
        let mut s = SymCoeff::zero();
        for (mono, c) in &self.terms {
            for (k, m2) in mono.leibniz(|a| Some(a.raise())) {
                r.add_term(m2, &c.scale(&k));
            }
            let w = mono.intrinsic_weight() - m;
            s.add_term(mono.clone(), &c.scale(&w));
        }
        (r, s)
    }

    /// Coefficient-level 4y²∂τ̄ (a derivation; zero on holomorphic monomials).
    pub fn lower(&self) -> SymCoeff {
        let mut out = SymCoeff::zero();
        for (mono, c) in &self.terms {
            for (k, m2) in mono.leibniz(|a| a.lower()) {
                out.add_term(m2, &c.scale(&k));
            }
        }
        out
    }

    /// ∂_τ; defined when every monomial has intrinsic weight zero.
    pub fn derive(&self) -> Result<SymCoeff> {
        let (r, s) = self.raise_split(&Rational::zero());
        if s.is_zero() {
            Ok(r)
        } else {
            Err(Error::NonHolomorphic)
        }
    }
}

impl Add<&SymCoeff> for &SymCoeff {
    type Output = SymCoeff;
    fn add(self, rhs: &SymCoeff) -> SymCoeff {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub<&SymCoeff> for &SymCoeff {
    type Output = SymCoeff;
    fn sub(self, rhs: &SymCoeff) -> SymCoeff {
        self + &(-rhs)
    }
}

impl Neg for &SymCoeff {
    type Output = SymCoeff;
    fn neg(self) -> SymCoeff {
        SymCoeff {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul<&SymCoeff> for &SymCoeff {
    type Output = SymCoeff;
    fn mul(self, rhs: &SymCoeff) -> SymCoeff {
        let mut out = SymCoeff::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }
}

impl fmt::Display for SymCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SymCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn g(i: u32) -> SymCoeff {
        SymCoeff::generator(i, q!(4))
    }

    #[test]
    fn leibniz() {
        let a = g(0);
        let da = a.derive().unwrap();
        let prod = &a * &da;
        let dd = da.derive().unwrap();
        let expect = &(&da * &da) + &(&a * &dd);
        assert_eq!(prod.derive().unwrap(), expect);
        let h = g(1);
        assert_eq!(
            (&a * &h).derive().unwrap(),
            &(&da * &h) + &(&a * &h.derive().unwrap())
        );
    }

    #[test]
    fn eigen_ladder_laplacian() {
        // Δ_w φ = δ_{w−2}(4y²∂τ̄ φ) = −μ φ
        let w = q!(5, 3);
        let mu = q!(7, 2);
        let phi = SymCoeff::eigen_generator(0, w.clone(), mu.clone());
        let l = phi.lower();
        let (r, s) = l.raise_split(&(&w - &q!(2)));
        assert!(s.is_zero());
        assert_eq!(r, phi.scale_q(&-&mu));
    }

    #[test]
    fn eigen_commutator() {
        // L∘R_W − R_{W−2}∘L = −W on a rung of intrinsic weight W
        let phi = SymCoeff::eigen_generator(0, q!(3), q!(-2, 5));
        for steps in 0..3 {
            let mut x = phi.clone();
            for _ in 0..steps {
                x = x.raise_split(&q!(0)).0;
            }
            let w = q!(3) + q!(2 * steps);
            let lr = x.raise_split(&w).0.lower();
            let rl = x.lower().raise_split(&(&w - &q!(2))).0;
            assert_eq!(&lr - &rl, x.scale_q(&-&w));
        }
    }

    #[test]
    fn json_roundtrip() {
        let a = &g(0) * &g(1).derive().unwrap();
        let js = serde_json::to_string(&a).unwrap();
        let back: SymCoeff = serde_json::from_str(&js).unwrap();
        assert_eq!(back, a);
    }
}
