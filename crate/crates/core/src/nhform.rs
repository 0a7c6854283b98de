//! Nearly holomorphic forms Σ_t c_t·Y^t with Y = 1/(−2iy).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::{binomial, Coefficient, Rational, Scalar};

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "C: Coefficient + Serialize + serde::de::DeserializeOwned")]
#[serde(from = "NHRepr<C>", into = "NHRepr<C>")]
pub struct NHForm<C: Coefficient> {
    weight: Rational,
    parts: BTreeMap<u32, C>,
}

#[derive(Serialize, Deserialize)]
struct NHRepr<C> {
    weight: Rational,
    parts: BTreeMap<u32, C>,
}

impl<C: Coefficient> From<NHRepr<C>> for NHForm<C> {
    fn from(r: NHRepr<C>) -> Self {
        NHForm::new(r.weight, r.parts)
    }
}

impl<C: Coefficient> From<NHForm<C>> for NHRepr<C> {
    fn from(f: NHForm<C>) -> Self {
        NHRepr {
            weight: f.weight,
            parts: f.parts,
        }
    }
}

impl<C: Coefficient> NHForm<C> {
    pub fn new(weight: Rational, parts: impl IntoIterator<Item = (u32, C)>) -> Self {
        let mut f = NHForm {
            weight,
            parts: BTreeMap::new(),
        };
        for (t, c) in parts {
            f.add_part(t, c);
        }
        f
    }

    /// The depth-0 form c of the given weight.
    pub fn holomorphic(weight: Rational, c: C) -> Self {
        NHForm::new(weight, [(0, c)])
    }

    pub fn zero(weight: Rational) -> Self {
        NHForm {
            weight,
            parts: BTreeMap::new(),
        }
    }

    fn add_part(&mut self, t: u32, c: C) {
        let merged = match self.parts.remove(&t) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !merged.is_zero() {
            self.parts.insert(t, merged);
        }
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn with_weight(mut self, weight: Rational) -> Self {
        self.weight = weight;
        self
    }

    pub fn parts(&self) -> &BTreeMap<u32, C> {
        &self.parts
    }

    pub fn part(&self, t: u32) -> Option<&C> {
        self.parts.get(&t)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Largest power of Y present; 0 for the zero form.
    pub fn depth(&self) -> u32 {
        self.parts.keys().next_back().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, c) in &other.parts {
            out.add_part(*t, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        NHForm {
            weight: self.weight.clone(),
            parts: self.parts.iter().map(|(t, c)| (*t, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        NHForm::new(
            self.weight.clone(),
            self.parts.iter().map(|(t, c)| (*t, c.scale(s))),
        )
    }

    pub fn scale_q(&self, r: &Rational) -> Self {
        self.scale(&Scalar::from(r.clone()))
    }

    /// Multiplication by Y; weight + 2.
    pub fn mul_y(&self) -> Self {
        self.mul_y_pow(1)
    }

    pub fn mul_y_pow(&self, n: u32) -> Self {
        NHForm {
            weight: &self.weight + Rational::integer(2 * n as i64),
            parts: self.parts.iter().map(|(t, c)| (t + n, c.clone())).collect(),
        }
    }

    /// Multiplication by (−Y)^n = (1/(2iy))^n.
    pub fn mul_neg_y_pow(&self, n: u32) -> Self {
        let f = self.mul_y_pow(n);
        if n % 2 == 1 {
            f.neg()
        } else {
            f
        }
    }

    /// δ_l = ∂_τ − l·Y, using δ_l(Y^t c) = Y^t·δ_{l−t} c.
    pub fn raise(&self, l: &Rational) -> Self {
        let mut out = NHForm::zero(&self.weight + Rational::integer(2));
        for (t, c) in &self.parts {
            let (a, b) = c.raise_split(&(l - Rational::integer(*t as i64)));
            out.add_part(*t, a);
            out.add_part(t + 1, b);
        }
        out
    }

    /// ∂_τ on the form (δ_0).
    pub fn derive(&self) -> Self {
        self.raise(&Rational::zero())
    }

    /// 4y²∂τ̄: Y^t c ↦ t·Y^{t−1}c + Y^t·(4y²∂τ̄ c); weight − 2.
    pub fn lower4(&self) -> Self {
        let mut out = NHForm::zero(&self.weight - Rational::integer(2));
        for (t, c) in &self.parts {
            if *t > 0 {
                out.add_part(t - 1, c.scale_q(&Rational::integer(*t as i64)));
            }
            let l = c.lower();
            out.add_part(*t, l);
        }
        out
    }

    /// Δ_l = 4δ_{l−2}y²∂τ̄ = raise(·, l−2)∘lower4.
    pub fn laplace(&self, l: &Rational) -> Self {
        self.lower4().raise(&(l - Rational::integer(2)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = NHForm::zero(&self.weight + &other.weight);
        for (t1, c1) in &self.parts {
            for (t2, c2) in &other.parts {
                out.add_part(t1 + t2, c1.mul(c2));
            }
        }
        out
    }

    /// δ_{m+2(s−1)}∘…∘δ_m, by iteration.
    pub fn delta_power(&self, m: &Rational, s: usize) -> Self {
        let mut f = self.clone();
        for i in 0..s {
            f = f.raise(&(m + Rational::integer(2 * i as i64)));
        }
        f
    }

    /// Closed form Σ_p C(s,p)·∏_{q=s−p}^{s−1}(m+q)·∂^{s−p}F·(1/(2iy))^p.
    pub fn delta_power_closed(&self, m: &Rational, s: usize) -> Self {
        let mut derivs = vec![self.clone()];
        for i in 0..s {
            let next = derivs[i].derive();
            derivs.push(next);
        }
        let target = &self.weight + Rational::integer(2 * s as i64);
        let mut out = NHForm::zero(target.clone());
        for p in 0..=s {
            let prod: Rational = (s - p..s)
                .map(|q| m + Rational::integer(q as i64))
                .product();
            let coeff = binomial(s, p) * prod;
            if coeff.is_zero() {
                continue;
            }
            let term = derivs[s - p].mul_neg_y_pow(p as u32).scale_q(&coeff);
            out = out.add(&term.with_weight(target.clone()));
        }
        out
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for NHForm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<weight {}> ", self.weight)?;
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match t {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})Y")?,
                _ => write!(f, "({c})Y^{t}")?,
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for NHForm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NHForm")
            .field("weight", &self.weight)
            .field("parts", &self.parts)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::SymCoeff;
    use crate::q;

    fn g(w: i64) -> NHForm<SymCoeff> {
        NHForm::holomorphic(q!(w), SymCoeff::generator(0, q!(w)))
    }

    #[test]
    fn raise_on_monomial() {
        let gy = g(4).mul_y_pow(2);
        let r = gy.raise(&q!(5));
        let gc = SymCoeff::generator(0, q!(4));
        assert_eq!(r.part(2), Some(&gc.derive().unwrap()));
        assert_eq!(r.part(3), Some(&gc.scale_q(&q!(-3))));
        assert_eq!(r.weight(), &q!(10));
    }

    #[test]
    fn raise_constant_at_zero() {
        let one = NHForm::holomorphic(q!(0), SymCoeff::one());
        assert!(one.raise(&q!(0)).is_zero());
    }

    #[test]
    fn lower_of_raise_is_minus_l() {
        let f = g(6);
        let r = f.raise(&q!(6)).lower4();
        assert_eq!(r, f.scale_q(&q!(-6)).with_weight(q!(6)));
        assert_eq!(g(6).mul_y().lower4(), g(6).with_weight(q!(6)));
    }

    #[test]
    fn raise_difference_is_mul_y() {
        let f = g(3).add(&g(3).mul_y_pow(2));
        let d = f.raise(&q!(1, 2)).sub(&f.raise(&q!(7, 3)));
        assert_eq!(d, f.mul_y().scale_q(&(q!(7, 3) - q!(1, 2))));
    }

    #[test]
    fn delta_power_example() {
        let f = g(2);
        let it = f.delta_power(&q!(2), 2);
        let cl = f.delta_power_closed(&q!(2), 2);
        assert_eq!(it, cl);
        let dg = SymCoeff::generator(0, q!(2)).derive().unwrap();
        assert_eq!(it.part(1), Some(&dg.scale_q(&q!(-6))));
        assert_eq!(f.delta_power(&q!(2), 0), f);
    }

    #[test]
    fn bol() {
        let f = g(-3);
        let b = f.delta_power(&q!(-3), 4);
        assert_eq!(b.depth(), 0);
        let mut d = f.clone();
        for _ in 0..4 {
            d = d.derive();
        }
        assert_eq!(b, d);
    }
}
