//! The Laplacian Δ^{(a,b,c)} = δ∘δ̄ on component tuples, its eigen-lifts and the
//! associated quasi-modular forms.
//!
//! Eigenvalues are taken with respect to −Δ: an eigenfunction T with eigenvalue
//! λ satisfies Δ T + λ T = 0.

mod alpha;
mod lift;

pub use alpha::*;
pub use lift::*;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Coefficient, Rational, SymCoeff};
use crate::nhform::NHForm;
use crate::quasimod::VVTuple;
use crate::vvops::{self, TripleParams};

/// J_s = (1−a)(k−2) − s + 1.
pub(crate) fn j_coeff(p: &TripleParams, k: &Rational, s: i64) -> Rational {
    (Rational::one() - &p.a) * (k - Rational::integer(2)) - Rational::integer(s) + Rational::one()
}

/// Closed form of Δ^{(a,b,c)} at ambient weight k; the result has length d+2.
///
/// Component s is bΔ_{k−2s}F_s + (b−c)(s+1)δ_{k−2−2s}F_{s+1}
/// + J_s·[s(b−c)F_s + b·4y²∂τ̄F_{s−1}].
pub fn lap_closed<C: Coefficient>(t: &VVTuple<C>, p: &TripleParams) -> VVTuple<C> {
    let k = t.weight();
    let bc = &p.b - &p.c;
    let comps = (0..=t.len() as isize)
        .map(|s| {
            let w = k - Rational::integer(2 * s as i64);
            let w2 = &w - Rational::integer(2);
            let js = j_coeff(p, k, s as i64);
            let fs = t.comp(s);
            let terms = [
                fs.lower4().raise(&w2).scale_q(&p.b),
                t.comp(s + 1)
                    .raise(&w2)
                    .scale_q(&(&bc * Rational::integer(s as i64 + 1))),
                fs.scale_q(&(&js * &bc * Rational::integer(s as i64))),
                t.comp(s - 1).lower4().scale_q(&(&js * &p.b)),
            ];
            terms
                .into_iter()
                .fold(NHForm::zero(w.clone()), |acc, f| acc.add(&f.with_weight(w.clone())))
        })
        .collect();
    VVTuple::new(k.clone(), comps)
}

/// Δ as the composition E∘F of the sl₂ operators, E taken at the weight of F(T).
pub fn lap_composed<C: Coefficient>(t: &VVTuple<C>, p: &TripleParams) -> VVTuple<C> {
    vvops::sl2_e(&vvops::sl2_f(t, p), p).with_weight(t.weight().clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftDirection {
    Up,
    Down,
}

/// Move between eigenfunctions along δ_l.
///
/// `Down`: h = δ_l g with Δ_{l+2}h = −κh; returns g = 4y²∂τ̄h / (−κ).
/// `Up`: h of weight l with Δ_l h = −κh; returns δ_l h / (−l−κ), whose image
/// under 4y²∂τ̄ is h again.
pub fn eigen_shift<C: Coefficient>(
    h: &NHForm<C>,
    l: &Rational,
    kappa: &Rational,
    direction: ShiftDirection,
) -> Result<NHForm<C>> {
    match direction {
        ShiftDirection::Down => {
            if kappa.is_zero() {
                return Err(Error::Degenerate(
                    "eigenvalue 0: a harmonic h is already meromorphic".into(),
                ));
            }
            Ok(h.lower4().scale_q(&(-kappa).recip()))
        }
        ShiftDirection::Up => {
            let den = -l - kappa;
            if den.is_zero() {
                return Err(Error::Degenerate(format!("eigenvalue {kappa} = −l")));
            }
            Ok(h.raise(l).scale_q(&den.recip()))
        }
    }
}

/// μ with Δ_w φ = −μφ, where w is the weight of φ; 0 for meromorphic φ.
pub fn eigenvalue_of(phi: &NHForm<SymCoeff>) -> Option<Rational> {
    let lap = phi.laplace(phi.weight());
    if lap.is_zero() {
        return Some(Rational::zero());
    }
    let (t, c) = phi.parts().iter().next()?;
    let (m, x) = c.terms().next()?;
    let y = lap
        .part(*t)
        .and_then(|lc| lc.terms().find(|(lm, _)| *lm == m).map(|(_, v)| v.clone()))?;
    let mu = -y.checked_div(x)?.as_rational()?;
    (lap == phi.scale_q(&-&mu)).then_some(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, random};

    #[test]
    fn closed_equals_composition() {
        let mut rng = random::rng(21);
        for i in 0..10 {
            let p = if i == 0 {
                TripleParams::shimura_maass()
            } else {
                random::triple(&mut rng)
            };
            let k = random::rational(&mut rng);
            let t = random::tuple(&mut rng, &k, 1 + i % 5, true);
            assert_eq!(lap_closed(&t, &p), lap_composed(&t, &p));
        }
    }

    #[test]
    fn holomorphic_depth_zero_is_harmonic() {
        let k = q!(12);
        let t = VVTuple::new(k.clone(), vec![NHForm::holomorphic(k.clone(), SymCoeff::generator(0, k))]);
        let p = random::triple(&mut random::rng(2));
        assert!(lap_closed(&t, &p).is_zero());
    }

    #[test]
    fn classical_laplacian_depth_zero() {
        let k = q!(5, 3);
        let f = random::nhform(&mut random::rng(4), k.clone(), 2, true);
        let t = VVTuple::new(k.clone(), vec![f.clone()]);
        let out = lap_closed(&t, &TripleParams::shimura_maass());
        assert_eq!(out.components()[0], f.laplace(&k));
    }

    #[test]
    fn shift_down_recovers_preimage() {
        let l = q!(7, 2);
        let nu = q!(5, 3);
        let g = NHForm::holomorphic(l.clone(), SymCoeff::eigen_generator(3, l.clone(), nu.clone()));
        assert_eq!(eigenvalue_of(&g), Some(nu.clone()));
        let h = g.raise(&l);
        assert_eq!(eigenvalue_of(&h), Some(&nu + &l));
        let back = eigen_shift(&h, &l, &(&nu + &l), ShiftDirection::Down).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn shift_up_inverts_lowering() {
        let l = q!(-3, 4);
        let nu = q!(2);
        let h = NHForm::holomorphic(l.clone(), SymCoeff::eigen_generator(4, l.clone(), nu.clone()));
        let g = eigen_shift(&h, &l, &nu, ShiftDirection::Up).unwrap();
        assert_eq!(g.lower4(), h);
    }

    #[test]
    fn shift_degenerate() {
        let l = q!(4);
        let phi = NHForm::holomorphic(l.clone(), SymCoeff::generator(0, l.clone()));
        assert_eq!(eigenvalue_of(&phi), Some(q!(0)));
        assert!(eigen_shift(&phi, &l, &q!(0), ShiftDirection::Down).is_err());
        assert!(eigen_shift(&phi, &l, &q!(-4), ShiftDirection::Up).is_err());
    }
}
