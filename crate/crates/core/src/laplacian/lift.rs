//! Lifts F_s = α_s·δ^{d−s}φ, their verification, and the associated
//! quasi-modular forms.

use serde::{Deserialize, Serialize};

use super::alpha::*;
use super::{eigenvalue_of, lap_closed};
use crate::error::{Error, Result};
use crate::exact::{binomial, rational_roots, Coefficient, Rational, SymCoeff, UniPoly};
use crate::nhform::NHForm;
use crate::quasimod::{QMForm, VVTuple};
use crate::vvops::TripleParams;

/// Residual ΔT + λT.
pub fn eigen_residual<C: Coefficient>(t: &VVTuple<C>, p: &TripleParams, lambda: &Rational) -> VVTuple<C> {
    let lap = lap_closed(t, p);
    let shifted = t.embed(lap.len()).expect("lap_closed lengthens").scale_q(lambda);
    lap.add(&shifted)
}

pub fn verify_eigen<C: Coefficient>(t: &VVTuple<C>, p: &TripleParams, lambda: &Rational) -> bool {
    eigen_residual(t, p, lambda).is_zero()
}

fn check_phi(prob: &LiftProblem, phi: &NHForm<SymCoeff>) -> Result<()> {
    let w = prob.phi_weight();
    if phi.weight() != &w {
        return Err(Error::WeightMismatch {
            expected: w,
            found: phi.weight().clone(),
        });
    }
    Ok(())
}

/// Coefficients α_0..α_d (or β_0..β_d) of the lift of φ at eigenvalue λ.
pub fn lift_alpha(prob: &LiftProblem, lambda: &Rational, phi: &NHForm<SymCoeff>) -> Result<Vec<Rational>> {
    check_phi(prob, phi)?;
    if prob.branch.b_zero {
        let sol = solve_beta(prob)?;
        if &sol.lambda != lambda {
            return Err(Error::NotARoot(lambda.clone()));
        }
        if let Some(order) = sol.annihilation_order {
            if !annihilated(prob, phi, order) {
                return Err(Error::NoLift(format!(
                    "phi is not annihilated by the {order}-th power of the raising operator"
                )));
            }
        }
        return Ok(sol.beta);
    }
    let mu = eigenvalue_of(phi)
        .ok_or_else(|| Error::Invalid("phi is neither meromorphic nor a Laplace eigenfunction".into()))?;
    if !mu.is_zero() && !prob.branch.mu_branch {
        return Err(Error::Misclassified(
            "non-meromorphic phi only lifts when (1-a)(k-2) = d".into(),
        ));
    }
    let sol = solve_alpha_at(prob, &mu)?;
    if !sol.poly.monic.eval(lambda).is_zero() {
        return Err(Error::NotARoot(lambda.clone()));
    }
    Ok(lift_coefficients(prob, lambda, &mu)?.alpha)
}

/// The side condition δ^{order}φ = 0 of the integer b = 0 case.
pub fn annihilated(prob: &LiftProblem, phi: &NHForm<SymCoeff>, order: usize) -> bool {
    phi.delta_power(&prob.phi_weight(), order).is_zero()
}

/// Tuple with F_s = coeffs[s]·δ^{d−s}φ.
pub fn assemble_lift<C: Coefficient>(prob: &LiftProblem, coeffs: &[Rational], phi: &NHForm<C>) -> VVTuple<C> {
    let d = prob.d;
    let w = prob.phi_weight();
    let comps = (0..=d)
        .map(|s| phi.delta_power(&w, d - s).scale_q(&coeffs[s]))
        .collect();
    VVTuple::new(prob.k.clone(), comps)
}

pub fn build_lift(prob: &LiftProblem, lambda: &Rational, phi: &NHForm<SymCoeff>) -> Result<VVTuple<SymCoeff>> {
    let alpha = lift_alpha(prob, lambda, phi)?;
    Ok(assemble_lift(prob, &alpha, phi))
}

/// ∂^p φ for p = 0..=n.
fn derivatives<C: Coefficient>(phi: &NHForm<C>, n: usize) -> Vec<NHForm<C>> {
    let mut out = vec![phi.clone()];
    for i in 0..n {
        let next = out[i].derive();
        out.push(next);
    }
    out
}

fn qm_from_terms<C: Coefficient>(
    k: &Rational,
    d: usize,
    terms: impl Fn(usize) -> Vec<(NHForm<C>, u32, Rational)>,
) -> QMForm<C> {
    let comps = (0..=d)
        .map(|r| {
            let w = k - Rational::from(2 * r);
            terms(r).into_iter().fold(NHForm::zero(w.clone()), |acc, (f, ypow, c)| {
                if c.is_zero() {
                    acc
                } else {
                    acc.add(&f.mul_y_pow(ypow).scale_q(&c).with_weight(w.clone()))
                }
            })
        })
        .collect();
    QMForm::new(k.clone(), comps)
}

/// f_r = Σ_p [Σ_s (−1)^{d−s−p}C(s,r)C(d−s,p)α_s∏_{i=p}^{d−s−1}(k−2d+i)]·∂^pφ·Y^{d−r−p}.
pub fn qm_from_alpha<C: Coefficient>(prob: &LiftProblem, alpha: &[Rational], phi: &NHForm<C>) -> QMForm<C> {
    let d = prob.d;
    let w = prob.phi_weight();
    let ders = derivatives(phi, d);
    qm_from_terms(&prob.k, d, |r| {
        (0..=d - r)
            .map(|p| {
                let c: Rational = (r..=d - p)
                    .map(|s| {
                        let sign = if (d - s - p) % 2 == 0 { Rational::one() } else { -Rational::one() };
                        let prod: Rational = (p..d - s).map(|i| &w + Rational::from(i)).product();
                        sign * binomial(s, r) * binomial(d - s, p) * &alpha[s] * prod
                    })
                    .sum();
                (ders[p].clone(), (d - r - p) as u32, c)
            })
            .collect()
    })
}

pub fn qm_eigen_output(prob: &LiftProblem, lambda: &Rational, phi: &NHForm<SymCoeff>) -> Result<QMForm<SymCoeff>> {
    let alpha = lift_alpha(prob, lambda, phi)?;
    Ok(qm_from_alpha(prob, &alpha, phi))
}

/// α_s = C(d,s)(b−c)^{d−s} / (b^{d−s}∏_{i=0}^{d−s−1}(k−2d+i)), the harmonic lift.
pub fn harmonic_alpha(prob: &LiftProblem) -> Vec<Rational> {
    let ratio = (&prob.params.b - &prob.params.c) / &prob.params.b;
    harmonic_with(prob, &ratio)
}

/// The same table with (b−c)^{d−s} in place of ((b−c)/b)^{d−s}; agrees with
/// [`harmonic_alpha`] only when b = 1.
pub fn harmonic_alpha_unscaled(prob: &LiftProblem) -> Vec<Rational> {
    let ratio = &prob.params.b - &prob.params.c;
    harmonic_with(prob, &ratio)
}

fn harmonic_with(prob: &LiftProblem, ratio: &Rational) -> Vec<Rational> {
    let d = prob.d;
    let w = prob.phi_weight();
    (0..=d)
        .map(|s| {
            let prod: Rational = (0..d - s).map(|i| &w + Rational::from(i)).product();
            binomial(d, s) * ratio.pow((d - s) as i32) / prod
        })
        .collect()
}

/// Harmonic lift (λ = 0, b ≠ 0, b ≠ c) as a quasi-modular form:
/// f_r = C(d,r)Σ_p C(d−r,p)(b−c)^p c^{d−r−p} / (b^{d−r}∏_{i<p}(k−2d+i))·∂^pφ·Y^{d−r−p}.
pub fn harmonic_qm<C: Coefficient>(prob: &LiftProblem, phi: &NHForm<C>) -> QMForm<C> {
    let d = prob.d;
    let (b, c) = (&prob.params.b, &prob.params.c);
    let bc = b - c;
    let w = prob.phi_weight();
    let ders = derivatives(phi, d);
    qm_from_terms(&prob.k, d, |r| {
        (0..=d - r)
            .map(|p| {
                let prod: Rational = (0..p).map(|i| &w + Rational::from(i)).product();
                let coef = binomial(d, r) * binomial(d - r, p) * bc.pow(p as i32) * c.pow((d - r - p) as i32)
                    / (b.pow((d - r) as i32) * prod);
                (ders[p].clone(), (d - r - p) as u32, coef)
            })
            .collect()
    })
}

/// b = c = 1, eigenvalue q(k−2d+q−1):
/// f_r = Σ_h C(q,h)C(d−h,r)∏_{i<h}(k−2d+q−1+i)/(k−2d+i)·δ^hφ·Y^{d−r−h}.
pub fn equal_bc_qm<C: Coefficient>(prob: &LiftProblem, q: usize, phi: &NHForm<C>) -> QMForm<C> {
    equal_bc_with(prob, q, phi, false)
}

/// As [`equal_bc_qm`] with the extra factor ∏_{i<h} 1/((1−a)(k−2)+1−d+i) that the
/// recursion produces.
pub fn equal_bc_qm_scaled<C: Coefficient>(prob: &LiftProblem, q: usize, phi: &NHForm<C>) -> QMForm<C> {
    equal_bc_with(prob, q, phi, true)
}

fn equal_bc_with<C: Coefficient>(prob: &LiftProblem, q: usize, phi: &NHForm<C>, scaled: bool) -> QMForm<C> {
    let d = prob.d;
    let w = prob.phi_weight();
    let m = &prob.branch.m;
    let deltas: Vec<NHForm<C>> = (0..=d).map(|h| phi.delta_power(&w, h)).collect();
    qm_from_terms(&prob.k, d, |r| {
        (0..=q.min(d - r))
            .map(|h| {
                let mut coef = binomial(q, h) * binomial(d - h, r);
                for i in 0..h {
                    let ir = Rational::from(i);
                    coef = coef * (&w + Rational::from(q) - Rational::one() + &ir) / (&w + &ir);
                    if scaled {
                        coef = coef / (m + Rational::one() - Rational::from(d) + &ir);
                    }
                }
                (deltas[h].clone(), (d - r - h) as u32, coef)
            })
            .collect()
    })
}

/// b = 0: f_r = C(d,r)Σ_h C(d−r,h)δ^hφ·Y^{d−r−h}∏_{i<h}1/((1−a)(k−2)+2−2d+i),
/// h ≤ d−1−j in the integer case.
pub fn b_zero_qm<C: Coefficient>(prob: &LiftProblem, phi: &NHForm<C>) -> QMForm<C> {
    let d = prob.d;
    let w = prob.phi_weight();
    let m = &prob.branch.m;
    let hmax = match prob.branch.beta_j {
        Some(j) => d - 1 - j as usize,
        None => d,
    };
    let deltas: Vec<NHForm<C>> = (0..=d).map(|h| phi.delta_power(&w, h)).collect();
    qm_from_terms(&prob.k, d, |r| {
        (0..=hmax.min(d - r))
            .map(|h| {
                let prod: Rational = (0..h)
                    .map(|i| m + Rational::integer(2 - 2 * d as i64 + i as i64))
                    .product();
                let coef = binomial(d, r) * binomial(d - r, h) / prod;
                (deltas[h].clone(), (d - r - h) as u32, coef)
            })
            .collect()
    })
}

/// Δ_{k−2s}F_s = −(d−s)(k−d−s−1)F_s for every component of a lift of meromorphic φ.
pub fn ladder_holds<C: Coefficient>(t: &VVTuple<C>, d: usize) -> bool {
    let k = t.weight();
    (0..=d).all(|s| {
        let f = t.comp(s as isize);
        let ev = Rational::from(d - s) * (k - Rational::from(d + s + 1));
        f.laplace(&(k - Rational::from(2 * s))).add(&f.scale_q(&ev)).is_zero()
    })
}

/// F_{s−1} = ξ_{s−1}·δ_{k−2s}F_s with ξ_{s−1} = α_{s−1}/α_s wherever α_s ≠ 0.
pub fn xi_structure_holds<C: Coefficient>(t: &VVTuple<C>, alpha: &[Rational]) -> bool {
    let k = t.weight();
    (1..alpha.len()).all(|s| {
        if alpha[s].is_zero() {
            return true;
        }
        let xi = &alpha[s - 1] / &alpha[s];
        let f = t.comp(s as isize);
        let raised = f.raise(&(k - Rational::from(2 * s)));
        t.comp(s as isize - 1).sub(&raised.scale_q(&xi)).is_zero()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthEigenvalues {
    pub d: usize,
    pub branch: Branch,
    /// Monic determinant of the coefficient system, degree d+1.
    pub poly: UniPoly,
    /// The factor whose roots can carry α_d = 1.
    pub lift_poly: UniPoly,
    pub rational_roots: Vec<Rational>,
    pub roots: Vec<RootInfo>,
}

impl DepthEigenvalues {
    pub fn liftable(&self) -> Vec<Rational> {
        self.roots.iter().filter(|r| r.liftable).map(|r| r.lambda.clone()).collect()
    }
}

/// Eigenvalue polynomials and their rational roots for d = 0..=depth_bound
/// (lifts of meromorphic forms).
pub fn enumerate_eigenvalues(params: &TripleParams, k: &Rational, depth_bound: usize) -> Result<Vec<DepthEigenvalues>> {
    (0..=depth_bound)
        .map(|d| {
            let prob = LiftProblem::new(params.clone(), k.clone(), d);
            if prob.branch.b_zero {
                let sol = solve_beta(&prob)?;
                let poly = UniPoly::linear_root(&sol.lambda);
                return Ok(DepthEigenvalues {
                    d,
                    branch: prob.branch.clone(),
                    lift_poly: poly.clone(),
                    poly,
                    rational_roots: vec![sol.lambda.clone()],
                    roots: vec![RootInfo {
                        lambda: sol.lambda,
                        multiplicity: 1,
                        liftable: sol.annihilation_order.is_none(),
                        extra_freedom: 0,
                    }],
                });
            }
            let sol = solve_alpha(&prob)?;
            let poly = char_poly(&prob, &Rational::zero());
            let roots = classify_roots(&prob, &poly, &Rational::zero())?;
            let report = rational_roots(&poly)?;
            if report.count_with_multiplicity() > d + 1 {
                return Err(Error::Internal(format!("more than {} roots at depth {d}", d + 1)));
            }
            Ok(DepthEigenvalues {
                d,
                branch: prob.branch.clone(),
                poly,
                lift_poly: sol.poly.monic,
                rational_roots: report.values(),
                roots,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn phi(prob: &LiftProblem) -> NHForm<SymCoeff> {
        let w = prob.phi_weight();
        NHForm::holomorphic(w.clone(), SymCoeff::generator(0, w))
    }

    fn triple(a: Rational, b: Rational) -> TripleParams {
        let c = (q!(1) - &a * &b) / (q!(1) - &a);
        TripleParams::new(a, b, c).unwrap()
    }

    #[test]
    fn generic_lifts_verify() {
        let p = triple(q!(1, 3), q!(5, 2));
        for d in 0..4 {
            let prob = LiftProblem::new(p.clone(), q!(29, 6), d);
            let ev = enumerate_eigenvalues(&p, &prob.k, d).unwrap();
            for lam in ev[d].liftable() {
                let t = build_lift(&prob, &lam, &phi(&prob)).unwrap();
                assert!(verify_eigen(&t, &p, &lam));
                assert!(ladder_holds(&t, d));
                let alpha = lift_alpha(&prob, &lam, &phi(&prob)).unwrap();
                assert!(xi_structure_holds(&t, &alpha));
                assert_eq!(qm_from_alpha(&prob, &alpha, &phi(&prob)), t.to_qm());
                // perturbation breaks it
                let mut bad = alpha.clone();
                bad[0] = &bad[0] + q!(1);
                if d > 0 {
                    assert!(!verify_eigen(&assemble_lift(&prob, &bad, &phi(&prob)), &p, &lam));
                }
            }
        }
    }

    #[test]
    fn harmonic_formula() {
        let p = triple(q!(1, 3), q!(5, 2));
        for d in 0..4 {
            let prob = LiftProblem::new(p.clone(), q!(29, 6), d);
            let alpha = lift_alpha(&prob, &q!(0), &phi(&prob)).unwrap();
            assert_eq!(alpha, harmonic_alpha(&prob));
            let t = build_lift(&prob, &q!(0), &phi(&prob)).unwrap();
            assert_eq!(harmonic_qm(&prob, &phi(&prob)), t.to_qm());
        }
        // with b = 1 the unscaled table coincides
        let prob = LiftProblem::new(TripleParams::shimura_maass(), q!(29, 6), 3);
        assert_eq!(harmonic_alpha_unscaled(&prob), harmonic_alpha(&prob));
    }

    #[test]
    fn depth_one_second_eigenvalue() {
        let p = triple(q!(-2), q!(3, 4));
        let prob = LiftProblem::new(p.clone(), q!(12), 1);
        let alpha = lift_alpha(&prob, &q!(10), &phi(&prob)).unwrap();
        let m = (q!(1) - &p.a) * q!(10);
        assert_eq!(alpha, vec![m.recip(), q!(1)]);
    }

    #[test]
    fn equal_bc_top_slot_harmonic() {
        let p = TripleParams::new(q!(1, 2), q!(1), q!(1)).unwrap();
        let prob = LiftProblem::new(p, q!(13), 3);
        let t = build_lift(&prob, &q!(0), &phi(&prob)).unwrap();
        for s in 0..3 {
            assert!(t.comp(s).is_zero());
        }
        assert_eq!(equal_bc_qm(&prob, 0, &phi(&prob)), t.to_qm());
    }

    #[test]
    fn equal_bc_higher_q() {
        let p = TripleParams::new(q!(1, 2), q!(1), q!(1)).unwrap();
        let d = 2;
        let prob = LiftProblem::new(p.clone(), q!(41, 3), d);
        let w = prob.phi_weight();
        for qq in 0..=d {
            let lam = Rational::from(qq) * (&w + Rational::from(qq) - q!(1));
            let t = build_lift(&prob, &lam, &phi(&prob)).unwrap();
            assert_eq!(equal_bc_qm_scaled(&prob, qq, &phi(&prob)), t.to_qm());
            let literal = equal_bc_qm(&prob, qq, &phi(&prob));
            assert_eq!(literal == t.to_qm(), qq == 0);
        }
    }

    #[test]
    fn b_zero_lifts() {
        for (a, d) in [(q!(0), 2usize), (q!(1, 3), 3), (q!(-1), 1)] {
            let p = TripleParams::new(a.clone(), q!(0), (q!(1) - &a).recip()).unwrap();
            let prob = LiftProblem::new(p.clone(), q!(17, 4), d);
            let sol = solve_beta(&prob).unwrap();
            let t = build_lift(&prob, &sol.lambda, &phi(&prob)).unwrap();
            assert!(verify_eigen(&t, &p, &sol.lambda));
            assert_eq!(b_zero_qm(&prob, &phi(&prob)), t.to_qm());
            // any φ works here, eigenfunction or not
            let w = prob.phi_weight();
            let g = NHForm::holomorphic(w.clone(), SymCoeff::eigen_generator(9, w, q!(3, 5)));
            let tg = assemble_lift(&prob, &sol.beta, &g);
            assert!(verify_eigen(&tg, &p, &sol.lambda));
        }
    }

    #[test]
    fn b_zero_integer_case_needs_annihilation() {
        // a = 0, c = 1: (1−a)(k−2) = d−1+j with d = 2, j = 1 → k = 4
        let p = TripleParams::holomorphic();
        let prob = LiftProblem::new(p, q!(4), 2);
        assert_eq!(prob.branch.kind, BranchKind::BZeroInteger);
        let sol = solve_beta(&prob).unwrap();
        assert_eq!(sol.annihilation_order, Some(1));
        assert!(build_lift(&prob, &sol.lambda, &phi(&prob)).is_err());
    }

    #[test]
    fn mu_branch_eigen_lift() {
        let p = triple(q!(-1), q!(2, 3));
        for d in 0..3usize {
            let k = q!(2) + Rational::from(d) / (q!(1) - &p.a);
            let prob = LiftProblem::new(p.clone(), k, d);
            let w = prob.phi_weight();
            let mu = q!(5, 7);
            let g = NHForm::holomorphic(w.clone(), SymCoeff::eigen_generator(10, w, mu.clone()));
            let bi = solve_alpha_mu(&prob).unwrap();
            let poly = bi.poly.at_mu(&mu);
            for lam in rational_roots(&poly).unwrap().values() {
                let t = build_lift(&prob, &lam, &g).unwrap();
                assert!(verify_eigen(&t, &p, &lam));
            }
            // a non-root fails both ways
            let lam = q!(1, 9);
            assert!(!bi.poly.eval(&lam, &mu).is_zero());
            assert!(build_lift(&prob, &lam, &g).is_err());
        }
    }

    #[test]
    fn mu_branch_depth_one_curve() {
        let p = triple(q!(1, 2), q!(3));
        let k = q!(2) + (q!(1) - &p.a).recip();
        let prob = LiftProblem::new(p.clone(), k, 1);
        let w = prob.phi_weight();
        let x = q!(2, 3);
        let (mu_x, lam_x) = depth_one_curve(&p);
        let (mu, lam) = (mu_x.eval(&x), lam_x.eval(&x));
        let g = NHForm::holomorphic(w.clone(), SymCoeff::eigen_generator(10, w.clone(), mu.clone()));
        let t = build_lift(&prob, &lam, &g).unwrap();
        assert!(verify_eigen(&t, &p, &lam));
        let (mu_t, lam_t) = depth_one_curve_unscaled(&p);
        let (mu2, lam2) = (mu_t.eval(&x), lam_t.eval(&x));
        let g2 = NHForm::holomorphic(w.clone(), SymCoeff::eigen_generator(10, w, mu2));
        assert!(build_lift(&prob, &lam2, &g2).is_err());
    }
}
