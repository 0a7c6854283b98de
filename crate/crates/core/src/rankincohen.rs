//! Rankin–Cohen brackets of quasi-modular forms.
//!
//! For f of weight k, depth ≤ d and g of weight l, depth ≤ e the bracket is
//! Σ_r C(n,r)·a_r·∂^r f·∂^{n−r} g, where the a_r solve
//! a_s(l−e+n−s−1) + a_{s+1}(k−d+s) = 0 for 0 ≤ s < n.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binomial, linalg, Coefficient, Rational, SymCoeff};
use crate::nhform::NHForm;
use crate::quasimod::QMForm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RCParams {
    pub n: usize,
    pub k: Rational,
    pub d: usize,
    pub l: Rational,
    pub e: usize,
}

impl RCParams {
    pub fn new(n: usize, k: Rational, d: usize, l: Rational, e: usize) -> Self {
        RCParams { n, k, d, l, e }
    }

    fn kd(&self) -> Rational {
        &self.k - Rational::from(self.d)
    }

    fn le(&self) -> Rational {
        &self.l - Rational::from(self.e)
    }
}

/// Solutions {a_r} of the coefficient system: one vector, or two in the
/// excluded case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RCCoeffs {
    pub basis: Vec<Vec<Rational>>,
    /// Dimension of the solution space as computed by exact elimination.
    pub kernel_dim: usize,
}

impl RCCoeffs {
    pub fn primary(&self) -> &[Rational] {
        &self.basis[0]
    }

    /// Coefficients C(n,r)·a_r of ∂^r f ⊗ ∂^{n−r} g for the given basis element.
    pub fn bracket_coefficients(&self, which: usize) -> Vec<Rational> {
        let a = &self.basis[which];
        let n = a.len() - 1;
        a.iter()
            .enumerate()
            .map(|(r, x)| binomial(n, r) * x)
            .collect()
    }
}

/// d − k as a non-negative integer, if it is one.
fn nonneg_int(x: &Rational) -> Option<i64> {
    x.to_i64().filter(|v| *v >= 0)
}

pub fn rc_is_excluded(p: &RCParams) -> bool {
    let (Some(x), Some(y)) = (nonneg_int(&-p.kd()), nonneg_int(&-p.le())) else {
        return false;
    };
    let n = p.n as i64;
    n > x.max(y) && n <= x + y + 1
}

/// The n × (n+1) matrix of the coefficient system.
pub fn rc_system(p: &RCParams) -> Vec<Vec<Rational>> {
    let (kd, le) = (p.kd(), p.le());
    let n = p.n;
    (0..n)
        .map(|s| {
            let mut row = vec![Rational::zero(); n + 1];
            row[s] = &le + Rational::from(n) - Rational::from(s + 1);
            row[s + 1] = &kd + Rational::from(s);
            row
        })
        .collect()
}

/// a_r = (−1)^r ∏_{j=r}^{n−1}(k−d+j) ∏_{q=n−r}^{n−1}(l−e+q).
pub fn rc_closed_form(p: &RCParams) -> Vec<Rational> {
    let (kd, le) = (p.kd(), p.le());
    let n = p.n;
    (0..=n)
        .map(|r| {
            let a: Rational = (r..n).map(|j| &kd + Rational::from(j)).product();
            let b: Rational = (n - r..n).map(|q| &le + Rational::from(q)).product();
            let sign = if r % 2 == 0 { Rational::one() } else { -Rational::one() };
            sign * a * b
        })
        .collect()
}

/// m! for m ≥ 0, `None` for negative arguments.
fn fact(m: i64) -> Option<Rational> {
    (m >= 0).then(|| crate::exact::factorial(m as usize))
}

/// The two basis vectors of the excluded case.
pub fn rc_excluded_basis(p: &RCParams) -> Option<[Vec<Rational>; 2]> {
    if !rc_is_excluded(p) {
        return None;
    }
    let x = nonneg_int(&-p.kd())?;
    let y = nonneg_int(&-p.le())?;
    let n = p.n as i64;
    let entry = |num: [i64; 2], den: [i64; 2]| -> Rational {
        match (fact(num[0]), fact(num[1]), fact(den[0]), fact(den[1])) {
            (Some(a), Some(b), Some(c), Some(d)) => a * b / (c * d),
            _ => Rational::zero(),
        }
    };
    let first = (0..=n)
        .map(|r| {
            if r >= x + 1 {
                entry([n - 1 - x, y + r - n], [r - 1 - x, y])
            } else {
                Rational::zero()
            }
        })
        .collect();
    let second = (0..=n)
        .map(|r| {
            if r <= n - y - 1 {
                entry([n - 1 - y, x - r], [n - 1 - r - y, x])
            } else {
                Rational::zero()
            }
        })
        .collect();
    Some([first, second])
}

fn proportional(u: &[Rational], v: &[Rational]) -> bool {
    let Some(i) = v.iter().position(|x| !x.is_zero()) else {
        return u.iter().all(|x| x.is_zero());
    };
    let ratio = &u[i] / &v[i];
    u.iter().zip(v).all(|(a, b)| *a == &ratio * b)
}

/// Solve the coefficient system exactly and normalize the basis.
pub fn rc_solve(p: &RCParams) -> Result<RCCoeffs> {
    let system = rc_system(p);
    let kernel = linalg::nullspace(&system, p.n + 1);
    let kernel_dim = kernel.len();
    let excluded = rc_is_excluded(p);
    let basis = if excluded {
        let [u, v] = rc_excluded_basis(p).expect("excluded case");
        let stacked = vec![u.clone(), v.clone()];
        if kernel_dim != 2 || linalg::rank(&stacked) != 2 {
            return Err(Error::Internal(format!(
                "excluded case with kernel dimension {kernel_dim}"
            )));
        }
        vec![u, v]
    } else {
        let closed = rc_closed_form(p);
        if kernel_dim != 1 || !proportional(&kernel[0], &closed) {
            return Err(Error::Internal(format!(
                "kernel dimension {kernel_dim} does not match the closed form"
            )));
        }
        vec![closed]
    };
    for b in &basis {
        let residual = system.iter().any(|row| {
            let s: Rational = row.iter().zip(b).map(|(x, y)| x * y).sum();
            !s.is_zero()
        });
        if residual {
            return Err(Error::Internal("basis vector does not solve the system".into()));
        }
    }
    Ok(RCCoeffs { basis, kernel_dim })
}

/// Σ_r C(n,r)a_r·∂^r f·∂^{n−r}g for basis element `which`.
pub fn rc_apply<C: Coefficient>(
    p: &RCParams,
    f: &QMForm<C>,
    g: &QMForm<C>,
    coeffs: &RCCoeffs,
    which: usize,
) -> Result<QMForm<C>> {
    for (form, w, depth) in [(f, &p.k, p.d), (g, &p.l, p.e)] {
        if form.weight() != w {
            return Err(Error::WeightMismatch {
                expected: w.clone(),
                found: form.weight().clone(),
            });
        }
        if form.depth() > depth {
            return Err(Error::DepthMismatch {
                allowed: depth,
                found: form.depth(),
            });
        }
    }
    let n = p.n;
    let mut df = vec![f.clone()];
    let mut dg = vec![g.clone()];
    for i in 0..n {
        df.push(df[i].derive());
        dg.push(dg[i].derive());
    }
    let target = &p.k + &p.l + Rational::from(2 * n);
    let mut out = QMForm::zero(target.clone());
    for (r, c) in coeffs.bracket_coefficients(which).iter().enumerate() {
        if !c.is_zero() {
            out = out.add(&df[r].mul(&dg[n - r]).scale_q(c));
        }
    }
    if out.depth() > p.d + p.e {
        return Err(Error::DepthMismatch {
            allowed: p.d + p.e,
            found: out.depth(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolomorphyReport {
    pub basis_element: usize,
    pub passed: bool,
    /// Powers of Y whose coefficient failed to cancel.
    pub surviving_powers: Vec<u32>,
}

/// Expand Σ_r C(n,r)a_r·δ^r φ·δ^{n−r} ψ on generic φ (weight k−d) and ψ (weight l−e)
/// and check that no positive power of Y survives.
pub fn rc_holomorphy_certificate(p: &RCParams, coeffs: &RCCoeffs, which: usize) -> HolomorphyReport {
    let (kd, le) = (p.kd(), p.le());
    let phi = NHForm::holomorphic(kd.clone(), SymCoeff::generator(0, kd.clone()));
    let psi = NHForm::holomorphic(le.clone(), SymCoeff::generator(1, le.clone()));
    let n = p.n;
    let target = &kd + &le + Rational::from(2 * n);
    let mut total = NHForm::zero(target.clone());
    for (r, c) in coeffs.bracket_coefficients(which).iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = phi
            .delta_power(&kd, r)
            .mul(&psi.delta_power(&le, n - r))
            .scale_q(c);
        total = total.add(&term.with_weight(target.clone()));
    }
    let surviving_powers: Vec<u32> = total.parts().keys().copied().filter(|t| *t > 0).collect();
    HolomorphyReport {
        basis_element: which,
        passed: surviving_powers.is_empty(),
        surviving_powers,
    }
}

/// One grid point of the uniqueness sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RCGridEntry {
    pub params: RCParams,
    pub excluded: bool,
    pub kernel_dim: usize,
    pub certificates_pass: bool,
}

impl RCGridEntry {
    pub fn consistent(&self) -> bool {
        self.kernel_dim == if self.excluded { 2 } else { 1 } && self.certificates_pass
    }
}

/// Sweep all combinations of the given ranges, in parallel.
pub fn rc_grid(ns: &[usize], depths: &[usize], weights: &[Rational]) -> Vec<RCGridEntry> {
    let mut grid = Vec::new();
    for &n in ns {
        for &d in depths {
            for &e in depths {
                for k in weights {
                    for l in weights {
                        grid.push(RCParams::new(n, k.clone(), d, l.clone(), e));
                    }
                }
            }
        }
    }
    grid.into_par_iter()
        .map(|params| {
            let excluded = rc_is_excluded(&params);
            let kernel_dim = linalg::nullspace(&rc_system(&params), params.n + 1).len();
            let certificates_pass = match rc_solve(&params) {
                Ok(c) => (0..c.basis.len()).all(|i| rc_holomorphy_certificate(&params, &c, i).passed),
                Err(_) => false,
            };
            RCGridEntry {
                params,
                excluded,
                kernel_dim,
                certificates_pass,
            }
        })
        .collect()
}
