//! The coefficient recursion for lifts F_s = α_s·δ^{d−s}φ.
//!
//! With ν_j = μ + j(k−2d) + j(j−1) the eigenvalue of δ^j φ, the s-th component
//! of ΔF + λF vanishes iff
//! {λ + s(b−c)J_s − bν_{d−s}}α_s + (b−c)(s+1)α_{s+1} − bJ_sν_{d−s+1}α_{s−1} = 0,
//! for s = 0..=d+1 (α_{−1} = α_{d+1} = 0, α_d = 1).

use serde::{Deserialize, Serialize};

use super::j_coeff;
use crate::error::{Error, Result};
use crate::exact::{linalg, rational_roots, BiPoly, Rational, UniPoly};
use crate::vvops::TripleParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    /// b ≠ 0 and no pivot of the recursion vanishes.
    Generic,
    /// (1−a)(k−2)+1 = j is an integer in 1..=d.
    SpecialJ,
    /// k − d = p is an integer in 1..=d.
    SpecialP,
    /// Both of the above.
    SpecialJP,
    /// b ≠ 0 and (1−a)(k−2) = d: lifts of Δ-eigenfunctions with eigenvalue μ.
    Mu,
    /// b = 0 with (1−a)(k−2) outside the integers d−1..=2d−2.
    BZero,
    /// b = 0 with (1−a)(k−2) = d−1+j, 0 ≤ j < d.
    BZeroInteger,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub kind: BranchKind,
    /// (1−a)(k−2)
    pub m: Rational,
    pub j: Option<i64>,
    pub p: Option<i64>,
    pub b_zero: bool,
    pub mu_branch: bool,
    /// For b = 0: the integer j with (1−a)(k−2) = d−1+j.
    pub beta_j: Option<i64>,
}

fn int_in(x: &Rational, lo: i64, hi: i64) -> Option<i64> {
    x.to_i64().filter(|v| (lo..=hi).contains(v))
}

impl Branch {
    pub fn classify(params: &TripleParams, k: &Rational, d: usize) -> Branch {
        let di = d as i64;
        let m = j_coeff(params, k, 1);
        let j = int_in(&(&m + Rational::one()), 1, di);
        let p = int_in(&(k - Rational::from(d)), 1, di);
        let b_zero = params.b.is_zero();
        let mu_branch = !b_zero && m == Rational::from(d);
        let beta_j = if b_zero && d > 0 {
            int_in(&(&m - Rational::integer(di - 1)), 0, di - 1)
        } else {
            None
        };
        let kind = if b_zero {
            if beta_j.is_some() {
                BranchKind::BZeroInteger
            } else {
                BranchKind::BZero
            }
        } else if mu_branch {
            BranchKind::Mu
        } else {
            match (j, p) {
                (None, None) => BranchKind::Generic,
                (Some(_), None) => BranchKind::SpecialJ,
                (None, Some(_)) => BranchKind::SpecialP,
                (Some(_), Some(_)) => BranchKind::SpecialJP,
            }
        };
        Branch {
            kind,
            m,
            j,
            p,
            b_zero,
            mu_branch,
            beta_j,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftProblem {
    pub params: TripleParams,
    pub k: Rational,
    pub d: usize,
    pub branch: Branch,
}

impl LiftProblem {
    pub fn new(params: TripleParams, k: Rational, d: usize) -> Self {
        let branch = Branch::classify(&params, &k, d);
        LiftProblem {
            params,
            k,
            d,
            branch,
        }
    }

    /// Weight of the lifted form φ.
    pub fn phi_weight(&self) -> Rational {
        &self.k - Rational::from(2 * self.d)
    }

    pub(crate) fn jc(&self, s: i64) -> Rational {
        j_coeff(&self.params, &self.k, s)
    }

    /// ν_i = μ + i(k−2d) + i(i−1).
    pub fn nu(&self, i: i64, mu: &Rational) -> Rational {
        mu + self.phi_weight() * Rational::integer(i) + Rational::integer(i * (i - 1))
    }

    /// Constant part of the α_s coefficient: s(b−c)J_s − bν_{d−s}.
    fn diag_const(&self, s: i64, mu: &Rational) -> Rational {
        let bc = &self.params.b - &self.params.c;
        Rational::integer(s) * bc * self.jc(s) - &self.params.b * self.nu(self.d as i64 - s, mu)
    }

    /// (b−c)(s+1), the coefficient of α_{s+1}.
    fn upper(&self, s: i64) -> Rational {
        (&self.params.b - &self.params.c) * Rational::integer(s + 1)
    }

    /// −bJ_sν_{d−s+1}, the coefficient of α_{s−1}.
    fn lower(&self, s: i64, mu: &Rational) -> Rational {
        -(&self.params.b * self.jc(s) * self.nu(self.d as i64 - s + 1, mu))
    }
}

/// α_s as polynomials in λ for s ≥ `cutoff`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaTable {
    pub d: usize,
    pub alpha: Vec<Option<UniPoly>>,
    pub cutoff: usize,
    /// Index of the coefficient left free by a vanishing pivot.
    pub free_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPoly {
    /// The relation as produced by the recursion, with rational denominators.
    pub raw: UniPoly,
    pub monic: UniPoly,
    /// The equation index s that yields the polynomial.
    pub equation: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaSolution {
    pub table: AlphaTable,
    pub poly: EigenPoly,
}

/// Run the recursion downwards from α_d = 1 at fixed μ, stopping at the first
/// vanishing pivot.
pub fn solve_alpha_at(prob: &LiftProblem, mu: &Rational) -> Result<AlphaSolution> {
    if prob.branch.b_zero {
        return Err(Error::Misclassified("b = 0 uses the β recursion".into()));
    }
    let d = prob.d;
    let di = d as i64;
    let mut alpha: Vec<Option<UniPoly>> = vec![None; d + 2];
    alpha[d] = Some(UniPoly::one());
    alpha[d + 1] = Some(UniPoly::zero());

    // the equation s = d+1 reduces to −bJ_{d+1}μ·α_d = 0
    let top = prob.lower(di + 1, mu);
    if !top.is_zero() {
        let raw = UniPoly::constant(top);
        return Ok(AlphaSolution {
            table: AlphaTable {
                d,
                alpha,
                cutoff: d,
                free_index: None,
            },
            poly: EigenPoly {
                monic: raw.monic()?,
                raw,
                equation: d + 1,
            },
        });
    }

    let lam = UniPoly::x();
    let relation = |s: usize, alpha: &[Option<UniPoly>]| -> UniPoly {
        let si = s as i64;
        let a = &lam + &UniPoly::constant(prob.diag_const(si, mu));
        let cur = alpha[s].as_ref().expect("determined");
        let next = alpha[s + 1].as_ref().expect("determined");
        &(&a * cur) + &next.scale(&prob.upper(si))
    };

    for s in (1..=d).rev() {
        let piv = prob.lower(s as i64, mu);
        let rel = relation(s, &alpha);
        if piv.is_zero() {
            let monic = rel.monic()?;
            return Ok(AlphaSolution {
                table: AlphaTable {
                    d,
                    alpha,
                    cutoff: s,
                    free_index: Some(s - 1),
                },
                poly: EigenPoly {
                    raw: rel,
                    monic,
                    equation: s,
                },
            });
        }
        alpha[s - 1] = Some(rel.scale(&(-piv.recip())));
    }
    let raw = relation(0, &alpha);
    let monic = raw.monic()?;
    Ok(AlphaSolution {
        table: AlphaTable {
            d,
            alpha,
            cutoff: 0,
            free_index: None,
        },
        poly: EigenPoly {
            raw,
            monic,
            equation: 0,
        },
    })
}

/// det of the square system formed by the equations s = 0..=d in α_0..α_d:
/// monic of degree d+1 in λ. Its roots are the λ admitting any nonzero
/// coefficient vector; those with α_d ≠ 0 are the lifts. Where a pivot
/// −bJ_sν_{d−s+1} vanishes the matrix is block triangular and the factor
/// from the upper block is the monic polynomial of [`solve_alpha_at`].
pub fn char_poly(prob: &LiftProblem, mu: &Rational) -> UniPoly {
    let lam = UniPoly::x();
    let mut prev = UniPoly::one();
    let mut cur = &lam + &UniPoly::constant(prob.diag_const(0, mu));
    for s in 1..=prob.d as i64 {
        let diag = &lam + &UniPoly::constant(prob.diag_const(s, mu));
        let off = prob.upper(s - 1) * prob.lower(s, mu);
        let next = &(&diag * &cur) - &prev.scale(&off);
        prev = cur;
        cur = next;
    }
    cur
}

/// The recursion for meromorphic φ (μ = 0).
pub fn solve_alpha(prob: &LiftProblem) -> Result<AlphaSolution> {
    solve_alpha_at(prob, &Rational::zero())
}

/// Solution space of the coefficient equations at a given (λ, μ): a particular
/// vector (α_0..α_d, α_d = 1) and the directions left free.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftCoefficients {
    pub lambda: Rational,
    pub mu: Rational,
    pub alpha: Vec<Rational>,
    pub free: Vec<Vec<Rational>>,
}

/// Solve all d+2 coefficient equations exactly at (λ, μ).
pub fn lift_coefficients(prob: &LiftProblem, lambda: &Rational, mu: &Rational) -> Result<LiftCoefficients> {
    if prob.branch.b_zero {
        return Err(Error::Misclassified("b = 0 uses the β recursion".into()));
    }
    let d = prob.d;
    // unknowns α_0..α_{d−1}; α_d = 1 moved to the right-hand side
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for s in 0..=d + 1 {
        let si = s as i64;
        let mut row = vec![Rational::zero(); d];
        let mut constant = Rational::zero();
        let mut put = |idx: i64, c: Rational| {
            if idx < 0 || idx as usize > d {
                return;
            }
            if idx as usize == d {
                constant += &c;
            } else {
                row[idx as usize] += &c;
            }
        };
        put(si, lambda + prob.diag_const(si, mu));
        put(si + 1, prob.upper(si));
        put(si - 1, prob.lower(si, mu));
        rows.push(row);
        rhs.push(-constant);
    }
    let (mut x, null) = linalg::solve_affine(&rows, &rhs, d).ok_or_else(|| {
        Error::NoLift(format!(
            "coefficient equations inconsistent at lambda = {lambda}, mu = {mu}"
        ))
    })?;
    x.push(Rational::one());
    let free = null
        .into_iter()
        .map(|mut v| {
            v.push(Rational::zero());
            v
        })
        .collect();
    Ok(LiftCoefficients {
        lambda: lambda.clone(),
        mu: mu.clone(),
        alpha: x,
        free,
    })
}

/// Roots of the eigenvalue polynomial together with whether each admits a lift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootInfo {
    pub lambda: Rational,
    pub multiplicity: usize,
    pub liftable: bool,
    /// Number of additional free directions in the coefficient solution.
    pub extra_freedom: usize,
}

pub fn classify_roots(prob: &LiftProblem, poly: &UniPoly, mu: &Rational) -> Result<Vec<RootInfo>> {
    let report = rational_roots(poly)?;
    Ok(report
        .roots
        .iter()
        .map(|(r, mult)| {
            let sol = lift_coefficients(prob, r, mu);
            RootInfo {
                lambda: r.clone(),
                multiplicity: *mult,
                liftable: sol.is_ok(),
                extra_freedom: sol.map(|s| s.free.len()).unwrap_or(0),
            }
        })
        .collect())
}

/// Bivariate data for the μ-branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiEigenPoly {
    /// Fraction-free numerators: α_s = N_s / ∏_{i=s+1}^{d} pivot_i.
    pub numerators: Vec<BiPoly>,
    /// pivot_s = bJ_sν_{d−s+1}(μ), s = 1..=d (index 0 unused).
    pub pivots: Vec<UniPoly>,
    /// Monic in λ of degree d+1.
    pub poly: BiPoly,
    /// Discriminant with respect to λ, a polynomial in μ.
    pub discriminant: UniPoly,
}

/// Fraction-free recursion in (λ, μ); requires (1−a)(k−2) = d.
pub fn solve_alpha_mu(prob: &LiftProblem) -> Result<BiEigenPoly> {
    if !prob.branch.mu_branch {
        return Err(Error::Misclassified(
            "bivariate recursion needs b != 0 and (1-a)(k-2) = d".into(),
        ));
    }
    let d = prob.d;
    let b = &prob.params.b;
    let bc = &prob.params.b - &prob.params.c;
    let k2d = prob.phi_weight();
    let nu = |i: i64| -> BiPoly {
        &BiPoly::mu() + &BiPoly::constant(&k2d * Rational::integer(i) + Rational::integer(i * (i - 1)))
    };
    let pivot = |s: i64| -> BiPoly { nu(d as i64 - s + 1).scale(&(b * prob.jc(s))) };
    let diag = |s: i64| -> BiPoly {
        let c = Rational::integer(s) * &bc * prob.jc(s);
        &(&BiPoly::lambda() + &BiPoly::constant(c)) - &nu(d as i64 - s).scale(b)
    };
    let mut n = vec![BiPoly::zero(); d + 2];
    n[d] = BiPoly::constant(Rational::one());
    let mut pivots = vec![UniPoly::zero(); d + 1];
    for s in 1..=d {
        pivots[s] = pivot(s as i64).rows()[0].clone();
    }
    let step = |s: usize, n: &[BiPoly]| -> BiPoly {
        let si = s as i64;
        let carried = if s + 1 <= d {
            &n[s + 1].scale(&prob.upper(si)) * &pivot(si + 1)
        } else {
            BiPoly::zero()
        };
        &(&diag(si) * &n[s]) + &carried
    };
    for s in (1..=d).rev() {
        n[s - 1] = step(s, &n);
    }
    let poly = step(0, &n);
    let discriminant = poly.discriminant_lambda()?;
    n.truncate(d + 1);
    Ok(BiEigenPoly {
        numerators: n,
        pivots,
        poly,
        discriminant,
    })
}

/// Parametrization (μ(x), λ(x)) of the depth-one μ-branch curve, x = λ − bμ.
/// Requires b ∉ {0, 1} and b ≠ c.
pub fn depth_one_curve(p: &TripleParams) -> (UniPoly, UniPoly) {
    let b = &p.b;
    let b1 = (b - Rational::one()).recip();
    let bc = (b - &p.c).recip();
    let mu = UniPoly::new(vec![Rational::zero(), &b1 / b, -(&bc / b)]);
    let lambda = UniPoly::new(vec![Rational::zero(), b * &b1, -bc]);
    (mu, lambda)
}

/// The curve μ = t/(b−1) + t²/(b−c), λ = t/(b−1) + bt²/(b−c). It meets the true
/// curve only at μ = 0 (and coincides with it when b = −1).
pub fn depth_one_curve_unscaled(p: &TripleParams) -> (UniPoly, UniPoly) {
    let b1 = (&p.b - Rational::one()).recip();
    let bc = (&p.b - &p.c).recip();
    let mu = UniPoly::new(vec![Rational::zero(), b1.clone(), bc.clone()]);
    let lambda = UniPoly::new(vec![Rational::zero(), b1, &p.b * &bc]);
    (mu, lambda)
}

/// The single eigenvalue and β table of the b = 0 branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSolution {
    pub lambda: Rational,
    /// β_0..β_d; entries with s ≤ j vanish in the integer case.
    pub beta: Vec<Rational>,
    /// In the integer case, the lifted φ must satisfy δ^{d−j}φ = 0.
    pub annihilation_order: Option<usize>,
}

/// λ = d(k−2+(1−d)/(1−a)), β_s = (s+1)β_{s+1}/((d−s)[(1−a)(k−2)+1−d−s]).
pub fn solve_beta(prob: &LiftProblem) -> Result<BetaSolution> {
    if !prob.branch.b_zero {
        return Err(Error::Misclassified("β recursion needs b = 0".into()));
    }
    let d = prob.d;
    let one = Rational::one();
    let a1 = &one - &prob.params.a;
    let lambda = Rational::from(d)
        * (&prob.k - Rational::integer(2) + (&one - Rational::from(d)) / &a1);
    let mut beta = vec![Rational::zero(); d + 1];
    beta[d] = one.clone();
    let stop = prob.branch.beta_j.map(|j| j as usize);
    for s in (0..d).rev() {
        if stop.is_some_and(|j| s <= j) {
            break;
        }
        let den = Rational::from(d - s) * (&prob.branch.m + &one - Rational::from(d + s));
        if den.is_zero() {
            return Err(Error::Misclassified(format!("vanishing β denominator at s = {s}")));
        }
        beta[s] = Rational::from(s + 1) * &beta[s + 1] / den;
    }
    Ok(BetaSolution {
        lambda,
        beta,
        annihilation_order: stop.map(|j| d - j),
    })
}
