//! Eisenstein series and Δ on SL₂(ℤ) as exact q-expansions, numeric evaluation
//! on the upper half-plane and a numeric check of the quasi-modular
//! transformation law.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{QSeries, Rational, Scalar};
use crate::nhform::NHForm;
use crate::quasimod::QMForm;

fn sigma(power: u32, n: u64) -> Rational {
    let s: u128 = (1..=n).filter(|m| n % m == 0).map(|m| (m as u128).pow(power)).sum();
    Rational::from_big(s.into(), 1.into())
}

/// E_k = 1 − (2k/B_k)Σσ_{k−1}(n)qⁿ for k ∈ {2, 4, 6}, truncated below q^order.
pub fn eisenstein_series(weight: i64, order: usize) -> Result<QSeries> {
    let c = match weight {
        2 => -24,
        4 => 240,
        6 => -504,
        _ => return Err(Error::UnsupportedWeight(weight)),
    };
    if order == 0 {
        return Err(Error::Invalid("truncation order must be positive".into()));
    }
    let coeffs = (0..order as u64)
        .map(|n| {
            if n == 0 {
                Rational::one()
            } else {
                Rational::integer(c) * sigma(weight as u32 - 1, n)
            }
        })
        .collect();
    Ok(QSeries::from_rationals(coeffs, order))
}

pub fn eisenstein(weight: i64, order: usize) -> Result<NHForm<QSeries>> {
    Ok(NHForm::holomorphic(Rational::integer(weight), eisenstein_series(weight, order)?))
}

/// Δ = (E₄³ − E₆²)/1728.
pub fn discriminant(order: usize) -> Result<NHForm<QSeries>> {
    let e4 = eisenstein_series(4, order)?;
    let e6 = eisenstein_series(6, order)?;
    let num = &(&(&e4 * &e4) * &e4) - &(&e6 * &e6);
    Ok(NHForm::holomorphic(
        Rational::integer(12),
        num.scale(&Scalar::from(Rational::new(1, 1728))),
    ))
}

/// E₂ as a depth-1 quasi-modular form, f₁ = 12/ω.
pub fn e2_qmform(order: usize) -> Result<QMForm<QSeries>> {
    let k = Rational::integer(2);
    let f0 = NHForm::holomorphic(k.clone(), eisenstein_series(2, order)?);
    let f1 = NHForm::holomorphic(
        Rational::zero(),
        QSeries::constant(Scalar::monomial(Rational::integer(12), -1), order),
    );
    Ok(QMForm::new(k, vec![f0, f1]))
}

/// Names accepted by [`form_by_name`].
pub const FORM_NAMES: [&str; 4] = ["E2", "E4", "E6", "Delta"];

/// The holomorphic function of a named form.
pub fn form_by_name(name: &str, order: usize) -> Result<NHForm<QSeries>> {
    match name {
        "E2" => eisenstein(2, order),
        "E4" => eisenstein(4, order),
        "E6" => eisenstein(6, order),
        "Delta" => discriminant(order),
        _ => Err(Error::Invalid(format!("unknown form {name:?}; expected one of {FORM_NAMES:?}"))),
    }
}

/// A named form as a quasi-modular form (depth 1 for E₂, depth 0 otherwise).
pub fn qmform_by_name(name: &str, order: usize) -> Result<QMForm<QSeries>> {
    if name == "E2" {
        e2_qmform(order)
    } else {
        Ok(QMForm::modular(form_by_name(name, order)?))
    }
}

/// D = q d/dq identities: D(E₂) = (E₂² − E₄)/12, D(E₄) = (E₂E₄ − E₆)/3,
/// D(E₆) = (E₂E₆ − E₄²)/2, compared below q^order.
pub fn ramanujan_identities(order: usize) -> Result<[bool; 3]> {
    let e2 = eisenstein_series(2, order)?;
    let e4 = eisenstein_series(4, order)?;
    let e6 = eisenstein_series(6, order)?;
    let q = |r: i64| Scalar::from(Rational::new(1, r));
    let o = order as i64;
    Ok([
        e2.theta().eq_to_order(&(&(&e2 * &e2) - &e4).scale(&q(12)), o),
        e4.theta().eq_to_order(&(&(&e2 * &e4) - &e6).scale(&q(3)), o),
        e6.theta().eq_to_order(&(&(&e2 * &e6) - &(&e4 * &e4)).scale(&q(2)), o),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[i64; 4]", into = "[i64; 4]")]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GroupElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidGroupElement);
        }
        Ok(GroupElement { a, b, c, d })
    }

    pub const IDENTITY: GroupElement = GroupElement { a: 1, b: 0, c: 0, d: 1 };
    pub const T: GroupElement = GroupElement { a: 1, b: 1, c: 0, d: 1 };
    pub const S: GroupElement = GroupElement { a: 0, b: -1, c: 1, d: 0 };
    pub const TS: GroupElement = GroupElement { a: 1, b: -1, c: 1, d: 0 };

    /// j_γ(τ) = cτ + d.
    pub fn j(&self, tau: Complex64) -> Complex64 {
        tau * self.c as f64 + self.d as f64
    }

    pub fn act(&self, p: EvalPoint) -> EvalPoint {
        let tau = p.tau();
        EvalPoint((tau * self.a as f64 + self.b as f64) / self.j(tau))
    }
}

impl TryFrom<[i64; 4]> for GroupElement {
    type Error = Error;
    fn try_from(m: [i64; 4]) -> Result<Self> {
        GroupElement::new(m[0], m[1], m[2], m[3])
    }
}

impl From<GroupElement> for [i64; 4] {
    fn from(g: GroupElement) -> Self {
        [g.a, g.b, g.c, g.d]
    }
}

impl FromStr for GroupElement {
    type Err = Error;
    /// "a,b,c,d"
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<i64> = s
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Invalid(format!("group element {s:?}: {e}")))?;
        let m: [i64; 4] = v
            .try_into()
            .map_err(|_| Error::Invalid(format!("group element {s:?} needs four entries")))?;
        GroupElement::try_from(m)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A point τ of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct EvalPoint(Complex64);

impl EvalPoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
            Ok(EvalPoint(tau))
        } else {
            Err(Error::InvalidPoint)
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.0
    }

    pub fn q(&self) -> Complex64 {
        (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * self.0).exp()
    }

    /// Y = 1/(−2i·Im τ).
    pub fn y_var(&self) -> Complex64 {
        Complex64::new(0.0, -2.0 * self.0.im).inv()
    }
}

impl TryFrom<[f64; 2]> for EvalPoint {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        EvalPoint::new(Complex64::new(v[0], v[1]))
    }
}

impl From<EvalPoint> for [f64; 2] {
    fn from(p: EvalPoint) -> Self {
        [p.0.re, p.0.im]
    }
}

impl FromStr for EvalPoint {
    type Err = Error;
    /// Accepts "x+yi", "x-yi", "yi", "i" and plain reals (rejected as not in ℍ).
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Invalid(format!("cannot parse {s:?} as a complex number"));
        let tau = match t.strip_suffix('i') {
            None => Complex64::new(t.parse().map_err(|_| bad())?, 0.0),
            Some(body) => {
                let bytes = body.as_bytes();
                let split = (1..bytes.len())
                    .rev()
                    .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
                let (re, im) = match split {
                    Some(i) => (&body[..i], &body[i..]),
                    None => ("0", body),
                };
                let im = match im {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    x => x.parse().map_err(|_| bad())?,
                };
                Complex64::new(re.parse().map_err(|_| bad())?, im)
            }
        };
        EvalPoint::new(tau)
    }
}

/// A numeric value with a heuristic bound on the neglected q-expansion tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: Complex64,
    pub truncation_bound: f64,
}

/// Tail Σ_{n≥N}|c_n||q|ⁿ, assuming |c_n| ≤ A·n^g with g fitted to the last
/// known coefficients.
fn tail_bound(terms: &[(i64, f64)], order: i64, x: f64) -> f64 {
    let n = order as f64;
    let at = |m: i64| terms.iter().find(|(i, _)| *i == m).map_or(0.0, |t| t.1);
    let hi = at(order - 1);
    let lo = at((order - 1) / 2);
    let g = if hi > 0.0 && lo > 0.0 && order > 3 {
        ((hi / lo).ln() / 2f64.ln()).max(0.0)
    } else {
        0.0
    };
    let a = terms
        .iter()
        .filter(|(i, _)| *i >= 1)
        .map(|(i, c)| c / (*i as f64).powf(g))
        .fold(0.0, f64::max);
    if a == 0.0 {
        return 0.0;
    }
    let gc = g.ceil();
    let fact: f64 = (1..=gc as u32).map(f64::from).product();
    a * n.powf(g) * x.powi(order as i32) * fact / (1.0 - x).powf(gc + 1.0)
}

/// Value of a q-series at τ with ω = 2πi and q = e^{2πiτ}.
pub fn eval_qseries(f: &QSeries, p: EvalPoint) -> Evaluation {
    let q = p.q();
    let terms = f.numeric();
    let value = terms.iter().map(|(n, c)| c * q.powi(*n as i32)).sum();
    let mags: Vec<(i64, f64)> = terms.iter().map(|(n, c)| (*n, c.norm())).collect();
    Evaluation {
        value,
        truncation_bound: tail_bound(&mags, f.order(), q.norm()),
    }
}

/// Value of Σ_t c_t·Y^t at τ.
pub fn eval_numeric(f: &NHForm<QSeries>, p: EvalPoint) -> Evaluation {
    let y = p.y_var();
    f.parts().iter().fold(
        Evaluation {
            value: Complex64::new(0.0, 0.0),
            truncation_bound: 0.0,
        },
        |acc, (t, c)| {
            let e = eval_qseries(c, p);
            let yt = y.powi(*t as i32);
            Evaluation {
                value: acc.value + e.value * yt,
                truncation_bound: acc.truncation_bound + e.truncation_bound * yt.norm(),
            }
        },
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransformReport {
    pub gamma: GroupElement,
    pub tau: EvalPoint,
    pub lhs: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
    pub error: f64,
    pub truncation_bound: f64,
    pub tol: f64,
    pub status: VerifyStatus,
}

fn cpow(z: Complex64, e: &Rational) -> Complex64 {
    match e.to_i64() {
        Some(n) => z.powi(n as i32),
        None => z.powf(e.to_f64()),
    }
}

/// Checks f(γτ) = Σ_r j_γ(τ)^{k−r}c^r ρ(γ)f_r(τ) for a vector (f^{(1)},…,f^{(n)})
/// of quasi-modular forms of equal weight; ρ defaults to the identity.
///
/// Passes when |LHS − RHS| ≤ tol·(1 + |LHS|) in the max norm; inconclusive when
/// the truncation bound alone exceeds that threshold. Non-integral weights use
/// the principal branch of j^{k−r}.
pub fn verify_transformation(
    f: &[QMForm<QSeries>],
    gamma: GroupElement,
    rho: Option<&[Vec<Complex64>]>,
    p: EvalPoint,
    tol: f64,
) -> Result<TransformReport> {
    let n = f.len();
    if n == 0 {
        return Err(Error::Invalid("no forms to verify".into()));
    }
    let k = f[0].weight().clone();
    if let Some(g) = f.iter().find(|g| g.weight() != &k) {
        return Err(Error::WeightMismatch {
            expected: k,
            found: g.weight().clone(),
        });
    }
    if let Some(m) = rho {
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid(format!("rho must be a {n}x{n} matrix")));
        }
    }
    let gp = gamma.act(p);
    let mut bound = 0.0;
    let lhs: Vec<Complex64> = f
        .iter()
        .map(|g| {
            let e = eval_numeric(&g.comp(0), gp);
            bound += e.truncation_bound;
            e.value
        })
        .collect();
    let j = gamma.j(p.tau());
    let jp = gamma.c as f64;
    let depth = f.iter().map(|g| g.components().len()).max().unwrap_or(1);
    let inner: Vec<Complex64> = f
        .iter()
        .map(|g| {
            (0..depth)
                .map(|r| {
                    let e = eval_numeric(&g.comp(r as isize), p);
                    let factor = cpow(j, &(&k - Rational::integer(r as i64))) * jp.powi(r as i32);
                    bound += e.truncation_bound * factor.norm();
                    factor * e.value
                })
                .sum()
        })
        .collect();
    let rhs: Vec<Complex64> = match rho {
        None => inner,
        Some(m) => m
            .iter()
            .map(|row| row.iter().zip(&inner).map(|(a, b)| a * b).sum())
            .collect(),
    };
    let error = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let scale = 1.0 + lhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let status = if bound > tol * scale {
        VerifyStatus::Inconclusive
    } else if error <= tol * scale {
        VerifyStatus::Pass
    } else {
        VerifyStatus::Fail
    };
    Ok(TransformReport {
        gamma,
        tau: p,
        lhs,
        rhs,
        error,
        truncation_bound: bound,
        tol,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> EvalPoint {
        s.parse().unwrap()
    }

    fn pass(f: &QMForm<QSeries>, g: GroupElement, tau: &str, tol: f64) -> bool {
        let r = verify_transformation(std::slice::from_ref(f), g, None, pt(tau), tol).unwrap();
        r.status == VerifyStatus::Pass
    }

    #[test]
    fn eisenstein_coefficients() {
        let e4 = eisenstein_series(4, 4).unwrap();
        let c: Vec<Scalar> = (0..4).map(|n| e4.coeff(n)).collect();
        let want: Vec<Scalar> = [1, 240, 2160, 6720].into_iter().map(Scalar::from).collect();
        assert_eq!(c, want);
        assert_eq!(eisenstein_series(2, 2).unwrap().coeff(1), Scalar::from(-24));
        assert_eq!(eisenstein_series(6, 2).unwrap().coeff(0), Scalar::one());
        assert!(eisenstein_series(8, 2).is_err());
    }

    #[test]
    fn discriminant_is_tau_function() {
        let d = discriminant(8).unwrap();
        let c = d.part(0).unwrap();
        let tau = [0, 1, -24, 252, -1472, 4830, -6048, -16744];
        for (n, t) in tau.into_iter().enumerate() {
            assert_eq!(c.coeff(n as i64), Scalar::from(t));
        }
        let v = eval_numeric(&d, pt("2i")).value;
        assert!(v.re > 0.0 && v.im.abs() < 1e-15 * v.re.abs().max(1e-300));
    }

    #[test]
    fn parse_points_and_elements() {
        assert_eq!(pt("1+2i").tau(), Complex64::new(1.0, 2.0));
        assert_eq!(pt("2i").tau(), Complex64::new(0.0, 2.0));
        assert_eq!(pt("-0.5 + 1e-1i").tau(), Complex64::new(-0.5, 0.1));
        assert_eq!(pt("i").tau(), Complex64::new(0.0, 1.0));
        assert!("1-2i".parse::<EvalPoint>().is_err());
        assert!("3".parse::<EvalPoint>().is_err());
        assert_eq!("0,-1,1,0".parse::<GroupElement>().unwrap(), GroupElement::S);
        assert!("1,1,1,1".parse::<GroupElement>().is_err());
    }

    #[test]
    fn constant_and_series_sum() {
        let one = NHForm::holomorphic(Rational::zero(), QSeries::one(5));
        assert_eq!(eval_numeric(&one, pt("0.3+0.7i")).value, Complex64::new(1.0, 0.0));
        let e4 = eisenstein_series(4, 40).unwrap();
        let q = pt("2i").q();
        let direct: Complex64 = (0..40).map(|n| e4.coeff(n).eval() * q.powi(n as i32)).sum();
        assert!((eval_qseries(&e4, pt("2i")).value - direct).norm() < 1e-10);
    }

    #[test]
    fn raise_matches_finite_difference() {
        let k = Rational::integer(4);
        let e4 = eisenstein(4, 40).unwrap();
        let p = pt("2i");
        let h = 1e-5;
        let at = |dz: Complex64| eval_numeric(&e4, EvalPoint::new(p.tau() + dz).unwrap()).value;
        let deriv = (at(Complex64::new(h, 0.0)) - at(Complex64::new(-h, 0.0))) / (2.0 * h);
        let want = deriv + at(Complex64::new(0.0, 0.0)) * 4.0 / Complex64::new(0.0, 2.0 * 2.0);
        let got = eval_numeric(&e4.raise(&k), p).value;
        assert!((got - want).norm() < 1e-6 * (1.0 + want.norm()));
    }

    #[test]
    fn modular_forms_transform() {
        for name in ["E4", "E6", "Delta"] {
            let f = qmform_by_name(name, 40).unwrap();
            for g in [GroupElement::IDENTITY, GroupElement::T, GroupElement::S, GroupElement::TS] {
                for tau in ["2i", "1+2i", "0.3+1.1i"] {
                    assert!(pass(&f, g, tau, 1e-8), "{name} {g} {tau}");
                }
            }
        }
        // E₂ is not modular: the depth-0 law fails at S.
        let e2 = QMForm::modular(eisenstein(2, 40).unwrap());
        assert!(!pass(&e2, GroupElement::S, "2i", 1e-6));
    }

    #[test]
    fn e2_companion() {
        let e2 = e2_qmform(40).unwrap();
        for g in [GroupElement::T, GroupElement::S, GroupElement::TS] {
            assert!(pass(&e2, g, "2i", 1e-6));
            assert!(pass(&e2, g, "1+2i", 1e-6));
        }
        // F₀ = E₂ − 12/ω·Y is the completed E₂* = E₂ − 3/(πy).
        let p = pt("2i");
        let f0 = eval_numeric(&e2.to_tuple().comp(0), p).value;
        let e2v = eval_qseries(&eisenstein_series(2, 40).unwrap(), p).value;
        let star = e2v - 3.0 / (std::f64::consts::PI * 2.0);
        assert!((f0 - star).norm() < 1e-12);
    }

    #[test]
    fn operator_outputs_transform() {
        let e2 = e2_qmform(40).unwrap();
        let e4 = qmform_by_name("E4", 40).unwrap();
        let e6 = qmform_by_name("E6", 40).unwrap();
        let forms = [
            e2.derive(),
            e4.derive(),
            e2.delta(),
            e6.delta(),
            e2.mul(&e4),
            e2.mul(&e2),
            e4.mul(&e6),
            e2.derive().derive(),
        ];
        for f in &forms {
            for g in [GroupElement::T, GroupElement::S, GroupElement::TS] {
                for tau in ["2i", "1+2i"] {
                    assert!(pass(f, g, tau, 1e-6), "{g} {tau}");
                }
            }
        }
    }

    #[test]
    fn wrong_companion_fails() {
        let e2 = e2_qmform(40).unwrap();
        let bad = QMForm::new(e2.weight().clone(), vec![e2.comp(0), e2.comp(1).scale_q(&Rational::new(1, 2))]);
        assert!(!pass(&bad, GroupElement::S, "2i", 1e-6));
    }

    #[test]
    fn vector_valued_with_rho() {
        let e4 = qmform_by_name("E4", 40).unwrap();
        let e4m = e4.scale_q(&Rational::integer(-1));
        let swap = vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
            vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)],
        ];
        let r = verify_transformation(&[e4.clone(), e4m], GroupElement::S, Some(&swap), pt("2i"), 1e-8).unwrap();
        assert_eq!(r.status, VerifyStatus::Pass);
    }

    #[test]
    fn inconclusive_when_truncated() {
        let e4 = qmform_by_name("E4", 3).unwrap();
        let r = verify_transformation(&[e4], GroupElement::S, None, pt("0.1i"), 1e-6).unwrap();
        assert_eq!(r.status, VerifyStatus::Inconclusive);
    }

    #[test]
    fn ramanujan() {
        assert_eq!(ramanujan_identities(30).unwrap(), [true; 3]);
    }
}
