use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// Dense univariate polynomial over ℚ, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl From<Vec<Rational>> for UniPoly {
    fn from(v: Vec<Rational>) -> Self {
        UniPoly::new(v)
    }
}

impl From<UniPoly> for Vec<Rational> {
    fn from(p: UniPoly) -> Self {
        p.coeffs
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn one() -> Self {
        UniPoly::constant(Rational::one())
    }

    /// The polynomial x.
    pub fn x() -> Self {
        UniPoly::new(vec![Rational::zero(), Rational::one()])
    }

    /// x − r
    pub fn linear_root(r: &Rational) -> Self {
        UniPoly::new(vec![-r, Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c * r).collect())
    }

    pub fn monic(&self) -> Result<UniPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.scale(&self.leading().recip()))
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from(i))
                .collect(),
        )
    }

    /// Substitute x ↦ q(x).
    pub fn compose(&self, q: &UniPoly) -> UniPoly {
        let mut acc = UniPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * q) + &UniPoly::constant(c.clone());
        }
        acc
    }

    pub fn div_rem(&self, d: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let dd = d.degree().ok_or(Error::ZeroPolynomial)?;
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return Ok((UniPoly::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); n - dd];
        for i in (dd..n).rev() {
            let c = &rem[i] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = &c * dc;
                rem[i - dd + j] -= &t;
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        Ok((UniPoly::new(quot), UniPoly::new(rem)))
    }

    /// Primitive integer polynomial proportional to `self` with positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let l = Rational::lcm_denoms(self.coeffs.iter());
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from(l.clone())).numer().clone())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
        let sign = if ints.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.monic().unwrap_or_default()
    }
}

/// Rational roots of a polynomial with multiplicities, plus the residual factor
/// carrying all non-rational roots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub roots: Vec<(Rational, usize)>,
    pub residual: UniPoly,
}

impl RootReport {
    pub fn values(&self) -> Vec<Rational> {
        self.roots.iter().map(|(r, _)| r.clone()).collect()
    }

    pub fn count_with_multiplicity(&self) -> usize {
        self.roots.iter().map(|(_, m)| m).sum()
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if let Some(small) = num_traits::ToPrimitive::to_u128(&n) {
        let mut out = Vec::new();
        let mut i: u128 = 1;
        while i * i <= small {
            if small % i == 0 {
                out.push(BigInt::from(i));
                if small / i != i {
                    out.push(BigInt::from(small / i));
                }
            }
            i += 1;
        }
        return out;
    }
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            out.push(i.clone());
            let other = &n / &i;
            if other != i {
                out.push(other);
            }
        }
        i += 1;
    }
    out
}

/// All rational roots by the rational-root theorem on the primitive integer form,
/// deflating each root as found.
pub fn rational_roots(p: &UniPoly) -> Result<RootReport> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rest = p.monic()?;
    let mut roots: Vec<(Rational, usize)> = Vec::new();
    // zero roots first
    let mut zero_mult = 0;
    while rest.coeff(0).is_zero() && rest.degree().unwrap_or(0) > 0 {
        rest = rest.div_rem(&UniPoly::x())?.0;
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rational::zero(), zero_mult));
    }
    if rest.degree().unwrap_or(0) > 0 {
        let ints = rest.primitive_integer();
        let limit = BigInt::from(100_000_000_000_000u64);
        let mut cands: Vec<Rational> = Vec::new();
        let dens = divisors(ints.last().unwrap());
        if ints[0].abs() <= limit && ints.last().unwrap().abs() <= limit {
            let nums = divisors(&ints[0]);
            for n in &nums {
                for d in &dens {
                    let r = Rational::from_big(n.clone(), d.clone());
                    cands.push(r.clone());
                    cands.push(-r);
                }
            }
        } else {
            // Coefficients too large for divisor enumeration: take numeric
            // approximations of the real roots and round against each admissible
            // denominator. Every candidate is still verified exactly below.
            for z in numeric_roots(&rest) {
                if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
                    continue;
                }
                for d in &dens {
                    let df = num_traits::ToPrimitive::to_f64(d).unwrap_or(f64::MAX);
                    let n = (z.re * df).round();
                    if n.is_finite() {
                        let n = BigInt::from(n as i128);
                        cands.push(Rational::from_big(n, d.clone()));
                    }
                }
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            let lin = UniPoly::linear_root(&r);
            let mut m = 0;
            loop {
                if rest.degree().unwrap_or(0) == 0 {
                    break;
                }
                let (qq, rr) = rest.div_rem(&lin)?;
                if !rr.is_zero() {
                    break;
                }
                rest = qq;
                m += 1;
            }
            if m > 0 {
                roots.push((r, m));
            }
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(RootReport {
        roots,
        residual: rest,
    })
}

/// Durand–Kerner iteration on the monic polynomial; used only to propose candidates.
fn numeric_roots(p: &UniPoly) -> Vec<num_complex::Complex64> {
    use num_complex::Complex64;
    let n = p.degree().unwrap_or(0);
    if n == 0 {
        return vec![];
    }
    let lead = p.leading().to_f64();
    let c: Vec<Complex64> = p
        .coeffs()
        .iter()
        .map(|x| Complex64::new(x.to_f64() / lead, 0.0))
        .collect();
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
    let bound = 1.0 + c[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut zs: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32) * bound).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= zs[i] - zs[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 0.0);
            }
            let step = eval(zs[i]) / den;
            zs[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 * bound {
            break;
        }
    }
    zs
}

impl Add<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(f, &self.coeffs, "x")
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn fmt_poly(f: &mut fmt::Formatter<'_>, coeffs: &[Rational], var: &str) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        match i {
            0 => write!(f, "{c}")?,
            1 => write!(f, "({c}){var}")?,
            _ => write!(f, "({c}){var}^{i}")?,
        }
    }
    Ok(())
}

/// Polynomial in (λ, μ) stored as a polynomial in λ whose coefficients are polynomials in μ.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<UniPoly>", into = "Vec<UniPoly>")]
pub struct BiPoly {
    rows: Vec<UniPoly>,
}

impl From<Vec<UniPoly>> for BiPoly {
    fn from(v: Vec<UniPoly>) -> Self {
        BiPoly::new(v)
    }
}

impl From<BiPoly> for Vec<UniPoly> {
    fn from(p: BiPoly) -> Self {
        p.rows
    }
}

impl BiPoly {
    /// `rows[i]` is the coefficient of λ^i, a polynomial in μ.
    pub fn new(mut rows: Vec<UniPoly>) -> Self {
        while rows.last().is_some_and(|r| r.is_zero()) {
            rows.pop();
        }
        BiPoly { rows }
    }

    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        BiPoly::new(vec![UniPoly::constant(c)])
    }

    pub fn lambda() -> Self {
        BiPoly::new(vec![UniPoly::zero(), UniPoly::one()])
    }

    pub fn mu() -> Self {
        BiPoly::new(vec![UniPoly::x()])
    }

    pub fn from_mu(p: UniPoly) -> Self {
        BiPoly::new(vec![p])
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[UniPoly] {
        &self.rows
    }

    pub fn degree_lambda(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        self.rows.get(i).map(|r| r.coeff(j)).unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, lambda: &Rational, mu: &Rational) -> Rational {
        self.at_mu(mu).eval(lambda)
    }

    /// Specialize μ, leaving a polynomial in λ.
    pub fn at_mu(&self, mu: &Rational) -> UniPoly {
        UniPoly::new(self.rows.iter().map(|r| r.eval(mu)).collect())
    }

    /// Substitute λ = l(t), μ = m(t).
    pub fn substitute(&self, l: &UniPoly, m: &UniPoly) -> UniPoly {
        let mut acc = UniPoly::zero();
        for r in self.rows.iter().rev() {
            acc = &(&acc * l) + &r.compose(m);
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> BiPoly {
        BiPoly::new(self.rows.iter().map(|p| p.scale(r)).collect())
    }

    pub fn derivative_lambda(&self) -> BiPoly {
        BiPoly::new(
            self.rows
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, r)| r.scale(&Rational::from(i)))
                .collect(),
        )
    }

    /// Discriminant with respect to λ, a polynomial in μ:
    /// (−1)^{n(n−1)/2} Res(P, ∂P/∂λ) / lc(P).
    pub fn discriminant_lambda(&self) -> Result<UniPoly> {
        let n = self.degree_lambda().ok_or(Error::ZeroPolynomial)?;
        if n == 0 {
            return Ok(UniPoly::zero());
        }
        let dp = self.derivative_lambda();
        let res = resultant(&self.rows, &dp.rows)?;
        let lc = self.rows[n].clone();
        let (q, r) = res.div_rem(&lc)?;
        if !r.is_zero() {
            return Err(Error::Internal("discriminant division not exact".into()));
        }
        let sign = if (n * (n - 1) / 2) % 2 == 1 {
            -Rational::one()
        } else {
            Rational::one()
        };
        Ok(q.scale(&sign))
    }
}

/// Resultant of two polynomials with coefficients in ℚ[μ], via the Sylvester
/// determinant evaluated with fraction-free (Bareiss) elimination.
fn resultant(p: &[UniPoly], q: &[UniPoly]) -> Result<UniPoly> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    if size == 0 {
        return Ok(UniPoly::one());
    }
    let mut mat = vec![vec![UniPoly::zero(); size]; size];
    for i in 0..n {
        for (j, c) in p.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in q.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut a: Vec<Vec<UniPoly>>) -> Result<UniPoly> {
    let n = a.len();
    let mut sign = Rational::one();
    let mut prev = UniPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(sw) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(UniPoly::zero());
            };
            a.swap(k, sw);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                let (qq, rr) = num.div_rem(&prev)?;
                if !rr.is_zero() {
                    return Err(Error::Internal("Bareiss division not exact".into()));
                }
                a[i][j] = qq;
            }
            a[i][k] = UniPoly::zero();
        }
        prev = a[k][k].clone();
    }
    Ok(a[n - 1][n - 1].scale(&sign))
}

impl Add<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let n = self.rows.len().max(rhs.rows.len());
        let z = UniPoly::zero();
        BiPoly::new(
            (0..n)
                .map(|i| self.rows.get(i).unwrap_or(&z) + rhs.rows.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Sub<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &(-rhs)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly::new(self.rows.iter().map(|r| -r).collect())
    }
}

impl Mul<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        if self.is_zero() || rhs.is_zero() {
            return BiPoly::zero();
        }
        let mut out = vec![UniPoly::zero(); self.rows.len() + rhs.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in rhs.rows.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        BiPoly::new(out)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, r) in self.rows.iter().enumerate().rev() {
            if r.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[")?;
            fmt_poly(f, r.coeffs(), "mu")?;
            match i {
                0 => write!(f, "]")?,
                1 => write!(f, "]lambda")?,
                _ => write!(f, "]lambda^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
