use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{Rational, Scalar};

/// Truncated q-expansion Σ_{n=start}^{order−1} c_n qⁿ over Scalars.
///
/// `start` is 0 for forms holomorphic at ∞; a negative start allows a finite
/// principal part. Results of arithmetic carry the smallest order the operands
/// justify, and equality compares only up to the shared order.
#[derive(Clone, Serialize, Deserialize)]
#[serde(from = "QSeriesRepr", into = "QSeriesRepr")]
pub struct QSeries {
    start: i64,
    order: i64,
    coeffs: Vec<Scalar>,
}

#[derive(Serialize, Deserialize)]
struct QSeriesRepr {
    order: i64,
    coeffs: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "is_zero_i64")]
    start: i64,
}

fn is_zero_i64(x: &i64) -> bool {
    *x == 0
}

impl From<QSeriesRepr> for QSeries {
    fn from(r: QSeriesRepr) -> Self {
        let len = (r.order - r.start).max(0) as usize;
        let mut coeffs = r.coeffs;
        coeffs.resize(len, Scalar::zero());
        QSeries {
            start: r.start,
            order: r.order,
            coeffs,
        }
    }
}

impl From<QSeries> for QSeriesRepr {
    fn from(s: QSeries) -> Self {
        QSeriesRepr {
            order: s.order,
            coeffs: s.coeffs,
            start: s.start,
        }
    }
}

impl QSeries {
    /// Series with coefficients c_0, c_1, … known up to q^{order−1}.
    pub fn new(coeffs: Vec<Scalar>, order: usize) -> Self {
        QSeries::from(QSeriesRepr {
            order: order as i64,
            coeffs,
            start: 0,
        })
    }

    pub fn with_start(start: i64, coeffs: Vec<Scalar>, order: i64) -> Self {
        QSeries::from(QSeriesRepr {
            order,
            coeffs,
            start,
        })
    }

    pub fn from_rationals(coeffs: Vec<Rational>, order: usize) -> Self {
        QSeries::new(coeffs.into_iter().map(Scalar::from).collect(), order)
    }

    pub fn constant(c: Scalar, order: usize) -> Self {
        QSeries::new(vec![c], order)
    }

    pub fn zero(order: usize) -> Self {
        QSeries::new(vec![], order)
    }

    pub fn one(order: usize) -> Self {
        QSeries::constant(Scalar::one(), order)
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// Coefficient of qⁿ; zero below `start`. Panics at or above `order`.
    pub fn coeff(&self, n: i64) -> Scalar {
        assert!(n < self.order, "coefficient q^{n} beyond truncation order {}", self.order);
        if n < self.start {
            Scalar::zero()
        } else {
            self.coeffs[(n - self.start) as usize].clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, order: i64) -> QSeries {
        let order = order.min(self.order);
        QSeries::with_start(
            self.start,
            self.coeffs
                .iter()
                .take((order - self.start).max(0) as usize)
                .cloned()
                .collect(),
            order,
        )
    }

    pub fn scale(&self, s: &Scalar) -> QSeries {
        QSeries {
            start: self.start,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// ∂_τ = ω·q·d/dq
    pub fn derive(&self) -> QSeries {
        QSeries {
            start: self.start,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.shift(1).scale(&Rational::integer(self.start + i as i64)))
                .collect(),
        }
    }

    /// q·d/dq (no ω factor).
    pub fn theta(&self) -> QSeries {
        QSeries {
            start: self.start,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.scale(&Rational::integer(self.start + i as i64)))
                .collect(),
        }
    }

    /// Equality of coefficients below `order`; false if either operand is not known that far.
    pub fn eq_to_order(&self, other: &QSeries, order: i64) -> bool {
        if order > self.order || order > other.order {
            return false;
        }
        let lo = self.start.min(other.start);
        (lo..order).all(|n| self.coeff(n) == other.coeff(n))
    }

    pub fn numeric(&self) -> Vec<(i64, num_complex::Complex64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.start + i as i64, c.eval()))
            .collect()
    }
}

impl PartialEq for QSeries {
    fn eq(&self, other: &Self) -> bool {
        let o = self.order.min(other.order);
        self.eq_to_order(other, o)
    }
}

impl Add<&QSeries> for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let start = self.start.min(rhs.start);
        let order = self.order.min(rhs.order);
        let coeffs = (start..order)
            .map(|n| &self.coeff(n) + &rhs.coeff(n))
            .collect();
        QSeries::with_start(start, coeffs, order)
    }
}

impl Sub<&QSeries> for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self + &(-rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            start: self.start,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul<&QSeries> for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let start = self.start + rhs.start;
        let order = (self.order + rhs.start).min(rhs.order + self.start);
        let len = (order - start).max(0) as usize;
        let mut coeffs = vec![Scalar::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        QSeries::with_start(start, coeffs, order)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let n = self.start + i as i64;
            match n {
                0 => write!(f, "[{c}]")?,
                _ => write!(f, "[{c}]q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order)
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn derive_power_rule() {
        let s = QSeries::from_rationals(vec![q!(1), q!(1)], 4);
        let d = s.derive();
        assert_eq!(d, QSeries::new(vec![Scalar::zero(), Scalar::omega()], 4));
        let q2 = QSeries::from_rationals(vec![q!(0), q!(0), q!(1)], 4);
        assert_eq!(q2.derive().coeff(2), Scalar::monomial(q!(2), 1));
    }

    #[test]
    fn min_order_propagation() {
        let a = QSeries::from_rationals(vec![q!(1), q!(-24), q!(-72)], 3);
        let b = QSeries::one(5);
        let p = &a * &b;
        assert_eq!(p.order(), 3);
        assert_eq!(p, a);
        assert_eq!((&a + &b).order(), 3);
    }

    #[test]
    fn principal_part() {
        // (q⁻¹ + 1)·q = 1 + q
        let a = QSeries::with_start(-1, vec![Scalar::one(), Scalar::one()], 5);
        let q1 = QSeries::from_rationals(vec![q!(0), q!(1)], 5);
        let p = &a * &q1;
        assert_eq!(p.order(), 4);
        assert_eq!(p.coeff(0), Scalar::one());
        assert_eq!(p.coeff(1), Scalar::one());
        assert_eq!(a.derive().coeff(-1), Scalar::monomial(q!(-1), 1));
    }

    #[test]
    fn json_shape() {
        let a = QSeries::from_rationals(vec![q!(1), q!(240)], 2);
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, r#"{"order":2,"coeffs":[{"0":"1/1"},{"0":"240/1"}]}"#);
        let back: QSeries = serde_json::from_str(&js).unwrap();
        assert_eq!(back, a);
    }
}
