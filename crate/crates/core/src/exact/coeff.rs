use std::fmt::Debug;

use super::{QSeries, Rational, Scalar, SymCoeff};

/// Differential coefficient ring underlying nearly holomorphic forms.
///
/// Every element c splits as a sum of parts with an intrinsic weight W on which
/// δ_W acts as `raise`; holomorphic elements have W = 0 so δ_0 = ∂_τ.
pub trait Coefficient: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
    /// Zero element compatible with `self` (same truncation, for q-series).
    fn zero_like(&self) -> Self;
    /// δ_m c = A + Y·B, returned as (A, B).
    fn raise_split(&self, m: &Rational) -> (Self, Self);
    /// Coefficient-level 4y²∂τ̄.
    fn lower(&self) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn scale_q(&self, r: &Rational) -> Self {
        self.scale(&Scalar::from(r.clone()))
    }
}

impl Coefficient for QSeries {
    fn is_zero(&self) -> bool {
        QSeries::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: &Scalar) -> Self {
        QSeries::scale(self, s)
    }
    fn zero_like(&self) -> Self {
        QSeries::zero(self.order().max(0) as usize)
    }
    fn raise_split(&self, m: &Rational) -> (Self, Self) {
        (self.derive(), QSeries::scale(self, &Scalar::from(-m)))
    }
    fn lower(&self) -> Self {
        self.zero_like()
    }
}

impl Coefficient for SymCoeff {
    fn is_zero(&self) -> bool {
        SymCoeff::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: &Scalar) -> Self {
        SymCoeff::scale(self, s)
    }
    fn zero_like(&self) -> Self {
        SymCoeff::zero()
    }
    fn raise_split(&self, m: &Rational) -> (Self, Self) {
        SymCoeff::raise_split(self, m)
    }
    fn lower(&self) -> Self {
        SymCoeff::lower(self)
    }
}
