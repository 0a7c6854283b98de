//! Exact arithmetic: rationals, ω-Laurent scalars, polynomials, q-series and
//! the free symbolic differential ring.

mod coeff;
pub mod linalg;
mod poly;
mod qseries;
mod rational;
mod scalar;
mod symbolic;

pub use coeff::Coefficient;
pub use poly::{rational_roots, BiPoly, RootReport, UniPoly};
pub use qseries::QSeries;
pub use rational::{binomial, factorial, rising, ParseRationalError, Rational};
pub use scalar::Scalar;
pub use symbolic::{Atom, Monomial, SymCoeff};
