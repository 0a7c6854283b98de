//! Exact symbolic computation with quasi-modular forms, nearly holomorphic
//! forms and their vector-valued (component tuple) counterparts.
//!
//! Forms are polynomials in `Y = 1/(-2iy)` over a differential coefficient ring,
//! either truncated q-series ([`exact::QSeries`]) or the free symbolic ring
//! ([`exact::SymCoeff`]). The symbol ω in every scalar stands for 2πi.

pub mod error;
pub mod laplacian;
pub mod exact;
pub mod formsdb;
pub mod nhform;
pub mod quasimod;
pub mod random;
pub mod rankincohen;
pub mod vvops;

pub use error::{Error, Result};
pub use num_complex::Complex64;
