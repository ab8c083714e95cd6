//! Desk-scale computations around power-bounded operators with thin
//! unimodular spectra: covering numbers of thin circle sets, simultaneous
//! Diophantine approximation, Fourier analysis of atomic measures,
//! ℓ¹-minimal analytic interpolation, and numerical checks of similarity
//! bounds for `T = Y U Y⁻¹`.

pub mod circle_sets;
pub mod cli_reports;
pub mod diophantine;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod numeric;
pub mod operator_lab;
pub mod wiener_interp;

pub use error::{Error, Result};
