//! Finite-dimensional power-bounded operators `T = Y U Y⁻¹` with `U`
//! diagonal unitary, and window-level checks of the similarity bounds.
//!
//! In finite dimension an injective intertwiner with dense range is
//! invertible, so quasisimilarity and similarity coincide here; the checks
//! test the norm inequalities only.

mod checks;
mod model;
mod profile;
pub mod suites;

pub use checks::{
    c_k_factor, c_k_trend, check_lemma21, check_theorem211, check_theorem212, check_theorem25, check_theorem35,
    riesz_bounds, verify_lemma11, BoundName, BoundReport, Lemma11Entry, Lemma11Options, Lemma11Report,
    Lemma21Report, RieszBounds, Theorem35Context, WeakLimitOptions, WindowOptions,
};
pub use model::{random_unitary, random_with_condition, DiagonalUnitary, SimilarityModel, INVERSE_GATE, SPECTRUM_TOL};
pub use profile::{power_norm_profile, power_windows, Direction, PowerProfile, OVERFLOW_GUARD};
pub use crate::linalg::spectral_norm;
