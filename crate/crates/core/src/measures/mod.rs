//! Finite positive measures on the circle, their Fourier coefficients and
//! windowed limsup diagnostics.

mod atomic;
mod estimators;
mod format;

pub use atomic::{Atom, AtomicMeasure, CantorApproxMeasure, MAX_CANTOR_DEPTH};
pub use estimators::{
    absolute_convergence_partial, imaginary_moment, k_condition_estimate, lemma28_extract, limsup_abs_fourier,
    minimizing_sequence, pseudomeasure_ratio, Concentration, KEstimate, MinimizingSequence, MinimizingTerm,
    Pseudomeasure, PseudomeasureRatio, WindowMax,
};
pub use format::{format_measure, parse_measure, MeasureSpec};
