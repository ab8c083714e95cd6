//! ℓ¹-minimal analytic interpolation on finite subsets of the circle.

mod nnls;
mod polynomial;
mod solver;

pub use polynomial::{evaluate_on_operator, AnalyticPolynomial, InterpolationProblem};
pub use solver::{interpolate_min_l1, interpolation_constant, InterpConstant, Interpolant, SolverOptions};
