//! Thin closed subsets of the circle: atoms plus geometric clusters, with
//! exact covering numbers, the thinness index and thin decompositions.

mod angle;
mod cluster;
mod covering;
mod decompose;
mod format;
mod set;

pub use angle::{Angle, ANGLE_TOL};
pub use cluster::{GeometricCluster, Sign};
pub use covering::{
    alpha_empirical, alpha_empirical_capped, covering_number, optimal_cover, optimal_cover_capped, CoverEntry, Cover,
    CoveringProfile, DEFAULT_POINT_CAP,
};
pub use decompose::{decompose, Decomposition, SplitCluster};
pub use format::{format_set, parse_set};
pub use set::SymbolicCircleSet;

/// `Σ 1/log(1/a)` over the clusters of the set.
pub fn alpha_analytic(set: &SymbolicCircleSet) -> f64 {
    set.alpha_analytic()
}
