use super::angle::{Angle, ANGLE_TOL};
use super::cluster::GeometricCluster;
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Cap on how many points of one cluster are compared against another
/// cluster when checking disjointness.
const DISJOINTNESS_PROBE: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawSet {
    #[serde(default)]
    points: Vec<Angle>,
    #[serde(default)]
    clusters: Vec<GeometricCluster>,
}

/// A finite union of point atoms and geometric clusters.
///
/// Queries work on the unrolled line: the set is identified with its
/// `2π`-periodic preimage, so "next point after x" is meaningful for any
/// real `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct SymbolicCircleSet {
    points: Vec<Angle>,
    clusters: Vec<GeometricCluster>,
}

impl TryFrom<RawSet> for SymbolicCircleSet {
    type Error = crate::error::Error;
    fn try_from(r: RawSet) -> Result<Self> {
        SymbolicCircleSet::new(r.points, r.clusters)
    }
}

impl From<SymbolicCircleSet> for RawSet {
    fn from(s: SymbolicCircleSet) -> RawSet {
        RawSet { points: s.points, clusters: s.clusters }
    }
}

impl SymbolicCircleSet {
    /// Builds a set, checking pairwise disjointness at the default tolerance.
    pub fn new(points: Vec<Angle>, clusters: Vec<GeometricCluster>) -> Result<Self> {
        Self::with_tolerance(points, clusters, ANGLE_TOL)
    }

    pub fn with_tolerance(mut points: Vec<Angle>, clusters: Vec<GeometricCluster>, tol: f64) -> Result<Self> {
        points.sort_by(|a, b| a.radians().total_cmp(&b.radians()));
        for w in points.windows(2) {
            if w[0].approx_eq(w[1], tol) {
                return invalid(format!("point atoms {} and {} coincide", w[0].radians(), w[1].radians()));
            }
        }
        if points.len() > 1 && points[0].approx_eq(points[points.len() - 1], tol) {
            return invalid("first and last point atoms coincide across 0");
        }
        for (ci, c) in clusters.iter().enumerate() {
            if let Some(p) = points.iter().find(|p| c.contains(**p, tol)) {
                return invalid(format!("point atom {} lies on cluster {ci}", p.radians()));
            }
            for (di, d) in clusters.iter().enumerate().skip(ci + 1) {
                if c.limit().approx_eq(d.limit(), tol) || d.contains(c.limit(), tol) || c.contains(d.limit(), tol) {
                    return invalid(format!("clusters {ci} and {di} overlap"));
                }
                for (a, b) in [(c, d), (d, c)] {
                    let range = a.resolvable_indices(tol);
                    let end = range.end.min(range.start + DISJOINTNESS_PROBE);
                    if (range.start..end).any(|n| b.contains(a.point(n), tol)) {
                        return invalid(format!("clusters {ci} and {di} share points"));
                    }
                }
            }
        }
        Ok(SymbolicCircleSet { points, clusters })
    }

    pub fn empty() -> Self {
        SymbolicCircleSet { points: Vec::new(), clusters: Vec::new() }
    }

    pub fn from_points(points: Vec<Angle>) -> Result<Self> {
        Self::new(points, Vec::new())
    }

    pub fn points(&self) -> &[Angle] {
        &self.points
    }

    pub fn clusters(&self) -> &[GeometricCluster] {
        &self.clusters
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.clusters.is_empty()
    }

    /// True when the set has no clusters, hence finitely many points.
    pub fn is_finite(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Analytic thinness index: `Σ 1/log(1/a)` over clusters.
    pub fn alpha_analytic(&self) -> f64 {
        self.clusters.iter().fold(0.0, |acc, c| acc + c.alpha())
    }

    /// Membership of an angle, to tolerance.
    pub fn contains(&self, theta: Angle, tol: f64) -> bool {
        self.points.iter().any(|p| p.approx_eq(theta, tol)) || self.clusters.iter().any(|c| c.contains(theta, tol))
    }

    /// Number of points an ε-cover has to resolve individually: atoms,
    /// cluster limits and cluster points at distance at least ε from their limit.
    pub fn resolvable_count(&self, epsilon: f64) -> u64 {
        let tails: u64 = self
            .clusters
            .iter()
            .map(|c| c.count_offsets_at_least(epsilon).saturating_add(1))
            .fold(0u64, |a, b| a.saturating_add(b));
        (self.points.len() as u64).saturating_add(tails)
    }

    /// All points of the set, truncating each cluster at offsets below `tol`.
    pub fn truncated_points(&self, tol: f64) -> Vec<Angle> {
        let mut out = self.points.clone();
        for c in &self.clusters {
            out.push(c.limit());
            out.extend(c.resolvable_indices(tol).map(|n| c.point(n)));
        }
        out
    }

    /// `inf { y ∈ Ẽ : y > x }` on the unrolled line. Equals `x` only when `x`
    /// is approached from the right by points of the set.
    pub fn next_after(&self, x: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut take = |y: f64| {
            if best.is_none_or(|b| y < b) {
                best = Some(y);
            }
        };
        for p in &self.points {
            let th = p.radians();
            let mut y = th + ((x - th) / TAU).ceil() * TAU;
            while y <= x {
                y += TAU;
            }
            while y - TAU > x {
                y -= TAU;
            }
            take(y);
        }
        for c in &self.clusters {
            for base in c.bases_near(x) {
                if let Some(y) = c.copy_next_after(base, x) {
                    take(y);
                }
            }
        }
        best
    }

    /// `min { y ∈ Ẽ : y ≥ x }`.
    pub fn next_at_or_after(&self, x: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut take = |y: f64| {
            if best.is_none_or(|b| y < b) {
                best = Some(y);
            }
        };
        for p in &self.points {
            let th = p.radians();
            let mut y = th + ((x - th) / TAU).ceil() * TAU;
            while y < x {
                y += TAU;
            }
            while y - TAU >= x {
                y -= TAU;
            }
            take(y);
        }
        for c in &self.clusters {
            for base in c.bases_near(x) {
                if let Some(y) = c.copy_next_at_or_after(base, x) {
                    take(y);
                }
            }
        }
        best
    }

    /// `max { y ∈ Ẽ : y ≤ x }`.
    pub fn prev_at_or_before(&self, x: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut take = |y: f64| {
            if best.is_none_or(|b| y > b) {
                best = Some(y);
            }
        };
        for p in &self.points {
            let th = p.radians();
            let mut y = th + ((x - th) / TAU).floor() * TAU;
            while y > x {
                y -= TAU;
            }
            while y + TAU <= x {
                y += TAU;
            }
            take(y);
        }
        for c in &self.clusters {
            for base in c.bases_near(x) {
                if let Some(y) = c.copy_prev_at_or_before(base, x) {
                    take(y);
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::super::cluster::Sign;
    use super::*;

    fn a(t: f64) -> Angle {
        Angle::new(t).unwrap()
    }

    #[test]
    fn rejects_overlaps() {
        assert!(SymbolicCircleSet::from_points(vec![a(1.0), a(1.0)]).is_err());
        let c = GeometricCluster::new(a(0.0), 0.5, 1.0, Sign::Plus, 1).unwrap();
        assert!(SymbolicCircleSet::new(vec![a(-0.25)], vec![c]).is_err());
        assert!(SymbolicCircleSet::new(vec![a(-0.2)], vec![c]).is_ok());
        assert!(SymbolicCircleSet::new(vec![], vec![c, c]).is_err());
    }

    #[test]
    fn unrolled_queries_wrap() {
        let s = SymbolicCircleSet::from_points(vec![a(1.0), a(5.0)]).unwrap();
        assert_eq!(s.next_after(1.0), Some(5.0));
        assert!((s.next_after(5.0).unwrap() - (1.0 + TAU)).abs() < 1e-15);
        assert_eq!(s.next_at_or_after(1.0), Some(1.0));
        assert!((s.prev_at_or_before(0.5).unwrap() - (5.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn cluster_queries_cross_zero() {
        let c = GeometricCluster::new(a(0.0), 0.5, 1.0, Sign::Plus, 1).unwrap();
        let s = SymbolicCircleSet::new(vec![], vec![c]).unwrap();
        // Just above 0 the next point is the first tail point of the next copy.
        assert!((s.next_after(0.0).unwrap() - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(s.next_after(-0.3), Some(-0.25));
        assert_eq!(s.resolvable_count(0.2), 3);
    }
}
