use super::angle::{signed_offset, Angle};
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Side of the limit point on which a cluster's tail lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    /// Points `limit − c·aⁿ` (approach the limit from below).
    Plus,
    /// Points `limit + c·aⁿ` (approach the limit from above).
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = crate::error::Error;
    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => invalid(format!("cluster sign must be +1 or -1, got {v}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Largest index ever evaluated; beyond it every offset has underflowed.
const MAX_INDEX: u64 = i32::MAX as u64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct RawCluster {
    limit: Angle,
    ratio: f64,
    scale: f64,
    sign: Sign,
    start_index: u32,
}

/// The closed set `{L} ∪ {L − sign·c·aⁿ : n ≥ j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCluster", into = "RawCluster")]
pub struct GeometricCluster {
    limit: Angle,
    ratio: f64,
    scale: f64,
    sign: Sign,
    start_index: u32,
}

impl TryFrom<RawCluster> for GeometricCluster {
    type Error = crate::error::Error;
    fn try_from(r: RawCluster) -> Result<Self> {
        GeometricCluster::new(r.limit, r.ratio, r.scale, r.sign, r.start_index)
    }
}

impl From<GeometricCluster> for RawCluster {
    fn from(c: GeometricCluster) -> RawCluster {
        RawCluster {
            limit: c.limit,
            ratio: c.ratio,
            scale: c.scale,
            sign: c.sign,
            start_index: c.start_index,
        }
    }
}

/// Where a cluster's copy meets a closed window.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct WindowHit {
    /// Finitely many points inside the window (unrolled radians).
    pub finite: Vec<f64>,
    /// First index of an infinite tail contained in the window, with the
    /// copy's unrolled limit.
    pub tail: Option<(u64, f64)>,
}

impl GeometricCluster {
    pub fn new(limit: Angle, ratio: f64, scale: f64, sign: Sign, start_index: u32) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return invalid(format!("cluster ratio {ratio} must lie in (0, 1)"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return invalid(format!("cluster scale {scale} must be positive"));
        }
        if start_index < 1 {
            return invalid("cluster start index must be at least 1");
        }
        let c = GeometricCluster { limit, ratio, scale, sign, start_index };
        if c.first_offset() >= TAU {
            return invalid(format!(
                "cluster first offset {} does not fit on the circle",
                c.first_offset()
            ));
        }
        Ok(c)
    }

    /// The family with points `exp(i·Σ_{k=1}^n a^k)`, `n ≥ j`, accumulating at
    /// `a/(1−a)` from below.
    pub fn partial_sums(ratio: f64, start_index: u32) -> Result<Self> {
        let l = ratio / (1.0 - ratio);
        GeometricCluster::new(Angle::new(l)?, ratio, l, Sign::Plus, start_index)
    }

    pub fn limit(&self) -> Angle {
        self.limit
    }
    pub fn ratio(&self) -> f64 {
        self.ratio
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn sign(&self) -> Sign {
        self.sign
    }
    pub fn start_index(&self) -> u32 {
        self.start_index
    }

    /// Contribution `1/log(1/a)` to the thinness index.
    pub fn alpha(&self) -> f64 {
        -1.0 / self.ratio.ln()
    }

    /// Distance `c·aⁿ` of the n-th point from the limit.
    #[inline]
    pub fn offset(&self, n: u64) -> f64 {
        if n > MAX_INDEX {
            return 0.0;
        }
        self.scale * self.ratio.powi(n as i32)
    }

    pub fn first_offset(&self) -> f64 {
        self.offset(self.start_index as u64)
    }

    /// Point with index `n` on the copy whose limit sits at `base`.
    #[inline]
    pub(crate) fn point_at(&self, base: f64, n: u64) -> f64 {
        match self.sign {
            Sign::Plus => base - self.offset(n),
            Sign::Minus => base + self.offset(n),
        }
    }

    pub fn point(&self, n: u64) -> Angle {
        Angle::new(self.point_at(self.limit.radians(), n)).expect("finite")
    }

    /// Number of points whose offset is at least `x`.
    pub fn count_offsets_at_least(&self, x: f64) -> u64 {
        let j = self.start_index as u64;
        if x <= 0.0 {
            return u64::MAX;
        }
        if self.offset(j) < x {
            return 0;
        }
        // First index with offset < x, minus j.
        let first_below = self.min_index(self.index_estimate(x), |n| self.offset(n) < x);
        first_below.map_or(MAX_INDEX - j, |n| n - j)
    }

    fn index_estimate(&self, offset: f64) -> f64 {
        if offset <= 0.0 {
            return MAX_INDEX as f64;
        }
        (offset / self.scale).ln() / self.ratio.ln()
    }

    /// Smallest `n ≥ j` with `pred(n)`, for a predicate that is monotone
    /// (false, then true). Starts from an estimate and gallops.
    pub(crate) fn min_index(&self, est: f64, pred: impl Fn(u64) -> bool) -> Option<u64> {
        let j = self.start_index as u64;
        let start = if est.is_finite() {
            est.floor().clamp(j as f64, MAX_INDEX as f64) as u64
        } else if est > 0.0 {
            MAX_INDEX
        } else {
            j
        };
        let bisect = |mut lo: u64, mut hi: u64| {
            // pred(lo) false, pred(hi) true
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if pred(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };
        if pred(start) {
            let mut hi = start;
            let mut step = 1u64;
            loop {
                if hi == j {
                    return Some(j);
                }
                let lo = hi.saturating_sub(step).max(j);
                if !pred(lo) {
                    return Some(bisect(lo, hi));
                }
                hi = lo;
                step = step.saturating_mul(2);
            }
        } else {
            let mut lo = start;
            let mut step = 1u64;
            loop {
                if lo >= MAX_INDEX {
                    return None;
                }
                let hi = lo.saturating_add(step).min(MAX_INDEX);
                if pred(hi) {
                    return Some(bisect(lo, hi));
                }
                lo = hi;
                step = step.saturating_mul(2);
            }
        }
    }

    /// Unrolled limits of the copies that can matter near `x`.
    pub(crate) fn bases_near(&self, x: f64) -> impl Iterator<Item = f64> {
        let l = self.limit.radians();
        let k0 = ((x - l) / TAU).floor();
        (-2..=2).map(move |dk| l + (k0 + dk as f64) * TAU)
    }

    /// `inf { y ∈ copy : y > x }` (may equal `x` when `x` is an accumulation point).
    pub(crate) fn copy_next_after(&self, base: f64, x: f64) -> Option<f64> {
        let j = self.start_index as u64;
        match self.sign {
            Sign::Plus => {
                if x >= base {
                    return None;
                }
                let est = self.index_estimate(base - x);
                let n = self.min_index(est, |n| self.point_at(base, n) > x);
                Some(n.map_or(base, |n| self.point_at(base, n)))
            }
            Sign::Minus => {
                if x <= base {
                    return Some(base);
                }
                if self.point_at(base, j) <= x {
                    return None;
                }
                let est = self.index_estimate(x - base);
                let n = self.min_index(est, |n| self.point_at(base, n) <= x);
                Some(n.map_or(base, |n| self.point_at(base, n - 1)))
            }
        }
    }

    /// `min { y ∈ copy : y ≥ x }`.
    pub(crate) fn copy_next_at_or_after(&self, base: f64, x: f64) -> Option<f64> {
        let j = self.start_index as u64;
        match self.sign {
            Sign::Plus => {
                if x > base {
                    return None;
                }
                if x == base {
                    return Some(base);
                }
                let est = self.index_estimate(base - x);
                let n = self.min_index(est, |n| self.point_at(base, n) >= x);
                Some(n.map_or(base, |n| self.point_at(base, n)))
            }
            Sign::Minus => {
                if x <= base {
                    return Some(base);
                }
                if self.point_at(base, j) < x {
                    return None;
                }
                let est = self.index_estimate(x - base);
                let n = self.min_index(est, |n| self.point_at(base, n) < x);
                Some(n.map_or(base, |n| self.point_at(base, n - 1)))
            }
        }
    }

    /// `max { y ∈ copy : y ≤ x }`.
    pub(crate) fn copy_prev_at_or_before(&self, base: f64, x: f64) -> Option<f64> {
        let j = self.start_index as u64;
        match self.sign {
            Sign::Plus => {
                if x >= base {
                    return Some(base);
                }
                if self.point_at(base, j) > x {
                    return None;
                }
                let est = self.index_estimate(base - x);
                let n = self.min_index(est, |n| self.point_at(base, n) > x);
                Some(n.map_or(base, |n| self.point_at(base, n - 1)))
            }
            Sign::Minus => {
                if x < base {
                    return None;
                }
                if x == base {
                    return Some(base);
                }
                if self.point_at(base, j) <= x {
                    return Some(self.point_at(base, j));
                }
                let est = self.index_estimate(x - base);
                let n = self.min_index(est, |n| self.point_at(base, n) <= x);
                Some(n.map_or(base, |n| self.point_at(base, n)))
            }
        }
    }

    /// Intersection of one copy with the closed window `[lo, hi]`.
    pub(crate) fn copy_window(&self, base: f64, lo: f64, hi: f64) -> WindowHit {
        let mut hit = WindowHit::default();
        let j = self.start_index as u64;
        let index_where = |pred: &dyn Fn(u64) -> bool, off: f64| self.min_index(self.index_estimate(off), pred);
        match self.sign {
            Sign::Plus => {
                if base < lo {
                    return hit;
                }
                if base <= hi {
                    hit.finite.push(base);
                    if base > lo {
                        if let Some(n) = index_where(&|n| self.point_at(base, n) >= lo, base - lo) {
                            hit.tail = Some((n, base));
                        }
                    }
                    return hit;
                }
                let Some(n1) = index_where(&|n| self.point_at(base, n) >= lo, base - lo) else {
                    return hit;
                };
                let n2 = match index_where(&|n| self.point_at(base, n) > hi, base - hi) {
                    Some(n) if n > j => n - 1,
                    Some(_) => return hit,
                    None => MAX_INDEX,
                };
                hit.finite.extend((n1..=n2).map(|n| self.point_at(base, n)));
            }
            Sign::Minus => {
                if base > hi {
                    return hit;
                }
                if base >= lo {
                    hit.finite.push(base);
                    if base < hi {
                        if let Some(n) = index_where(&|n| self.point_at(base, n) <= hi, hi - base) {
                            hit.tail = Some((n, base));
                        }
                    }
                    return hit;
                }
                let Some(n1) = index_where(&|n| self.point_at(base, n) <= hi, hi - base) else {
                    return hit;
                };
                let n2 = match index_where(&|n| self.point_at(base, n) < lo, lo - base) {
                    Some(n) if n > j => n - 1,
                    Some(_) => return hit,
                    None => MAX_INDEX,
                };
                hit.finite.extend((n1..=n2).rev().map(|n| self.point_at(base, n)));
            }
        }
        hit
    }

    /// Membership of an angle, to tolerance.
    pub fn contains(&self, theta: Angle, tol: f64) -> bool {
        let d = signed_offset(self.limit.radians(), theta.radians());
        if d.abs() <= tol {
            return true;
        }
        // θ − L = −sign·offset
        let o = -self.sign.value() * d;
        if o <= 0.0 {
            return false;
        }
        let j = self.start_index as i64;
        let est = self.index_estimate(o).round() as i64;
        (est - 1..=est + 1)
            .filter(|&n| n >= j)
            .any(|n| (self.offset(n as u64) - o).abs() <= tol)
    }

    /// Indices whose offsets exceed `tol`, i.e. points distinguishable from the limit.
    pub fn resolvable_indices(&self, tol: f64) -> std::ops::Range<u64> {
        let j = self.start_index as u64;
        let count = self.count_offsets_at_least(tol).min(MAX_INDEX - j);
        j..j + count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> GeometricCluster {
        GeometricCluster::new(Angle::new(0.0).unwrap(), 0.5, 1.0, Sign::Plus, 1).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        let l = Angle::new(0.0).unwrap();
        assert!(GeometricCluster::new(l, 1.0, 1.0, Sign::Plus, 1).is_err());
        assert!(GeometricCluster::new(l, 0.5, -1.0, Sign::Plus, 1).is_err());
        assert!(GeometricCluster::new(l, 0.5, 1.0, Sign::Plus, 0).is_err());
        assert!(GeometricCluster::new(l, 0.5, 20.0, Sign::Plus, 1).is_err());
    }

    #[test]
    fn next_after_walks_the_tail() {
        let c = half();
        // Points at -0.5, -0.25, -0.125, ... and 0.
        assert_eq!(c.copy_next_after(0.0, -0.6), Some(-0.5));
        assert_eq!(c.copy_next_after(0.0, -0.5), Some(-0.25));
        assert_eq!(c.copy_next_after(0.0, -0.3), Some(-0.25));
        let y = c.copy_next_after(0.0, -1e-300).unwrap();
        assert!(y > -1e-300 && y <= 0.0);
        assert!(2.0 * y <= -1e-300);
        assert_eq!(c.copy_next_after(0.0, 0.0), None);
        assert_eq!(c.copy_prev_at_or_before(0.0, -0.3), Some(-0.5));
        assert_eq!(c.copy_prev_at_or_before(0.0, -0.6), None);
        assert_eq!(c.copy_prev_at_or_before(0.0, 0.1), Some(0.0));
        assert_eq!(c.copy_next_at_or_after(0.0, -0.25), Some(-0.25));
    }

    #[test]
    fn minus_side_queries() {
        let c = GeometricCluster::new(Angle::new(1.0).unwrap(), 0.5, 1.0, Sign::Minus, 1).unwrap();
        assert_eq!(c.copy_next_after(1.0, 0.9), Some(1.0));
        assert_eq!(c.copy_next_after(1.0, 1.0), Some(1.0));
        assert_eq!(c.copy_next_after(1.0, 1.3), Some(1.5));
        assert_eq!(c.copy_next_after(1.0, 1.5), None);
        assert_eq!(c.copy_next_at_or_after(1.0, 1.5), Some(1.5));
        assert_eq!(c.copy_prev_at_or_before(1.0, 1.3), Some(1.25));
        assert_eq!(c.copy_prev_at_or_before(1.0, 2.0), Some(1.5));
    }

    #[test]
    fn window_hits() {
        let c = half();
        let h = c.copy_window(0.0, -0.3, -0.1);
        assert_eq!(h.finite, vec![-0.25, -0.125]);
        assert!(h.tail.is_none());
        let h = c.copy_window(0.0, -0.3, 0.1);
        assert_eq!(h.finite, vec![0.0]);
        assert_eq!(h.tail, Some((2, 0.0)));
        assert!(c.copy_window(0.0, 0.1, 0.2).finite.is_empty());
    }

    #[test]
    fn membership() {
        let c = half();
        assert!(c.contains(Angle::new(-0.125).unwrap(), 1e-12));
        assert!(c.contains(Angle::new(0.0).unwrap(), 1e-12));
        assert!(!c.contains(Angle::new(-0.2).unwrap(), 1e-12));
        assert!(!c.contains(Angle::new(0.125).unwrap(), 1e-12));
        assert_eq!(c.count_offsets_at_least(0.125), 3);
        assert_eq!(c.count_offsets_at_least(0.1), 3);
    }

    #[test]
    fn partial_sum_family() {
        let c = GeometricCluster::partial_sums(0.1, 1).unwrap();
        let direct: f64 = (1..=3).map(|k| 0.1f64.powi(k)).sum();
        assert!((c.point(3).radians() - direct).abs() < 1e-15);
        assert!((c.alpha() - 1.0 / 10f64.ln()).abs() < 1e-15);
    }
}
