//! Exact covering numbers by closed arcs.
//!
//! For a fixed start point `s ∈ E`, sweeping left to right and always
//! starting the next arc at the infimum of the still uncovered points gives
//! the minimal cover among covers having an arc that begins at `s`. Some
//! arc of an optimal cover contains a fixed anchor `p ∈ E`, and after
//! sliding that arc right until it starts on a point of the set, its start
//! lies in `E ∩ [p − ε, p]`. So the covering number is the minimum of the
//! greedy count over starts in that window.
//!
//! The window can contain infinitely many points when a cluster limit lies
//! in it. Along such a tail the greedy count stops changing once the second
//! arc start and the overflow point no longer move, and both conditions are
//! checked explicitly before the enumeration stops.

use super::cluster::Sign;
use super::set::SymbolicCircleSet;
use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Default cap on the resolvable point count of one covering computation.
pub const DEFAULT_POINT_CAP: u64 = 5_000_000;

/// Tail enumeration gives up after this many candidate starts.
const TAIL_ENUMERATION_CAP: u64 = 100_000;

/// An optimal cover: arc starts on the unrolled line, each arc `[s, s + ε]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub epsilon: f64,
    pub count: usize,
    pub starts: Vec<f64>,
}

impl Cover {
    /// Arc midpoints, as turns in `[0, 1)`.
    pub fn center_turns(&self) -> Vec<f64> {
        self.starts
            .iter()
            .map(|s| {
                let t = ((s + 0.5 * self.epsilon) / TAU).rem_euclid(1.0);
                if t >= 1.0 {
                    0.0
                } else {
                    t
                }
            })
            .collect()
    }
}

const WRAP_ULPS: f64 = 8.0;

struct GreedyRun {
    starts: Vec<f64>,
    /// The first infimum of uncovered points at or past `s + 2π`.
    overflow: f64,
}

impl GreedyRun {
    fn count(&self) -> usize {
        self.starts.len()
    }
    fn second(&self) -> f64 {
        self.starts.get(1).copied().unwrap_or(self.overflow)
    }
}

fn greedy_from(set: &SymbolicCircleSet, s: f64, eps: f64) -> GreedyRun {
    // The copy of `s` one turn later is computed by a different route and
    // can land a few ulps short of `s + 2π`.
    let end = s + TAU - WRAP_ULPS * f64::EPSILON * (s.abs() + TAU);
    let mut starts = vec![s];
    let mut y = s;
    loop {
        let z = set.next_after(y + eps).expect("nonempty set has successors");
        if z >= end {
            return GreedyRun { starts, overflow: z };
        }
        starts.push(z);
        y = z;
    }
}

/// Minimal number of closed arcs of length `epsilon` covering the set.
pub fn covering_number(set: &SymbolicCircleSet, epsilon: f64) -> Result<usize> {
    Ok(optimal_cover(set, epsilon)?.count)
}

/// An optimal cover together with its arcs.
pub fn optimal_cover(set: &SymbolicCircleSet, epsilon: f64) -> Result<Cover> {
    optimal_cover_capped(set, epsilon, DEFAULT_POINT_CAP)
}

pub fn optimal_cover_capped(set: &SymbolicCircleSet, epsilon: f64, point_cap: u64) -> Result<Cover> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return invalid(format!("arc length {epsilon} must be positive and finite"));
    }
    if set.is_empty() {
        return invalid("cannot cover the empty set");
    }
    if epsilon >= TAU {
        let s = set.next_at_or_after(0.0).expect("nonempty");
        return Ok(Cover { epsilon, count: 1, starts: vec![s] });
    }
    let needed = set.resolvable_count(epsilon);
    if needed > point_cap {
        return Err(Error::Resource {
            what: "resolvable points for covering".into(),
            needed: needed as f64,
            cap: point_cap as f64,
        });
    }

    let (finite, tails) = best_anchor_window(set, epsilon);
    let mut best: Option<GreedyRun> = None;
    let mut consider = |run: GreedyRun| -> bool {
        let done = run.count() == 1;
        if best.as_ref().is_none_or(|b| run.count() < b.count()) {
            best = Some(run);
        }
        done
    };

    for &s in &finite {
        if consider(greedy_from(set, s, epsilon)) {
            return Ok(finish(best, epsilon));
        }
    }

    for (ci, n_first, base) in tails {
        let c = &set.clusters()[ci];
        match c.sign() {
            Sign::Plus => {
                for n in n_first..n_first.saturating_add(TAIL_ENUMERATION_CAP) {
                    let s = c.point_at(base, n);
                    if s >= base {
                        break;
                    }
                    let run = greedy_from(set, s, epsilon);
                    let stable = run.second() >= base + epsilon && run.overflow >= base + TAU;
                    if consider(run) {
                        return Ok(finish(best, epsilon));
                    }
                    if stable {
                        break;
                    }
                }
            }
            Sign::Minus => {
                let second_at_limit = set.next_after(base + epsilon).expect("nonempty");
                for n in n_first..n_first.saturating_add(TAIL_ENUMERATION_CAP) {
                    let s = c.point_at(base, n);
                    if s <= base {
                        break;
                    }
                    let run = greedy_from(set, s, epsilon);
                    let last = *run.starts.last().expect("at least one arc");
                    let stable = run.second() == second_at_limit && last <= base + TAU;
                    if consider(run) {
                        return Ok(finish(best, epsilon));
                    }
                    if stable {
                        break;
                    }
                }
            }
        }
    }
    Ok(finish(best, epsilon))
}

fn finish(best: Option<GreedyRun>, epsilon: f64) -> Cover {
    let run = best.expect("anchor window always contains the anchor");
    Cover { epsilon, count: run.count(), starts: run.starts }
}

type Tail = (usize, u64, f64);

/// Candidate starts in `E ∩ [p − ε, p]` for the anchor `p` that minimises
/// the number of infinite tails, then the number of finite candidates.
fn best_anchor_window(set: &SymbolicCircleSet, eps: f64) -> (Vec<f64>, Vec<Tail>) {
    let mut anchors: Vec<f64> = set.points().iter().map(|p| p.radians()).collect();
    for c in set.clusters() {
        anchors.push(c.limit().radians());
        anchors.push(c.point(c.start_index() as u64).radians());
    }
    let mut best: Option<(usize, usize, Vec<f64>, Vec<Tail>)> = None;
    for p in anchors {
        let (finite, tails) = window(set, p - eps, p);
        let key = (tails.len(), finite.len());
        if best.as_ref().is_none_or(|b| key < (b.0, b.1)) {
            best = Some((key.0, key.1, finite, tails));
        }
        if key == (0, 1) {
            break;
        }
    }
    let (_, _, finite, tails) = best.expect("nonempty set has an anchor");
    (finite, tails)
}

fn window(set: &SymbolicCircleSet, lo: f64, hi: f64) -> (Vec<f64>, Vec<Tail>) {
    let mut finite = Vec::new();
    let mut tails = Vec::new();
    for p in set.points() {
        let th = p.radians();
        let k0 = ((lo - th) / TAU).floor();
        for dk in -1..=2 {
            let y = th + (k0 + dk as f64) * TAU;
            if y >= lo && y <= hi {
                finite.push(y);
            }
        }
    }
    for (ci, c) in set.clusters().iter().enumerate() {
        for base in c.bases_near(hi) {
            let hit = c.copy_window(base, lo, hi);
            finite.extend(hit.finite);
            if let Some((n, b)) = hit.tail {
                tails.push((ci, n, b));
            }
        }
    }
    finite.sort_by(f64::total_cmp);
    finite.dedup();
    (finite, tails)
}

/// Covering-number profile on a geometric grid of arc lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringProfile {
    pub entries: Vec<CoverEntry>,
    /// Least-squares slope of `N_ε` against `log(1/ε)` over the grid.
    pub alpha_empirical: f64,
    /// Minimum of `N_ε / log(1/ε)` over the second half of the grid.
    pub liminf_ratio: f64,
    pub alpha_analytic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverEntry {
    pub epsilon: f64,
    pub n_eps: usize,
}

impl CoverEntry {
    /// `N_ε / log(1/ε)`, or `None` for `ε ≥ 1`.
    pub fn ratio(&self) -> Option<f64> {
        let l = -self.epsilon.ln();
        (l > 0.0).then(|| self.n_eps as f64 / l)
    }
}

/// Covering numbers on `eps_i = eps0·rhoⁱ`, `i < steps`, with the
/// empirical thinness index read off the profile.
///
/// The slope estimator is used because for a geometric cluster
/// `N_ε = log(1/ε)/log(1/a) + O(1)`; the bounded term biases the plain ratio
/// by `O(1/log(1/ε))` but leaves the slope unbiased.
pub fn alpha_empirical(set: &SymbolicCircleSet, eps0: f64, rho: f64, steps: usize) -> Result<CoveringProfile> {
    alpha_empirical_capped(set, eps0, rho, steps, DEFAULT_POINT_CAP)
}

pub fn alpha_empirical_capped(
    set: &SymbolicCircleSet,
    eps0: f64,
    rho: f64,
    steps: usize,
    point_cap: u64,
) -> Result<CoveringProfile> {
    if !(eps0 > 0.0) || !eps0.is_finite() {
        return invalid("eps0 must be positive");
    }
    if !(rho > 0.0 && rho < 1.0) {
        return invalid("rho must lie in (0, 1)");
    }
    if steps < 2 {
        return invalid("at least two grid steps are required");
    }
    let last = eps0 * rho.powi((steps - 1) as i32);
    if !(last > 0.0) {
        return invalid("grid underflows to zero");
    }
    let needed = set.resolvable_count(last);
    if needed > point_cap {
        return Err(Error::Resource {
            what: "resolvable points on the finest grid level".into(),
            needed: needed as f64,
            cap: point_cap as f64,
        });
    }
    let entries = (0..steps)
        .map(|i| {
            let epsilon = eps0 * rho.powi(i as i32);
            optimal_cover_capped(set, epsilon, point_cap).map(|c| CoverEntry { epsilon, n_eps: c.count })
        })
        .collect::<Result<Vec<_>>>()?;

    let ratios: Vec<f64> = entries[steps / 2..].iter().filter_map(|e| e.ratio()).collect();
    let liminf_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let liminf_ratio = if liminf_ratio.is_finite() { liminf_ratio } else { 0.0 };

    let pts: Vec<(f64, f64)> = entries
        .iter()
        .filter(|e| e.epsilon < 1.0)
        .map(|e| (-e.epsilon.ln(), e.n_eps as f64))
        .collect();
    let alpha = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if sxx > 0.0 {
            (sxy / sxx).max(0.0)
        } else {
            liminf_ratio
        }
    } else {
        liminf_ratio
    };
    Ok(CoveringProfile {
        entries,
        alpha_empirical: alpha,
        liminf_ratio,
        alpha_analytic: set.alpha_analytic(),
    })
}
