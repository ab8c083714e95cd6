use super::dirichlet::{dirichlet_simultaneous, first_in_range, pigeonhole_bound, DirichletCertificate, SearchBudget};
use crate::circle_sets::{optimal_cover, Angle, SymbolicCircleSet};
use crate::error::{invalid, Error, Result};
use crate::numeric::{turn_power, turn_power_minus_one, turns_of};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Tolerance for accepting a complex number as unimodular.
pub const UNIMODULAR_TOL: f64 = 1e-9;

/// Direct evaluation of `sup_{ζ ∈ E} |ζ^q − 1|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupError {
    pub value: f64,
    /// Largest Lipschitz allowance added for unresolved cluster tails.
    pub tail_allowance: f64,
}

/// `sup |ζ^q − 1|` over the set: every point at distance more than
/// `1e−13/q` from its cluster limit is evaluated exactly, and the remaining
/// tail is bounded through `q`-Lipschitz continuity of `θ ↦ |e^{iqθ} − 1|`.
pub fn certified_sup_error(set: &SymbolicCircleSet, q: u64) -> SupError {
    let eval = |a: Angle| turn_power_minus_one(a.turns(), q);
    let mut value = set.points().iter().map(|&p| eval(p)).fold(0.0, f64::max);
    let mut tail_allowance: f64 = 0.0;
    let tau = 1e-13 / q.max(1) as f64;
    for c in set.clusters() {
        let idx = c.resolvable_indices(tau);
        let cut = c.offset(idx.end);
        for n in idx {
            value = value.max(eval(c.point(n)));
        }
        let allowance = q as f64 * cut;
        tail_allowance = tail_allowance.max(allowance);
        value = value.max(eval(c.limit()) + allowance);
    }
    SupError { value, tail_allowance }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceOptions {
    /// Candidate arc lengths, tried from the largest.
    pub epsilon_grid: Vec<f64>,
    /// Added to `2 sin(π/(K−1))` when accepting a candidate.
    pub extra_slack: f64,
    pub budget: SearchBudget,
}

impl Default for RecurrenceOptions {
    fn default() -> Self {
        RecurrenceOptions {
            epsilon_grid: (1..=40).map(|i| 0.5f64.powi(i)).collect(),
            extra_slack: 0.0,
            budget: SearchBudget::default(),
        }
    }
}

/// The default schedule `10, 100, …, 10^count`.
pub fn default_q_schedule(count: u32) -> Vec<u64> {
    (1..=count).map(|i| 10u64.pow(i)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceResult {
    pub q: u64,
    pub sup_error: f64,
    #[serde(rename = "K")]
    pub k: u64,
    pub epsilon_used: f64,
    #[serde(rename = "N_used")]
    pub n_used: usize,
    #[serde(rename = "Q_used")]
    pub q_used: u64,
    /// `2 sin(π/(K−1))`.
    pub target: f64,
    /// `2π·(Q/2)·((K−1)/K)^N`, the a priori allowance of the box argument.
    /// Reported only; acceptance uses the direct evaluation.
    pub dirichlet_slack: f64,
    pub tail_allowance: f64,
    pub certificate: DirichletCertificate,
    pub q_schedule: Vec<u64>,
    /// Number of Dirichlet searches performed.
    pub attempts: usize,
}

/// Searches for `q` with `sup_E |ζ^q − 1| ≤ 2 sin(π/(K−1))`.
///
/// For each arc length `ε` on the grid with `N_ε ≤ log(1/ε)/log K`, the
/// centres of an optimal ε-cover are approximated simultaneously with
/// denominator bound `1/(K−1)`, with `q ≥ Q` for successive `Q` from the
/// schedule. The first `q` whose directly evaluated error meets the target
/// is returned.
pub fn recurrence_exponent(
    set: &SymbolicCircleSet,
    k: u64,
    q_schedule: &[u64],
    opts: &RecurrenceOptions,
) -> Result<RecurrenceResult> {
    if k < 3 {
        return invalid("K must be at least 3");
    }
    if set.is_empty() {
        return invalid("recurrence on the empty set");
    }
    if q_schedule.is_empty() || q_schedule[0] == 0 || q_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("Q schedule must be strictly increasing positive integers");
    }
    let log_k = (k as f64).ln();
    let alpha = set.alpha_analytic();
    if alpha >= 1.0 / log_k {
        return Err(Error::Precondition(format!(
            "thinness index {alpha} is not below 1/log K = {}",
            1.0 / log_k
        )));
    }
    let m = k - 1;
    let target = 2.0 * (PI / m as f64).sin();
    let accept = target + opts.extra_slack;
    let mut attempts = 0;
    let mut best = f64::INFINITY;
    let mut budget_hit = None;

    for &eps in &opts.epsilon_grid {
        let cover = optimal_cover(set, eps)?;
        let n = cover.count;
        if n as f64 > (1.0 / eps).ln() / log_k {
            continue;
        }
        let centers: Vec<f64> = cover
            .starts
            .iter()
            .map(|&s| {
                let hull_end = set.prev_at_or_before(s + eps).unwrap_or(s).max(s);
                let t = (0.5 * (s + hull_end) / TAU).rem_euclid(1.0);
                if t >= 1.0 {
                    0.0
                } else {
                    t
                }
            })
            .collect();
        for &q_min in q_schedule {
            if pigeonhole_bound(q_min, m, n).is_none_or(|b| b - q_min > opts.budget.max_scan) {
                budget_hit = Some((q_min, n));
                break;
            }
            attempts += 1;
            let cert = dirichlet_simultaneous(&centers, m, q_min, &opts.budget)?;
            let sup = certified_sup_error(set, cert.q);
            best = best.min(sup.value);
            if sup.value <= accept {
                let slack = TAU * (q_min as f64 / 2.0) * ((m as f64) / (k as f64)).powi(n as i32);
                return Ok(RecurrenceResult {
                    q: cert.q,
                    sup_error: sup.value,
                    k,
                    epsilon_used: eps,
                    n_used: n,
                    q_used: q_min,
                    target,
                    dirichlet_slack: slack,
                    tail_allowance: sup.tail_allowance,
                    certificate: cert,
                    q_schedule: q_schedule.to_vec(),
                    attempts,
                });
            }
        }
    }
    if best.is_infinite() {
        if let Some((q_min, n)) = budget_hit {
            return Err(Error::Resource {
                what: "Dirichlet bound Q·(K−1)^N".into(),
                needed: q_min as f64 * (m as f64).powi(n as i32),
                cap: opts.budget.max_scan as f64,
            });
        }
    }
    Err(Error::NotFound(format!(
        "no exponent reached error {accept} after {attempts} searches (best {best})"
    )))
}

fn turn_coordinates(lambdas: &[Complex64]) -> Result<Vec<f64>> {
    if lambdas.is_empty() {
        return invalid("need at least one unimodular number");
    }
    lambdas
        .iter()
        .map(|z| {
            if !z.re.is_finite() || !z.im.is_finite() || (z.norm() - 1.0).abs() > UNIMODULAR_TOL {
                invalid(format!("{z} is not unimodular"))
            } else {
                Ok(turns_of(*z))
            }
        })
        .collect()
}

fn max_return_error(t: &[f64], n: u64) -> f64 {
    t.iter().map(|&tj| turn_power_minus_one(tj, n)).fold(0.0, f64::max)
}

/// Smallest `n ≥ 1` with `max_j |λ_jⁿ − 1| ≤ delta`.
pub fn near_recurrence_to_identity(lambdas: &[Complex64], delta: f64, budget: &SearchBudget) -> Result<u64> {
    let t = turn_coordinates(lambdas)?;
    if !(delta > 0.0 && delta < 2.0) {
        return invalid("delta must lie in (0, 2)");
    }
    let side = (8.0 / delta).ceil() as u64;
    let bound = side.checked_pow(t.len() as u32).filter(|&b| b <= budget.max_scan).ok_or_else(|| Error::Resource {
        what: "near-recurrence box bound".into(),
        needed: (side as f64).powi(t.len() as i32),
        cap: budget.max_scan as f64,
    })?;
    first_in_range(1, bound, |n| max_return_error(&t, n) <= delta)
        .ok_or_else(|| Error::NotFound(format!("no return within {delta} up to {bound}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLimit {
    pub indices: Vec<u64>,
    pub xi: Vec<Complex64>,
    /// `max_j |λ_j^{n_k} − ξ_j|` for each index.
    pub residuals: Vec<f64>,
}

/// Increasing `n_k` with `λ^{n_k} → ξ` along the tolerance schedule.
///
/// `n_1` is the first near return within `tol_schedule[0]` and `ξ = λ^{n_1}`;
/// later indices are `n_1 + r_k` where `r_k` is the next return within
/// `tol_schedule[k]`, so `|λ^{n_k} − ξ| = |λ^{r_k} − 1|`.
pub fn weak_limit_subsequence(
    lambdas: &[Complex64],
    count: usize,
    tol_schedule: &[f64],
    budget: &SearchBudget,
) -> Result<WeakLimit> {
    let t = turn_coordinates(lambdas)?;
    if count < 1 {
        return invalid("count must be at least 1");
    }
    if tol_schedule.len() < count {
        return invalid("tolerance schedule shorter than count");
    }
    if tol_schedule[..count].iter().any(|&x| !(x > 0.0 && x < 2.0)) || tol_schedule.windows(2).any(|w| w[1] > w[0]) {
        return invalid("tolerances must be decreasing and lie in (0, 2)");
    }
    let n1 = near_recurrence_to_identity(lambdas, tol_schedule[0], budget)?;
    let xi: Vec<Complex64> = t.iter().map(|&tj| turn_power(tj, n1 as i64)).collect();
    let mut indices = vec![n1];
    let mut r_prev = 0u64;
    for &tol in &tol_schedule[1..count] {
        let hi = r_prev.saturating_add(budget.max_scan);
        let r = first_in_range(r_prev + 1, hi, |r| max_return_error(&t, r) <= tol).ok_or_else(|| Error::Resource {
            what: format!("return within {tol}"),
            needed: f64::INFINITY,
            cap: budget.max_scan as f64,
        })?;
        indices.push(n1 + r);
        r_prev = r;
    }
    let residuals = indices
        .iter()
        .map(|&n| {
            t.iter()
                .zip(&xi)
                .map(|(&tj, x)| (turn_power(tj, n as i64) - x).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(WeakLimit { indices, xi, residuals })
}
