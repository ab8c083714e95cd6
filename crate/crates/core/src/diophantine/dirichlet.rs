use crate::error::{invalid, Error, Result};
use crate::numeric::nearest_integer_residual;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Largest scan length any search is allowed to perform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_scan: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_scan: 2_000_000_000 }
    }
}

/// Scans shorter than this run on the calling thread.
const PARALLEL_THRESHOLD: u64 = 1 << 18;

/// Witness for a simultaneous approximation `|q·t_j − p_j| ≤ 1/m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletCertificate {
    pub q: u64,
    pub p: Vec<i64>,
    pub m: u64,
    #[serde(rename = "Q")]
    pub big_q: u64,
    pub max_residual: f64,
}

impl DirichletCertificate {
    /// The guaranteed search bound `Q·m^N`.
    pub fn bound(&self) -> Option<u64> {
        pigeonhole_bound(self.big_q, self.m, self.p.len())
    }
}

pub(crate) fn pigeonhole_bound(q_min: u64, m: u64, dims: usize) -> Option<u64> {
    let dims = u32::try_from(dims).ok()?;
    m.checked_pow(dims).and_then(|p| p.checked_mul(q_min))
}

fn max_residual(q: u64, t: &[f64]) -> f64 {
    t.iter().map(|&tj| nearest_integer_residual(q, tj).1.abs()).fold(0.0, f64::max)
}

fn certificate(q: u64, t: &[f64], m: u64, big_q: u64) -> DirichletCertificate {
    let p = t.iter().map(|&tj| nearest_integer_residual(q, tj).0).collect();
    DirichletCertificate { q, p, m, big_q, max_residual: max_residual(q, t) }
}

/// Smallest `n` in `lo..=hi` with `pred(n)`, splitting long ranges across
/// the thread pool. The answer does not depend on the partitioning.
pub(crate) fn first_in_range(lo: u64, hi: u64, pred: impl Fn(u64) -> bool + Sync) -> Option<u64> {
    if lo > hi {
        return None;
    }
    if hi - lo < PARALLEL_THRESHOLD {
        return (lo..=hi).find(|&n| pred(n));
    }
    let mut start = lo;
    // Growing chunks keep early hits cheap while large scans stay parallel.
    let mut chunk = PARALLEL_THRESHOLD;
    loop {
        let end = start.saturating_add(chunk - 1).min(hi);
        if let Some(n) = (start..=end).into_par_iter().find_first(|&n| pred(n)) {
            return Some(n);
        }
        if end == hi {
            return None;
        }
        start = end + 1;
        chunk = chunk.saturating_mul(2).min(1 << 26);
    }
}

/// The smallest `q ≥ Q` with `max_j ‖q·t_j‖ ≤ 1/m`.
///
/// The box principle guarantees `q ≤ Q·m^N`; the scan stops there. Ties
/// `‖q·t_j‖ = 1/m` count as admissible.
pub fn dirichlet_simultaneous(t: &[f64], m: u64, q_min: u64, budget: &SearchBudget) -> Result<DirichletCertificate> {
    validate(t, m, q_min)?;
    let bound = pigeonhole_bound(q_min, m, t.len()).ok_or_else(|| Error::Resource {
        what: "Dirichlet bound Q·m^N".into(),
        needed: q_min as f64 * (m as f64).powi(t.len() as i32),
        cap: budget.max_scan as f64,
    })?;
    if bound - q_min > budget.max_scan {
        return Err(Error::Resource {
            what: "Dirichlet bound Q·m^N".into(),
            needed: bound as f64,
            cap: budget.max_scan as f64,
        });
    }
    let limit = 1.0 / m as f64;
    let q = first_in_range(q_min, bound, |q| t.iter().all(|&tj| nearest_integer_residual(q, tj).1.abs() <= limit))
        .ok_or_else(|| Error::NotFound(format!("no admissible q up to the box bound {bound}")))?;
    Ok(certificate(q, t, m, q_min))
}

/// Box-principle construction: among `m^N + 1` multiples `kQ` two share a
/// box of side `1/m`, and their difference is admissible. Returns a valid
/// certificate that need not be minimal.
pub fn dirichlet_pigeonhole(t: &[f64], m: u64, q_min: u64, budget: &SearchBudget) -> Result<DirichletCertificate> {
    validate(t, m, q_min)?;
    let boxes = m
        .checked_pow(t.len() as u32)
        .filter(|&b| b <= budget.max_scan.min(50_000_000))
        .ok_or_else(|| Error::Resource {
            what: "pigeonhole box count m^N".into(),
            needed: (m as f64).powi(t.len() as i32),
            cap: budget.max_scan.min(50_000_000) as f64,
        })?;
    let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
    for k in 0..=boxes {
        let kq = k.checked_mul(q_min).ok_or_else(|| Error::InvalidInput("k·Q overflows".into()))?;
        let key: Vec<u64> = t
            .iter()
            .map(|&tj| {
                let (_, r) = nearest_integer_residual(kq, tj);
                // fractional part in [0, 1)
                let frac = if r < 0.0 { r + 1.0 } else { r };
                ((frac * m as f64).floor() as u64).min(m - 1)
            })
            .collect();
        if let Some(&k0) = seen.get(&key) {
            let q = (k - k0) * q_min;
            return Ok(certificate(q, t, m, q_min));
        }
        seen.insert(key, k);
    }
    Err(Error::NotFound("pigeonhole failed to find a collision".into()))
}

fn validate(t: &[f64], m: u64, q_min: u64) -> Result<()> {
    if t.is_empty() {
        return invalid("need at least one real to approximate");
    }
    if t.iter().any(|x| !x.is_finite()) {
        return invalid("approximated reals must be finite");
    }
    if m < 2 {
        return invalid("m must be at least 2");
    }
    if q_min < 1 {
        return invalid("Q must be positive");
    }
    Ok(())
}
