use super::model::SimilarityModel;
use crate::error::{invalid, Error, Result};
use crate::linalg::{identity, spectral_norm, CMatrix};
use serde::{Deserialize, Serialize};

/// Norms above this mean the configuration is not power bounded.
pub const OVERFLOW_GUARD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    pub direction: Direction,
    /// `‖T^{±n}‖` for `n = 0..=N`.
    pub norms: Vec<f64>,
    /// Running maximum of `norms`.
    pub running_max: Vec<f64>,
    /// Whether every norm lies in `[1/κ(Y), κ(Y)]`, up to rounding.
    pub within_similarity_bound: bool,
}

impl PowerProfile {
    pub fn max(&self) -> f64 {
        self.running_max.last().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.norms.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Norms of successive powers, formed by repeated multiplication.
pub fn power_norm_profile(model: &SimilarityModel, n: usize, direction: Direction) -> Result<PowerProfile> {
    if n < 1 {
        return invalid("profile length N must be at least 1");
    }
    let step: &CMatrix = match direction {
        Direction::Forward => model.t(),
        Direction::Inverse => model.t_inv(),
    };
    let d = model.dim();
    let mut p = identity(d);
    let mut norms = Vec::with_capacity(n + 1);
    let mut running_max = Vec::with_capacity(n + 1);
    let mut top: f64 = 0.0;
    for power in 0..=n {
        if power > 0 {
            p = &p * step;
        }
        let v = spectral_norm(&p)?;
        if !(v <= OVERFLOW_GUARD) {
            return Err(Error::Overflow { power, norm: v });
        }
        top = top.max(v);
        norms.push(v);
        running_max.push(top);
    }
    let k = model.kappa();
    let slack = 1e-9 * (1.0 + n as f64 * f64::EPSILON * 1e3);
    let within_similarity_bound = norms.iter().all(|&v| v <= k * (1.0 + slack) && v * k >= 1.0 - slack);
    Ok(PowerProfile { direction, norms, running_max, within_similarity_bound })
}

/// `(max_{0≤n≤N} ‖Tⁿ‖, max_{0≤n≤N} ‖T⁻ⁿ‖)`.
pub fn power_windows(model: &SimilarityModel, n: usize) -> Result<(f64, f64)> {
    let f = power_norm_profile(model, n, Direction::Forward)?;
    let b = power_norm_profile(model, n, Direction::Inverse)?;
    Ok((f.max(), b.max()))
}
