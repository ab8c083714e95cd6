use super::atomic::AtomicMeasure;
use crate::diophantine::first_in_range;
use crate::error::{invalid, Error, Result};
use crate::numeric::{nearest_integer_residual, sin_pi, turn_power, turns_of, CompensatedSum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A windowed maximum of `|coefficient|` with the index attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowMax {
    pub value: f64,
    pub n: i64,
}

/// Larger value wins; ties go to the smaller index, so the reduction is
/// independent of how the window is split.
fn better(a: WindowMax, b: WindowMax) -> WindowMax {
    match a.value.total_cmp(&b.value) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.n <= b.n {
                a
            } else {
                b
            }
        }
    }
}

fn window_max(lo: i64, hi: i64, f: impl Fn(i64) -> f64 + Sync) -> WindowMax {
    (lo..=hi)
        .into_par_iter()
        .map(|n| WindowMax { value: f(n), n })
        .reduce(|| WindowMax { value: f64::NEG_INFINITY, n: i64::MAX }, better)
}

/// `max_{n_min ≤ n ≤ n_max} |μ̂(n)|`, a finite-window proxy for the limsup.
pub fn limsup_abs_fourier(mu: &AtomicMeasure, n_min: i64, n_max: i64) -> Result<WindowMax> {
    if !(0 <= n_min && n_min < n_max) {
        return invalid(format!("window [{n_min}, {n_max}] must satisfy 0 ≤ n_min < n_max"));
    }
    Ok(window_max(n_min, n_max, |n| mu.fourier_coefficient(n).norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    /// `total_mass / window_max`, never below 1.
    pub value: f64,
    pub window_max: f64,
    pub achieving_n: i64,
    pub total_mass: f64,
}

/// Windowed upper estimate of the smallest `K` with `μ(𝕋) ≤ K·limsup|μ̂(n)|`.
///
/// `|μ̂(n)| ≤ μ̂(0)` holds exactly; rounding can push the window maximum a few
/// ulps above the mass, so the ratio is floored at 1.
pub fn k_condition_estimate(mu: &AtomicMeasure, n_min: i64, n_max: i64) -> Result<KEstimate> {
    let w = limsup_abs_fourier(mu, n_min, n_max)?;
    let mass = mu.total_mass();
    if w.value <= 0.0 {
        return Err(Error::DivisionDomain(format!("coefficients vanish on [{n_min}, {n_max}]")));
    }
    Ok(KEstimate { value: (mass / w.value).max(1.0), window_max: w.value, achieving_n: w.n, total_mass: mass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub indices: Vec<u64>,
    pub xi: Complex64,
    /// `Σ w_j |ζ_j^{n_last} − ξ|²`.
    pub dispersion: f64,
    /// `2·tol·μ(𝕋)`.
    pub dispersion_bound: f64,
}

/// Indices where `|μ̂(n)|` is within a factor `1 − tol` of the mass, and the
/// point `ξ` the powers `ζ^n` concentrate at.
///
/// With `ξ = conj μ̂(n)/|μ̂(n)|` the dispersion equals `2(μ(𝕋) − |μ̂(n)|)`,
/// which is at most `2·tol·μ(𝕋)`; the bound is re-checked on the result.
pub fn lemma28_extract(mu: &AtomicMeasure, tol: f64, count: usize, n_max: u64) -> Result<Concentration> {
    if !(tol > 0.0 && tol < 1.0) {
        return invalid("tol must lie in (0, 1)");
    }
    if count == 0 {
        return invalid("count must be positive");
    }
    let mass = mu.total_mass();
    let threshold = (1.0 - tol) * mass;
    let mut indices = Vec::with_capacity(count);
    let mut from = 1u64;
    while indices.len() < count {
        let Some(n) = first_in_range(from, n_max, |n| mu.fourier_coefficient(n as i64).norm() >= threshold) else {
            return Err(Error::NotFound(format!(
                "only {} of {count} indices with |μ̂(n)| ≥ (1 − {tol})·mass up to {n_max}",
                indices.len()
            )));
        };
        indices.push(n);
        from = n + 1;
    }
    let last = *indices.last().expect("count > 0");
    let c = mu.fourier_coefficient(last as i64);
    let xi = c.conj() / c.norm();
    let dispersion = mu.integrate(|t| (turn_power(t, last as i64) - xi).norm_sqr());
    let dispersion_bound = 2.0 * tol * mass;
    // Allow for rounding in the two sums compared.
    if dispersion > dispersion_bound + 1e-12 * mass {
        return Err(Error::Precondition(format!(
            "dispersion {dispersion} exceeds {dispersion_bound} at n = {last}"
        )));
    }
    Ok(Concentration { indices, xi, dispersion, dispersion_bound })
}

/// `|Im ζⁿ|` from the turn coordinate of `ζ`.
fn abs_im_power(t: f64, n: u64) -> f64 {
    let (_, r) = nearest_integer_residual(n, t);
    sin_pi(2.0 * r).abs()
}

fn check_unimodular(zeta: Complex64) -> Result<f64> {
    if !zeta.re.is_finite() || !zeta.im.is_finite() || (zeta.norm() - 1.0).abs() > crate::diophantine::UNIMODULAR_TOL {
        return invalid(format!("{zeta} is not unimodular"));
    }
    Ok(turns_of(zeta))
}

/// `Σ_{n=1}^N a_n |Im ζⁿ|`, where `weights[0]` is `a_1`.
pub fn absolute_convergence_partial(weights: &[f64], zeta: Complex64, n: usize) -> Result<f64> {
    if n > weights.len() {
        return invalid(format!("N = {n} exceeds the {} weights given", weights.len()));
    }
    if weights.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
        return invalid("weights must be nonnegative and finite");
    }
    let t = check_unimodular(zeta)?;
    Ok(weights[..n]
        .iter()
        .enumerate()
        .map(|(i, &a)| a * abs_im_power(t, i as u64 + 1))
        .collect::<CompensatedSum>()
        .value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizingTerm {
    pub n: u64,
    /// `∫ |Im ζⁿ| dμ`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizingSequence {
    pub terms: Vec<MinimizingTerm>,
    /// `Σ_k value_k`, the summability certificate.
    pub total: f64,
}

/// `∫ |Im ζⁿ| dμ(ζ)`.
pub fn imaginary_moment(mu: &AtomicMeasure, n: u64) -> f64 {
    mu.integrate(|t| abs_im_power(t, n))
}

/// Greedy increasing indices with `∫|Im ζ^{n_k}| dμ ≤ targets[k]`.
pub fn minimizing_sequence(mu: &AtomicMeasure, targets: &[f64], n_cap: u64) -> Result<MinimizingSequence> {
    if targets.iter().any(|&t| !(t > 0.0)) || targets.windows(2).any(|w| w[1] > w[0]) {
        return invalid("targets must be positive and decreasing");
    }
    let mut terms = Vec::with_capacity(targets.len());
    let mut from = 1u64;
    for (k, &target) in targets.iter().enumerate() {
        let n = first_in_range(from, n_cap, |n| imaginary_moment(mu, n) <= target).ok_or_else(|| {
            Error::NotFound(format!("target {k} ({target}) not reached below n = {n_cap}"))
        })?;
        terms.push(MinimizingTerm { n, value: imaginary_moment(mu, n) });
        from = n + 1;
    }
    let total = terms.iter().map(|t| t.value).collect::<CompensatedSum>().value();
    Ok(MinimizingSequence { terms, total })
}

/// A bounded two-sided coefficient sequence.
#[derive(Clone)]
pub struct Pseudomeasure {
    coeff: Arc<dyn Fn(i64) -> Complex64 + Send + Sync>,
    bound: f64,
}

impl std::fmt::Debug for Pseudomeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Pseudomeasure").field("bound", &self.bound).finish_non_exhaustive()
    }
}

impl Pseudomeasure {
    pub fn new(coeff: impl Fn(i64) -> Complex64 + Send + Sync + 'static, bound: f64) -> Result<Self> {
        if !(bound >= 0.0 && bound.is_finite()) {
            return invalid("pseudomeasure bound must be finite and nonnegative");
        }
        Ok(Pseudomeasure { coeff: Arc::new(coeff), bound })
    }

    /// Coefficients of a measure, bounded by its mass.
    pub fn from_measure(mu: &AtomicMeasure) -> Self {
        let m = mu.clone();
        let bound = mu.total_mass() * (1.0 + 1e-12);
        Pseudomeasure { coeff: Arc::new(move |n| m.fourier_coefficient(n)), bound }
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// The `n`-th coefficient, rejecting any that breaks the declared bound.
    pub fn coeff(&self, n: i64) -> Result<Complex64> {
        let c = (self.coeff)(n);
        if !(c.norm() <= self.bound * (1.0 + 1e-12)) {
            return invalid(format!("coefficient {n} has modulus {} above the bound {}", c.norm(), self.bound));
        }
        Ok(c)
    }

    fn window_abs_max(&self, lo: i64, hi: i64) -> Result<WindowMax> {
        let w = window_max(lo, hi, |n| {
            let v = (self.coeff)(n).norm();
            if v <= self.bound * (1.0 + 1e-12) {
                v
            } else {
                f64::INFINITY
            }
        });
        if w.value.is_infinite() {
            return invalid(format!("coefficient {} breaks the declared bound {}", w.n, self.bound));
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudomeasureRatio {
    pub value: f64,
    pub sup: WindowMax,
    pub window_max: WindowMax,
}

/// `max_{|n| ≤ n_max} |c(n)|` divided by `max_{lo ≤ n ≤ hi} |c(n)|`.
pub fn pseudomeasure_ratio(p: &Pseudomeasure, n_max: i64, window: (i64, i64)) -> Result<PseudomeasureRatio> {
    let (lo, hi) = window;
    if n_max < 0 || lo > hi {
        return invalid("windows must be nonempty");
    }
    let sup = p.window_abs_max(-n_max, n_max)?;
    let wmax = p.window_abs_max(lo, hi)?;
    if wmax.value <= 0.0 {
        return Err(Error::DivisionDomain(format!("coefficients vanish on [{lo}, {hi}]")));
    }
    Ok(PseudomeasureRatio { value: sup.value / wmax.value, sup, window_max: wmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_sets::Angle;
    use crate::measures::Atom;

    #[test]
    fn single_atom_window() {
        let m = AtomicMeasure::new(vec![Atom { angle: Angle::new(0.7).unwrap(), weight: 3.0 }]).unwrap();
        let w = limsup_abs_fourier(&m, 0, 100).unwrap();
        assert!((w.value - 3.0).abs() < 1e-14);
        assert_eq!(k_condition_estimate(&m, 1, 50).unwrap().value, 1.0);
        assert!(limsup_abs_fourier(&m, 5, 5).is_err());
    }

    #[test]
    fn roots_of_unity_are_exact() {
        let m = AtomicMeasure::roots_of_unity(5, 2.0).unwrap();
        let k = k_condition_estimate(&m, 1, 100).unwrap();
        assert_eq!(k.value, 1.0);
        assert_eq!(k.achieving_n % 5, 0);
        let c = lemma28_extract(&m, 0.01, 3, 100).unwrap();
        assert_eq!(c.indices, vec![5, 10, 15]);
        assert!((c.xi - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let s = minimizing_sequence(&m, &[0.1, 0.01, 0.001], 1000).unwrap();
        assert_eq!(s.terms.iter().map(|t| t.n).collect::<Vec<_>>(), vec![5, 10, 15]);
    }

    #[test]
    fn absolute_convergence_trivial_cases() {
        let a: Vec<f64> = (1..=50).map(|n| 1.0 / n as f64).collect();
        assert_eq!(absolute_convergence_partial(&a, Complex64::new(1.0, 0.0), 50).unwrap(), 0.0);
        assert_eq!(absolute_convergence_partial(&a, Complex64::new(-1.0, 0.0), 50).unwrap(), 0.0);
        assert!(absolute_convergence_partial(&a, Complex64::new(1.0, 0.0), 51).is_err());
    }

    #[test]
    fn constant_pseudomeasure() {
        let p = Pseudomeasure::new(|_| Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert_eq!(pseudomeasure_ratio(&p, 100, (1000, 2000)).unwrap().value, 1.0);
        let bad = Pseudomeasure::new(|n| Complex64::new(n as f64, 0.0), 1.0).unwrap();
        assert!(pseudomeasure_ratio(&bad, 10, (0, 1)).is_err());
        assert!(bad.coeff(5).is_err());
    }
}
