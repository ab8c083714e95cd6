//! Minimal-ℓ¹ interpolation by a log-barrier method on the dual
//!
//! ```text
//! maximize Re⟨b, y⟩  subject to  |(V* y)_n| ≤ 1,  n = 0..D,
//! ```
//!
//! whose central path yields primal iterates `c_n = 2u_n / (t(1 − |u_n|²))`,
//! `u = V* y`. The primal is then polished on the active set by a
//! nonnegative least-squares fit of the moduli.

use super::nnls::nnls;
use super::polynomial::{AnalyticPolynomial, InterpolationProblem};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interpolant {
    pub poly: AnalyticPolynomial,
    /// Dual vector on the nodes; `max_n |Σ_j conj(ζ_jⁿ) y_j| ≤ 1`.
    pub dual: Vec<Complex64>,
    /// `Re⟨b, y⟩`, a lower bound for every degree-`≤ D` interpolant.
    pub dual_value: f64,
    pub primal_norm: f64,
    /// `(primal_norm − dual_value) / max(primal_norm, tiny)`.
    pub gap: f64,
    pub max_residual: f64,
    pub newton_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative duality gap and node residual target.
    pub tol: f64,
    pub max_newton_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, max_newton_steps: 2000 }
    }
}

/// Real coordinates: `y = x[..m] + i x[m..]`; `u_n = p_n·x + i q_n·x`.
struct Dual {
    m: usize,
    cols: usize,
    /// Rows `p_n` then `q_n`, each of length `2m`.
    p: DMatrix<f64>,
    q: DMatrix<f64>,
    w: DVector<f64>,
}

impl Dual {
    fn new(prob: &InterpolationProblem) -> Self {
        let v = prob.vandermonde();
        let (m, cols) = (v.nrows(), v.ncols());
        let mut p = DMatrix::zeros(cols, 2 * m);
        let mut q = DMatrix::zeros(cols, 2 * m);
        for n in 0..cols {
            for j in 0..m {
                let (c, s) = (v[(j, n)].re, v[(j, n)].im);
                p[(n, j)] = c;
                p[(n, m + j)] = s;
                q[(n, j)] = -s;
                q[(n, m + j)] = c;
            }
        }
        let b = prob.values();
        let w = DVector::from_iterator(2 * m, b.iter().map(|z| z.re).chain(b.iter().map(|z| z.im)));
        Dual { m, cols, p, q, w }
    }

    fn u(&self, x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        (&self.p * x, &self.q * x)
    }

    /// Change of the barrier objective `t·w·x + Σ log(1 − |u_n|²)` along
    /// `x → x + dx`, evaluated from the increments so that it stays accurate
    /// when the linear term dominates. `None` if the step leaves the domain.
    fn objective_change(&self, t: f64, x: &DVector<f64>, dx: &DVector<f64>) -> Option<f64> {
        let (ur, ui) = self.u(x);
        let (dr, di) = self.u(dx);
        let mut acc = CompensatedSum::new();
        acc.add(t * self.w.dot(dx));
        for n in 0..self.cols {
            let s0 = 1.0 - ur[n] * ur[n] - ui[n] * ui[n];
            let ds = -(2.0 * (ur[n] * dr[n] + ui[n] * di[n]) + dr[n] * dr[n] + di[n] * di[n]);
            if !(s0 + ds > 0.0) || !(-ds / s0 < 1.0) {
                return None;
            }
            acc.add((ds / s0).ln_1p());
        }
        Some(acc.value())
    }

    fn max_modulus(&self, x: &DVector<f64>) -> f64 {
        let (ur, ui) = self.u(x);
        ur.iter().zip(ui.iter()).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
    }

    fn y(&self, x: &DVector<f64>) -> Vec<Complex64> {
        (0..self.m).map(|j| Complex64::new(x[j], x[self.m + j])).collect()
    }

    /// The objective `Re⟨b, y⟩` after scaling `y` back onto the feasible set.
    fn feasible_value(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let r = self.max_modulus(x);
        let x = if r > 1.0 { x / r } else { x.clone() };
        (self.w.dot(&x), x)
    }

    /// Newton step maximizing the barrier objective at parameter `t`.
    /// Returns the step and the squared Newton decrement.
    fn newton(&self, t: f64, x: &DVector<f64>) -> Option<(DVector<f64>, f64)> {
        let (ur, ui) = self.u(x);
        let k = 2 * self.m;
        let mut grad = &self.w * t;
        let mut h = DMatrix::<f64>::zeros(k, k);
        for n in 0..self.cols {
            let s = 1.0 - ur[n] * ur[n] - ui[n] * ui[n];
            let p = self.p.row(n).transpose();
            let q = self.q.row(n).transpose();
            let px = &p * ur[n] + &q * ui[n];
            grad -= &px * (2.0 / s);
            h += (&p * p.transpose() + &q * q.transpose()) * (2.0 / s) + &px * px.transpose() * (4.0 / (s * s));
        }
        let chol = h.cholesky()?;
        let dx = chol.solve(&grad);
        let dec = grad.dot(&dx);
        Some((dx, dec))
    }

    /// Dual crossover: complementary slackness asks `u_n = c_n/|c_n|` on the
    /// support of an optimal primal. The smallest correction of `x` meeting
    /// those equations is scaled back into the feasible set.
    fn crossover(&self, x: &DVector<f64>, c: &[Complex64]) -> Option<DVector<f64>> {
        let big = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let support: Vec<usize> = (0..self.cols).filter(|&n| c[n].norm() > 1e-9 * big).collect();
        if support.is_empty() {
            return None;
        }
        let (ur, ui) = self.u(x);
        let rows = 2 * support.len();
        let a = DMatrix::from_fn(rows, 2 * self.m, |r, k| {
            let n = support[r / 2];
            if r % 2 == 0 {
                self.p[(n, k)]
            } else {
                self.q[(n, k)]
            }
        });
        let rhs = DVector::from_fn(rows, |r, _| {
            let n = support[r / 2];
            let phase = c[n].unscale(c[n].norm());
            if r % 2 == 0 {
                phase.re - ur[n]
            } else {
                phase.im - ui[n]
            }
        });
        let svd = a.svd(true, true);
        let cut = svd.singular_values.max() * 1e-12;
        let dx = svd.solve(&rhs, cut).ok()?;
        Some(x + dx)
    }

    /// Central-path primal estimate.
    fn primal(&self, t: f64, x: &DVector<f64>) -> Vec<Complex64> {
        let (ur, ui) = self.u(x);
        (0..self.cols)
            .map(|n| {
                let s = 1.0 - ur[n] * ur[n] - ui[n] * ui[n];
                Complex64::new(ur[n], ui[n]) * (2.0 / (t * s))
            })
            .collect()
    }

    /// Refit on the constraints that are nearly tight: with phases fixed to
    /// `u_n/|u_n|`, the moduli solve a nonnegative least-squares system.
    fn polish(&self, prob: &InterpolationProblem, x: &DVector<f64>, slack: f64) -> Vec<Complex64> {
        let (ur, ui) = self.u(x);
        let active: Vec<usize> = (0..self.cols).filter(|&n| ur[n].hypot(ui[n]) >= 1.0 - slack).collect();
        let v = prob.vandermonde();
        let phases: Vec<Complex64> = active.iter().map(|&n| Complex64::new(ur[n], ui[n]).unscale(ur[n].hypot(ui[n]))).collect();
        let a = DMatrix::from_fn(2 * self.m, active.len(), |r, k| {
            let z = v[(r % self.m, active[k])] * phases[k];
            if r < self.m {
                z.re
            } else {
                z.im
            }
        });
        let rho = nnls(&a, &self.w);
        let mut c = vec![Complex64::new(0.0, 0.0); self.cols];
        for (k, &n) in active.iter().enumerate() {
            c[n] = phases[k] * rho[k];
        }
        c
    }
}

/// Least-norm correction making `V c = b` hold up to rounding.
fn project_feasible(prob: &InterpolationProblem, c: &[Complex64]) -> Vec<Complex64> {
    let v = prob.vandermonde();
    let cv = DVector::from_column_slice(c);
    let b = DVector::from_column_slice(prob.values());
    let r = &b - &v * &cv;
    let gram = &v * v.adjoint();
    match gram.lu().solve(&r) {
        Some(z) => (cv + v.adjoint() * z).iter().copied().collect(),
        None => c.to_vec(),
    }
}

/// Minimal-`Σ|c_n|` polynomial of degree at most `D` matching the targets.
pub fn interpolate_min_l1(prob: &InterpolationProblem, opts: &SolverOptions) -> Result<Interpolant> {
    let tol = opts.tol;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidInput("tolerance must lie in (0, 1)".into()));
    }
    let scale = prob.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(Interpolant {
            poly: AnalyticPolynomial::new(vec![Complex64::new(0.0, 0.0); prob.degree() + 1]),
            dual: vec![Complex64::new(0.0, 0.0); prob.nodes().len()],
            dual_value: 0.0,
            primal_norm: 0.0,
            gap: 0.0,
            max_residual: 0.0,
            newton_steps: 0,
        });
    }
    let d = Dual::new(prob);
    let mut x = DVector::zeros(2 * d.m);
    // Start where the linear term and the barrier are comparable.
    let mut t = (d.cols as f64) / d.w.norm();
    let mut steps = 0;
    let mut best: Option<Interpolant> = None;
    loop {
        // Centre at the current t.
        loop {
            if steps >= opts.max_newton_steps {
                break;
            }
            let Some((dx, dec)) = d.newton(t, &x) else { break };
            steps += 1;
            if dec / 2.0 <= 1e-10 {
                break;
            }
            let mut step = 1.0;
            let accepted = loop {
                let trial = &dx * step;
                if let Some(df) = d.objective_change(t, &x, &trial) {
                    if df >= 0.25 * step * dec {
                        break Some(&x + trial);
                    }
                }
                step *= 0.5;
                if step < 1e-20 {
                    break None;
                }
            };
            match accepted {
                Some(next) => x = next,
                None => break,
            }
        }
        let (dual_value, xf) = d.feasible_value(&x);
        let candidates = [
            project_feasible(prob, &d.primal(t, &x)),
            project_feasible(prob, &d.polish(prob, &x, 1e-6)),
            project_feasible(prob, &d.polish(prob, &x, 1e-3)),
        ];
        for c in candidates {
            let poly = AnalyticPolynomial::new(c);
            let max_residual = prob.max_residual(&poly);
            if max_residual > tol * scale.max(1.0) {
                continue;
            }
            let primal_norm = poly.aplus_norm();
            let gap = (primal_norm - dual_value).max(0.0) / primal_norm.max(f64::MIN_POSITIVE);
            if best.as_ref().is_none_or(|b| primal_norm < b.primal_norm || (primal_norm == b.primal_norm && gap < b.gap)) {
                best = Some(Interpolant {
                    poly,
                    dual: d.y(&xf),
                    dual_value,
                    primal_norm,
                    gap,
                    max_residual,
                    newton_steps: steps,
                });
            }
        }
        if let Some(b) = best.as_mut() {
            // The dual bound may improve, both along the path and by crossover.
            let crossed = d.crossover(&x, &b.poly.coeffs).map(|x1| d.feasible_value(&x1));
            for (value, xv) in std::iter::once((dual_value, xf)).chain(crossed) {
                if value > b.dual_value {
                    b.dual_value = value;
                    b.dual = d.y(&xv);
                    b.gap = (b.primal_norm - value).max(0.0) / b.primal_norm.max(f64::MIN_POSITIVE);
                }
            }
            if b.gap <= tol {
                b.newton_steps = steps;
                return Ok(b.clone());
            }
        }
        // Gap of the exact central point is at most cols/t; stop raising t
        // once that is far below the target or iterations run out.
        if steps >= opts.max_newton_steps || (d.cols as f64) / t < 1e-3 * tol * dual_value.abs().max(1e-300) {
            return Err(Error::NonConvergence {
                what: format!("ℓ¹ interpolation (gap {:e})", best.as_ref().map_or(f64::INFINITY, |b| b.gap)),
                best: best.map_or(f64::NAN, |b| b.primal_norm),
            });
        }
        t *= 8.0;
    }
}

/// `max_{1 ≤ k ≤ k_max} min { ‖f‖ : f(ζ) = ζ^{−k} on the nodes, deg f ≤ D }`.
pub fn interpolation_constant(nodes: &[Complex64], k_max: u64, degree: usize, tol: f64) -> Result<InterpConstant> {
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    let opts = SolverOptions { tol, ..SolverOptions::default() };
    let norms = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let p = InterpolationProblem::negative_power(nodes.to_vec(), k, degree)?;
            interpolate_min_l1(&p, &opts).map(|s| s.primal_norm)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (arg, value) = norms
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(i, v), (j, &w)| if w > v { (j, w) } else { (i, v) });
    Ok(InterpConstant { interp_constant: value, achieving_k: arg as u64 + 1, norms })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpConstant {
    /// Lower-bound probe for the inverse imbedding norm, not that norm.
    pub interp_constant: f64,
    pub achieving_k: u64,
    /// Norm for each `k = 1..k_max`.
    pub norms: Vec<f64>,
}
