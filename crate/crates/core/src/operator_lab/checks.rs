use super::model::{DiagonalUnitary, SimilarityModel};
use super::profile::power_windows;
use crate::circle_sets::{SymbolicCircleSet, ANGLE_TOL};
use crate::diophantine::{
    default_q_schedule, recurrence_exponent, weak_limit_subsequence, RecurrenceOptions, RecurrenceResult,
    SearchBudget, WeakLimit,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eigenvalues, identity, spectral_norm, CMatrix};
use crate::measures::{k_condition_estimate, AtomicMeasure, KEstimate};
use crate::wiener_interp::{
    evaluate_on_operator, interpolate_min_l1, AnalyticPolynomial, InterpolationProblem, SolverOptions,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundName {
    Lemma11,
    Thm25,
    Thm211,
    Thm212,
    Thm35,
}

/// Outcome of comparing the inverse power window with a bound.
///
/// `satisfied` holds exactly when `minv_window ≤ bound_value·(1 + tolerance)`
/// and every auxiliary check recorded in `constants` passed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_name: BoundName,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M_window")]
    pub m_window: f64,
    #[serde(rename = "Minv_window")]
    pub minv_window: f64,
    pub bound_value: f64,
    pub tolerance: f64,
    pub satisfied: bool,
    /// `bound_value·(1 + tolerance) − minv_window`.
    pub slack: f64,
    /// How many times `N` was doubled after an apparent violation.
    pub doublings: u32,
    pub constants: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak_limit: Option<WeakLimit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BoundReport>,
}

impl BoundReport {
    fn new(name: BoundName, n: usize, m: f64, minv: f64, bound: f64, tolerance: f64) -> Self {
        let limit = bound * (1.0 + tolerance);
        BoundReport {
            bound_name: name,
            n,
            m_window: m,
            minv_window: minv,
            bound_value: bound,
            tolerance,
            satisfied: minv <= limit,
            slack: limit - minv,
            doublings: 0,
            constants: BTreeMap::new(),
            weak_limit: None,
            blocks: Vec::new(),
        }
    }

    fn constant(mut self, key: &str, v: f64) -> Self {
        self.constants.insert(key.to_string(), v);
        self
    }
}

/// Re-run a check with `N` doubled while it reports a violation.
fn with_doubling(n: usize, max_doublings: u32, run: impl Fn(usize) -> Result<BoundReport>) -> Result<BoundReport> {
    let mut r = run(n)?;
    let mut size = n;
    let mut k = 0;
    while !r.satisfied && k < max_doublings {
        size *= 2;
        k += 1;
        r = run(size)?;
    }
    r.doublings = k;
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowOptions {
    #[serde(rename = "N")]
    pub n: usize,
    pub delta: f64,
    pub max_doublings: u32,
}

impl Default for WindowOptions {
    fn default() -> Self {
        WindowOptions { n: 10_000, delta: 0.05, max_doublings: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLimitOptions {
    pub count: usize,
    pub tolerances: Vec<f64>,
    pub budget: SearchBudget,
}

impl Default for WeakLimitOptions {
    fn default() -> Self {
        WeakLimitOptions { count: 1, tolerances: vec![0.5], budget: SearchBudget::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma21Report {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M_window")]
    pub m_window: f64,
    /// Largest `‖T^ℓx‖ / (M·‖Tⁿx‖)` over `0 ≤ n ≤ ℓ ≤ N`.
    pub worst_ratio: f64,
    pub worst_pair: (usize, usize),
    pub violations: usize,
    /// `worst_ratio` recomputed by applying `T^{ℓ−n}` to `Tⁿx` afresh.
    pub reverified_ratio: f64,
}

/// Finite form of `limsup ‖Tⁿx‖ ≤ M liminf ‖Tⁿx‖`.
pub fn check_lemma21(model: &SimilarityModel, x: &[Complex64], n: usize) -> Result<Lemma21Report> {
    if x.len() != model.dim() {
        return invalid("vector dimension does not match the model");
    }
    let mut v = DVector::from_column_slice(x);
    if v.norm() == 0.0 {
        return invalid("x must be nonzero");
    }
    let (m, _) = power_windows(model, n)?;
    let mut orbit = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            v = model.t() * v;
        }
        orbit.push(v.norm());
    }
    let mut worst = (0.0f64, (0usize, 0usize));
    let mut violations = 0;
    for l in 0..=n {
        for k in 0..=l {
            let ratio = orbit[l] / (m * orbit[k]);
            if ratio > 1.0 + 1e-9 {
                violations += 1;
            }
            if ratio > worst.0 {
                worst = (ratio, (k, l));
            }
        }
    }
    let (k, l) = worst.1;
    let mut a = DVector::from_column_slice(x);
    for _ in 0..k {
        a = model.t() * a;
    }
    let mut b = a.clone();
    for _ in k..l {
        b = model.t() * b;
    }
    let reverified_ratio = b.norm() / (m * a.norm());
    Ok(Lemma21Report { n, m_window: m, worst_ratio: worst.0, worst_pair: worst.1, violations, reverified_ratio })
}

/// Check of `sup_{n≤0} ‖Tⁿ‖ ≤ ‖A⁻¹‖ M²`, with `A = diag(ξ)` from a weak
/// limit of the eigenvalue powers.
pub fn check_theorem25(model: &SimilarityModel, w: &WindowOptions, wl: &WeakLimitOptions) -> Result<BoundReport> {
    let limit = weak_limit_subsequence(&model.unitary().eigenvalues(), wl.count, &wl.tolerances, &wl.budget)?;
    let a_inv = limit.xi.iter().map(|z| 1.0 / z.norm()).fold(0.0, f64::max);
    if (a_inv - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("weak limit is not unimodular: ‖A⁻¹‖ = {a_inv}")));
    }
    let mut r = with_doubling(w.n, w.max_doublings, |n| {
        let (m, minv) = power_windows(model, n)?;
        Ok(BoundReport::new(BoundName::Thm25, n, m, minv, a_inv * m * m, w.delta).constant("A_inv_norm", a_inv))
    })?;
    r.weak_limit = Some(limit);
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Best constants with `lower·Σ‖x_j‖² ≤ ‖Σ x_j‖² ≤ upper·Σ‖x_j‖²`, `x_j ∈ M_j`,
/// given orthonormal bases of the `M_j` as matrix columns.
pub fn riesz_bounds(bases: &[CMatrix]) -> Result<RieszBounds> {
    let Some(first) = bases.first() else { return invalid("need at least one subspace") };
    let d = first.nrows();
    let mut total = 0;
    for b in bases {
        if b.nrows() != d {
            return invalid("all bases must live in the same space");
        }
        let k = b.ncols();
        if (b.adjoint() * b - identity(k)).norm() > 1e-10 {
            return invalid("bases must be orthonormal");
        }
        total += k;
    }
    if total > d {
        return Err(Error::RankDeficient(format!("{total} basis vectors in dimension {d}")));
    }
    let joined = CMatrix::from_fn(d, total, |i, j| {
        let mut j = j;
        for b in bases {
            if j < b.ncols() {
                return b[(i, j)];
            }
            j -= b.ncols();
        }
        unreachable!()
    });
    let ev = hermitian_eigenvalues(&(joined.adjoint() * &joined))?;
    let (lower, upper) = (ev[0], ev[total - 1]);
    if lower <= 1e-12 * upper {
        return Err(Error::RankDeficient("subspaces are not independent".into()));
    }
    Ok(RieszBounds { lower, upper })
}

/// Orthonormal basis of `Y·span{e_i : i ∈ block}` and the restriction of
/// `T` to it, written in that basis as `R U_j R⁻¹`.
fn restrict_to_block(model: &SimilarityModel, idx: &[usize]) -> Result<(CMatrix, SimilarityModel)> {
    let d = model.dim();
    let cols = DMatrix::from_fn(d, idx.len(), |i, j| model.y()[(i, idx[j])]);
    let qr = cols.qr();
    let q = qr.q();
    let r = qr.r();
    let u = DiagonalUnitary::new(idx.iter().map(|&i| model.unitary().eigenangles[i]).collect())?;
    Ok((q, SimilarityModel::new(u, r)?))
}

/// Check of `sup_{n≤0} ‖Tⁿ‖ ≤ M²C³` with `C = max_j C_j`, each `C_j` the
/// block's own bound from [`check_theorem25`], together with the Riesz
/// constants of the block images against `1/(M²C²)` and `M²C²`.
pub fn check_theorem211(model: &SimilarityModel, w: &WindowOptions, wl: &WeakLimitOptions) -> Result<BoundReport> {
    let blocks = model.unitary().block_indices();
    let mut bases = Vec::with_capacity(blocks.len());
    let mut sub = Vec::with_capacity(blocks.len());
    for idx in &blocks {
        let (q, restricted) = restrict_to_block(model, idx)?;
        bases.push(q);
        sub.push(check_theorem25(&restricted, w, wl)?);
    }
    let c = sub.iter().map(|r| r.bound_value).fold(0.0, f64::max);
    let riesz = riesz_bounds(&bases)?;
    let mut r = with_doubling(w.n, w.max_doublings, |n| {
        let (m, minv) = power_windows(model, n)?;
        let mc2 = m * m * c * c;
        let mut r = BoundReport::new(BoundName::Thm211, n, m, minv, m * m * c.powi(3), w.delta)
            .constant("C", c)
            .constant("riesz_lower", riesz.lower)
            .constant("riesz_upper", riesz.upper)
            .constant("riesz_lower_bound", (1.0 - w.delta) / mc2)
            .constant("riesz_upper_bound", mc2 * (1.0 + w.delta));
        let riesz_ok = riesz.lower >= (1.0 - w.delta) / mc2 && riesz.upper <= mc2 * (1.0 + w.delta);
        r.constants.insert("riesz_ok".into(), if riesz_ok { 1.0 } else { 0.0 });
        r.satisfied &= riesz_ok;
        Ok(r)
    })?;
    r.blocks = sub;
    Ok(r)
}

/// `1/(1 − 2 sin(π/(K−1)))`, the factor in `C_K = M²/(1 − 2 sin(π/(K−1)))`.
pub fn c_k_factor(k: u64) -> Result<f64> {
    if k < 8 {
        return invalid(format!("K = {k} is below 8, where 2 sin(π/(K−1)) stops being < 1"));
    }
    Ok(1.0 / (1.0 - 2.0 * (std::f64::consts::PI / (k - 1) as f64).sin()))
}

/// `(K, M²C_K³)` for each `K`.
pub fn c_k_trend(m: f64, ks: &[u64]) -> Result<Vec<(u64, f64)>> {
    ks.iter().map(|&k| Ok((k, m.powi(8) * c_k_factor(k)?.powi(3)))).collect()
}

/// The recurrence certificate for a spectral set, computed once and shared
/// by every model whose spectrum lies in that set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem35Context {
    pub set: SymbolicCircleSet,
    #[serde(rename = "K")]
    pub k: u64,
    pub recurrence: RecurrenceResult,
}

impl Theorem35Context {
    pub fn new(set: SymbolicCircleSet, k: u64) -> Result<Self> {
        c_k_factor(k)?;
        let recurrence = recurrence_exponent(&set, k, &default_q_schedule(12), &RecurrenceOptions::default())?;
        Ok(Theorem35Context { set, k, recurrence })
    }

    /// `sup_{n≤0} ‖Tⁿ‖ ≤ min(M²C_K³, M⁸)`.
    pub fn check(&self, model: &SimilarityModel, w: &WindowOptions) -> Result<BoundReport> {
        if let Some(a) = model.unitary().eigenangles.iter().find(|&&a| !self.set.contains(a, ANGLE_TOL)) {
            return Err(Error::Precondition(format!("eigenangle {} lies outside the set", a.radians())));
        }
        let factor = c_k_factor(self.k)?;
        with_doubling(w.n, w.max_doublings, |n| {
            let (m, minv) = power_windows(model, n)?;
            let c_k = m * m * factor;
            let via_c = m * m * c_k.powi(3);
            let m8 = m.powi(8);
            Ok(BoundReport::new(BoundName::Thm35, n, m, minv, via_c.min(m8), w.delta)
                .constant("K", self.k as f64)
                .constant("C_K", c_k)
                .constant("M2_CK3", via_c)
                .constant("M8", m8)
                .constant("q", self.recurrence.q as f64)
                .constant("sup_error", self.recurrence.sup_error)
                .constant("A_inv_bound", 1.0 / (1.0 - self.recurrence.sup_error)))
        })
    }
}

pub fn check_theorem35(model: &SimilarityModel, set: &SymbolicCircleSet, k: u64, w: &WindowOptions) -> Result<BoundReport> {
    Theorem35Context::new(set.clone(), k)?.check(model, w)
}

/// Check of `sup_{n≤0} ‖Tⁿ‖ ≤ K³M⁸` with `K` estimated from the measure's
/// coefficients on `window`.
pub fn check_theorem212(
    model: &SimilarityModel,
    mu: &AtomicMeasure,
    window: (i64, i64),
    w: &WindowOptions,
) -> Result<BoundReport> {
    let eig = &model.unitary().eigenangles;
    let atoms = mu.angles();
    let covered = |xs: &[crate::circle_sets::Angle], ys: &[crate::circle_sets::Angle]| {
        xs.iter().all(|x| ys.iter().any(|y| x.approx_eq(*y, ANGLE_TOL)))
    };
    if !covered(eig, &atoms) || !covered(&atoms, eig) {
        return Err(Error::Precondition("measure atoms must coincide with the eigenangles".into()));
    }
    let KEstimate { value: k, achieving_n, .. } = k_condition_estimate(mu, window.0, window.1)?;
    with_doubling(w.n, w.max_doublings, |n| {
        let (m, minv) = power_windows(model, n)?;
        Ok(BoundReport::new(BoundName::Thm212, n, m, minv, k.powi(3) * m.powi(8), w.delta)
            .constant("K_est", k)
            .constant("K_achieving_n", achieving_n as f64))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma11Entry {
    pub k: u64,
    pub aplus_norm: f64,
    pub interpolation_residual: f64,
    pub gap: f64,
    /// `‖f_k(T)·T^k − I‖`.
    pub identity_error: f64,
    pub identity_bound: f64,
    /// `‖T^{−k}‖`.
    pub inverse_norm: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma11Report {
    /// Aggregate form: `minv_window` is `max_k ‖T^{−k}‖/‖f_k‖` against
    /// `bound_value = M`.
    pub report: BoundReport,
    pub entries: Vec<Lemma11Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma11Options {
    pub k_max: u64,
    pub degree: usize,
    pub tol: f64,
}

/// Builds `f_k` with `f_k(ζ) = ζ^{−k}` on the spectrum and checks
/// `f_k(T)T^k = I` and `‖T^{−k}‖ ≤ M‖f_k‖`.
pub fn verify_lemma11(model: &SimilarityModel, opts: &Lemma11Options, w: &WindowOptions) -> Result<Lemma11Report> {
    let d = model.dim();
    if opts.degree + 1 < d {
        return Err(Error::Infeasible(format!("degree {} cannot interpolate {d} nodes", opts.degree)));
    }
    let nodes = model.unitary().eigenvalues();
    let solver = SolverOptions { tol: opts.tol, ..SolverOptions::default() };
    // The estimate ‖f(T)‖ ≤ M‖f‖ uses powers up to the degree.
    let n = w.n.max(opts.degree);
    let (m, _) = power_windows(model, n)?;
    let mut entries = Vec::new();
    let mut t_k = identity(d);
    let mut t_inv_k = identity(d);
    for k in 0..=opts.k_max {
        if k > 0 {
            t_k = &t_k * model.t();
            t_inv_k = &t_inv_k * model.t_inv();
        }
        let (f, residual, gap) = if k == 0 {
            (AnalyticPolynomial::constant(Complex64::new(1.0, 0.0)), 0.0, 0.0)
        } else {
            let p = InterpolationProblem::negative_power(nodes.clone(), k, opts.degree)?;
            let s = interpolate_min_l1(&p, &solver)?;
            (s.poly, s.max_residual, s.gap)
        };
        let fk_t = evaluate_on_operator(&f, model.t())?;
        let identity_error = spectral_norm(&(&fk_t * &t_k - identity(d)))?;
        let identity_bound = model.kappa() * d as f64 * opts.tol;
        let inverse_norm = spectral_norm(&t_inv_k)?;
        let norm = f.aplus_norm();
        let satisfied = identity_error <= identity_bound && inverse_norm <= m * norm * (1.0 + w.delta);
        entries.push(Lemma11Entry {
            k,
            aplus_norm: norm,
            interpolation_residual: residual,
            gap,
            identity_error,
            identity_bound,
            inverse_norm,
            satisfied,
        });
    }
    let ratio = entries.iter().map(|e| e.inverse_norm / e.aplus_norm).fold(0.0, f64::max);
    let worst_identity = entries.iter().map(|e| e.identity_error / e.identity_bound.max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    let mut report = BoundReport::new(BoundName::Lemma11, n, m, ratio, m, w.delta)
        .constant("identity_error_ratio", worst_identity)
        .constant("kappa", model.kappa());
    report.satisfied = report.satisfied && entries.iter().all(|e| e.satisfied);
    Ok(Lemma11Report { report, entries })
}
