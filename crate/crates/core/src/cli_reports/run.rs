use super::config::*;
use super::report::{Aggregate, RunReport, Series, TrialRecord};
use crate::circle_sets::{alpha_empirical_capped, optimal_cover_capped, parse_set, SymbolicCircleSet};
use crate::diophantine::{
    default_q_schedule, dirichlet_pigeonhole, dirichlet_simultaneous, recurrence_exponent, RecurrenceOptions,
    SearchBudget,
};
use crate::error::{Error, Result};
use crate::measures::{k_condition_estimate, lemma28_extract, limsup_abs_fourier, parse_measure, AtomicMeasure};
use crate::operator_lab::suites::{
    block_model, cluster_model, generic_model, model_of_dim, partial_sum_set, random_vector, spectral_measure,
    trial_rng,
};
use crate::operator_lab::{
    c_k_trend, check_lemma21, check_theorem211, check_theorem212, check_theorem25, power_norm_profile,
    verify_lemma11, BoundReport, Direction, Lemma11Options, SimilarityModel, Theorem35Context, WeakLimitOptions,
    WindowOptions,
};
use crate::wiener_interp::interpolation_constant;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;

/// Largest coefficient window a fourier run will tabulate.
const MAX_FOURIER_WINDOW: i64 = 1_000_000;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub timing: bool,
}

/// Executes an experiment. Schema and I/O problems are returned as errors;
/// failures inside a trial are recorded in that trial's entry.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport> {
    let mut config = config.clone();
    let kind = config.resolve(None)?;
    let started = Instant::now();
    let (records, series) = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| dispatch(kind, &config)),
        None => dispatch(kind, &config),
    }?;
    let aggregate = Aggregate::of(&records);
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        records,
        aggregate,
        series,
        wall_time: opts.timing.then(|| started.elapsed().as_secs_f64()),
    })
}

type Outcome = (Vec<TrialRecord>, BTreeMap<String, Series>);

fn dispatch(kind: Kind, c: &ExperimentConfig) -> Result<Outcome> {
    let base = &c.base_dir;
    match kind {
        Kind::Alpha => {
            let p = c.alpha.as_ref().unwrap();
            let set = load_set(&p.set, base)?;
            Ok(trials(c, |i, _| alpha_trial(i, &set, p)))
        }
        Kind::Cover => {
            let p = c.cover.as_ref().unwrap();
            let set = load_set(&p.set, base)?;
            Ok(trials(c, |i, _| cover_trial(i, &set, p)))
        }
        Kind::Recur => {
            let p = c.recur.as_ref().unwrap();
            let set = load_set(&p.set, base)?;
            Ok(trials(c, |i, _| recur_trial(i, &set, p)))
        }
        Kind::Dirichlet => {
            let p = c.dirichlet.as_ref().unwrap();
            Ok(trials(c, |i, seed| dirichlet_trial(i, seed, p)))
        }
        Kind::Fourier => {
            let p = c.fourier.as_ref().unwrap();
            let mu = load_measure(&p.measure, base)?;
            Ok(trials(c, |i, _| fourier_trial(i, &mu, p)))
        }
        Kind::Limsup => {
            let p = c.limsup.as_ref().unwrap();
            let mu = load_measure(&p.measure, base)?;
            Ok(trials(c, |i, _| limsup_trial(i, &mu, p)))
        }
        Kind::Interp => {
            let p = c.interp.as_ref().unwrap();
            Ok(trials(c, |i, _| interp_trial(i, p)))
        }
        Kind::BoundCheck => {
            let p = c.bound_check.as_ref().unwrap();
            let ctx = match p.suite {
                Suite::Thm35 => Some(partial_sum_set(p.cluster_ratio).and_then(|s| Theorem35Context::new(s, p.k))),
                _ => None,
            };
            let ctx = match ctx {
                Some(Err(e)) => {
                    // Every trial shares the context, so all of them fail.
                    let recs = (0..c.trials).map(|i| TrialRecord::failed(i, &e)).collect();
                    return Ok((recs, BTreeMap::new()));
                }
                Some(Ok(ctx)) => Some(ctx),
                None => None,
            };
            Ok(trials(c, |i, seed| bound_trial(i, seed, p, ctx.as_ref())))
        }
    }
}

fn load_set(src: &Source, base: &std::path::Path) -> Result<SymbolicCircleSet> {
    parse_set(&src.read(base)?)
}

fn load_measure(src: &Source, base: &std::path::Path) -> Result<AtomicMeasure> {
    parse_measure(&src.read(base)?)?.to_atomic()
}

/// What one trial contributes: its record and, from trial 0 only, the
/// plot series.
type TrialOut = Result<(TrialRecord, Vec<(String, Series)>)>;

/// Runs every trial on the current pool and reduces in trial order.
fn trials(c: &ExperimentConfig, f: impl Fn(u64, u64) -> TrialOut + Sync) -> Outcome {
    let outs: Vec<(TrialRecord, Vec<(String, Series)>)> = (0..c.trials)
        .into_par_iter()
        .map(|i| f(i, c.seed).unwrap_or_else(|e| (TrialRecord::failed(i, &e), Vec::new())))
        .collect();
    let mut series = BTreeMap::new();
    let mut records = Vec::with_capacity(outs.len());
    for (r, s) in outs {
        if r.trial == 0 {
            series.extend(s);
        }
        records.push(r);
    }
    (records, series)
}

fn payload(v: &impl Serialize) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

fn alpha_trial(i: u64, set: &SymbolicCircleSet, p: &AlphaParams) -> TrialOut {
    let prof = alpha_empirical_capped(set, p.eps0, p.rho, p.steps, p.point_cap)?;
    let mut r = TrialRecord::new(i);
    r.metric("alpha_empirical", prof.alpha_empirical)
        .metric("alpha_analytic", prof.alpha_analytic)
        .metric("liminf_ratio", prof.liminf_ratio);
    let mut s = Series::new(&["epsilon", "N_eps", "ratio"]);
    for e in &prof.entries {
        s.rows.push(vec![e.epsilon, e.n_eps as f64, e.ratio().unwrap_or(0.0)]);
    }
    r.payload = payload(&prof)?;
    Ok((r, vec![("covering_profile".into(), s)]))
}

fn cover_trial(i: u64, set: &SymbolicCircleSet, p: &CoverParams) -> TrialOut {
    let covers = p.epsilons.iter().map(|&e| optimal_cover_capped(set, e, p.point_cap)).collect::<Result<Vec<_>>>()?;
    let mut r = TrialRecord::new(i);
    let mut s = Series::new(&["epsilon", "N_eps"]);
    for c in &covers {
        s.rows.push(vec![c.epsilon, c.count as f64]);
    }
    if let Some(c) = covers.last() {
        r.metric("N_eps_finest", c.count as f64);
    }
    r.payload = payload(&covers)?;
    Ok((r, vec![("covering_numbers".into(), s)]))
}

fn recur_trial(i: u64, set: &SymbolicCircleSet, p: &RecurParams) -> TrialOut {
    let schedule = p.q_schedule.clone().unwrap_or_else(|| default_q_schedule(12));
    let opts = RecurrenceOptions { extra_slack: p.extra_slack, ..RecurrenceOptions::default() };
    let res = recurrence_exponent(set, p.k, &schedule, &opts)?;
    let mut r = TrialRecord::new(i);
    r.metric("q", res.q as f64).metric("sup_error", res.sup_error).metric("target", res.target);
    r.assert_le(res.sup_error, res.target + p.extra_slack);
    r.achieving_index = i64::try_from(res.q).ok();
    r.payload = payload(&res)?;
    Ok((r, Vec::new()))
}

fn dirichlet_trial(i: u64, seed: u64, p: &DirichletParams) -> TrialOut {
    let t = match &p.t {
        Some(t) => t.clone(),
        None => {
            let mut rng = trial_rng(seed, i);
            (0..p.dims).map(|_| rng.random_range(0.0..1.0)).collect()
        }
    };
    let budget = SearchBudget::default();
    let cert = if p.pigeonhole {
        dirichlet_pigeonhole(&t, p.m, p.q_min, &budget)?
    } else {
        dirichlet_simultaneous(&t, p.m, p.q_min, &budget)?
    };
    let mut r = TrialRecord::new(i);
    r.metric("q", cert.q as f64).metric("max_residual", cert.max_residual);
    r.assert_le(cert.max_residual, 1.0 / p.m as f64);
    if let Some(b) = cert.bound() {
        r.assert_le(cert.q as f64, b as f64);
    }
    if cert.q < p.q_min {
        r.ok = false;
    }
    r.achieving_index = i64::try_from(cert.q).ok();
    r.payload = serde_json::json!({ "t": t, "certificate": cert });
    Ok((r, Vec::new()))
}

fn fourier_trial(i: u64, mu: &AtomicMeasure, p: &FourierParams) -> TrialOut {
    if p.n_max < p.n_min {
        return Err(Error::InvalidInput("n_max must not be below n_min".into()));
    }
    let len = p.n_max.saturating_sub(p.n_min).saturating_add(1);
    if len > MAX_FOURIER_WINDOW {
        return Err(Error::Resource {
            what: "fourier window length".into(),
            needed: len as f64,
            cap: MAX_FOURIER_WINDOW as f64,
        });
    }
    let mut s = Series::new(&["n", "re", "im", "abs"]);
    let coeffs: Vec<Complex64> = (p.n_min..=p.n_max).into_par_iter().map(|n| mu.fourier_coefficient(n)).collect();
    for (n, z) in (p.n_min..=p.n_max).zip(&coeffs) {
        s.rows.push(vec![n as f64, z.re, z.im, z.norm()]);
    }
    let w = limsup_abs_fourier(mu, p.n_min, p.n_max)?;
    let mut r = TrialRecord::new(i);
    r.metric("window_max", w.value).metric("total_mass", mu.total_mass());
    r.achieving_index = Some(w.n);
    r.payload = serde_json::json!({ "window_max": w, "count": coeffs.len() });
    Ok((r, vec![("fourier".into(), s)]))
}

fn limsup_trial(i: u64, mu: &AtomicMeasure, p: &LimsupParams) -> TrialOut {
    let w = limsup_abs_fourier(mu, p.n_min, p.n_max)?;
    let mut r = TrialRecord::new(i);
    r.metric("window_max", w.value).metric("total_mass", mu.total_mass());
    r.achieving_index = Some(w.n);
    let k = k_condition_estimate(mu, p.n_min, p.n_max);
    if let Ok(k) = &k {
        r.metric("K_est", k.value);
    }
    let conc = match p.concentration_tol {
        Some(tol) => Some(lemma28_extract(mu, tol, p.concentration_count, p.n_max.max(1) as u64)?),
        None => None,
    };
    if let Some(c) = &conc {
        r.assert_le(c.dispersion, c.dispersion_bound);
    }
    r.payload = serde_json::json!({
        "window_max": w,
        "k_estimate": k.as_ref().ok(),
        "k_error": k.as_ref().err().map(|e| e.to_string()),
        "concentration": conc,
    });
    Ok((r, Vec::new()))
}

fn interp_trial(i: u64, p: &InterpParams) -> TrialOut {
    let nodes: Vec<Complex64> = p.nodes.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    let ic = interpolation_constant(&nodes, p.k_max, p.degree, p.tol)?;
    let mut r = TrialRecord::new(i);
    r.metric("interp_constant", ic.interp_constant);
    r.achieving_index = i64::try_from(ic.achieving_k).ok();
    let mut s = Series::new(&["k", "aplus_norm"]);
    for (k, n) in ic.norms.iter().enumerate() {
        s.rows.push(vec![(k + 1) as f64, *n]);
    }
    r.payload = payload(&ic)?;
    Ok((r, vec![("interp_norms".into(), s)]))
}

fn window(p: &BoundCheckParams) -> WindowOptions {
    WindowOptions { n: p.n, delta: p.delta, max_doublings: p.max_doublings }
}

fn bound_record(i: u64, b: &BoundReport) -> TrialRecord {
    let mut r = TrialRecord::new(i);
    r.metric("M_window", b.m_window)
        .metric("Minv_window", b.minv_window)
        .metric("bound_value", b.bound_value)
        .metric("N", b.n as f64)
        .metric("doublings", b.doublings as f64);
    r.ok = b.satisfied;
    r.slack = Some(b.slack);
    r
}

fn bound_trial(i: u64, seed: u64, p: &BoundCheckParams, ctx: Option<&Theorem35Context>) -> TrialOut {
    let mut rng = trial_rng(seed, i);
    let w = window(p);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| match p.dim {
        Some(d) => model_of_dim(rng, d, p.kappa_max),
        None => generic_model(rng, p.d_max, p.kappa_max),
    };
    let (model, mut r, mut extra): (SimilarityModel, TrialRecord, Vec<(String, Series)>) = match p.suite {
        Suite::Lemma21 => {
            let model = draw(&mut rng)?;
            let reports = (0..p.vectors)
                .map(|_| check_lemma21(&model, &random_vector(&mut rng, model.dim()), p.n))
                .collect::<Result<Vec<_>>>()?;
            let mut r = TrialRecord::new(i);
            let worst = reports.iter().map(|x| x.worst_ratio).fold(0.0, f64::max);
            let violations: usize = reports.iter().map(|x| x.violations).sum();
            r.metric("worst_ratio", worst).metric("violations", violations as f64);
            r.assert_le(worst, 1.0 + 1e-9);
            r.ok = violations == 0;
            r.payload = payload(&reports)?;
            (model, r, Vec::new())
        }
        Suite::Thm25 => {
            let model = draw(&mut rng)?;
            let b = check_theorem25(&model, &w, &WeakLimitOptions::default())?;
            let mut r = bound_record(i, &b);
            r.payload = payload(&b)?;
            (model, r, Vec::new())
        }
        Suite::Thm211 => {
            let model = block_model(&mut rng, p.blocks, p.block_size, p.kappa_max)?;
            let b = check_theorem211(&model, &w, &WeakLimitOptions::default())?;
            let mut r = bound_record(i, &b);
            if b.constants.get("riesz_ok").is_some_and(|&v| v < 0.5) {
                r.ok = false;
            }
            for key in ["C", "riesz_lower", "riesz_upper"] {
                if let Some(v) = b.constants.get(key) {
                    r.metric(key, *v);
                }
            }
            r.payload = payload(&b)?;
            (model, r, Vec::new())
        }
        Suite::Thm35 => {
            let ctx = ctx.expect("context is built for this suite");
            let set = &ctx.set;
            let d = rng.random_range(1..=p.d_max.max(1).min(p.cluster_depth + 1));
            let model = cluster_model(&mut rng, set, d, p.cluster_depth, p.kappa_max)?;
            let b = ctx.check(&model, &w)?;
            let mu = spectral_measure(&mut rng, &model)?;
            let b212 = check_theorem212(&model, &mu, (1, p.k_window), &w)?;
            let trend = c_k_trend(b.m_window, &p.k_trend)?;
            let nonincreasing = trend.windows(2).all(|x| x[1].1 <= x[0].1);
            let mut r = bound_record(i, &b);
            let r212 = bound_record(i, &b212);
            r.ok = r.ok && r212.ok && nonincreasing;
            r.slack = Some(b.slack.min(b212.slack));
            r.metric("K_est", b212.constants["K_est"]).metric("bound_212", b212.bound_value);
            r.metric("trend_nonincreasing", f64::from(u8::from(nonincreasing)));
            r.achieving_index = Some(b212.constants["K_achieving_n"] as i64);
            let mut s = Series::new(&["K", "M2_CK3"]);
            s.rows.extend(trend.iter().map(|&(k, v)| vec![k as f64, v]));
            r.payload = serde_json::json!({ "thm35": b, "thm212": b212, "trend": trend });
            (model, r, vec![("ck_trend".into(), s)])
        }
        Suite::Thm212 => {
            let model = draw(&mut rng)?;
            let mu = spectral_measure(&mut rng, &model)?;
            let b = check_theorem212(&model, &mu, (1, p.k_window), &w)?;
            let mut r = bound_record(i, &b);
            r.metric("K_est", b.constants["K_est"]);
            r.achieving_index = Some(b.constants["K_achieving_n"] as i64);
            r.payload = payload(&b)?;
            (model, r, Vec::new())
        }
        Suite::Lemma11 => {
            let model = draw(&mut rng)?;
            let opts = Lemma11Options { k_max: p.k_max, degree: p.degree, tol: p.tol };
            let rep = verify_lemma11(&model, &opts, &w)?;
            let mut r = bound_record(i, &rep.report);
            r.ok = rep.report.satisfied && rep.entries.iter().all(|e| e.satisfied);
            let worst = rep.entries.iter().map(|e| e.identity_error / e.identity_bound).fold(0.0, f64::max);
            r.metric("identity_ratio", worst);
            r.payload = payload(&rep)?;
            (model, r, Vec::new())
        }
    };
    r.metric("dim", model.dim() as f64).metric("kappa", model.kappa());
    if p.profile_series && i == 0 {
        let fwd = power_norm_profile(&model, p.n, Direction::Forward)?;
        let inv = power_norm_profile(&model, p.n, Direction::Inverse)?;
        let mut s = Series::new(&["n", "forward", "inverse"]);
        for (n, (a, b)) in fwd.norms.iter().zip(&inv.norms).enumerate() {
            s.rows.push(vec![n as f64, *a, *b]);
        }
        extra.push(("power_profile".into(), s));
    }
    Ok((r, extra))
}
