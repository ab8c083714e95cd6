//! Seeded random models for the randomized bound suites. Trial `i` of a
//! suite draws from stream `i` of one ChaCha generator, so every trial is
//! reproducible on its own and independent of scheduling.

use super::model::{DiagonalUnitary, SimilarityModel};
use crate::circle_sets::{Angle, GeometricCluster, SymbolicCircleSet};
use crate::error::Result;
use crate::measures::{Atom, AtomicMeasure};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Condition number log-uniform in `[1, kappa_max]`.
fn draw_kappa(rng: &mut impl Rng, kappa_max: f64) -> f64 {
    if kappa_max <= 1.0 {
        return 1.0;
    }
    rng.random_range(0.0..=kappa_max.ln()).exp()
}

fn angles(ts: impl IntoIterator<Item = f64>) -> Result<Vec<Angle>> {
    ts.into_iter().map(Angle::new).collect()
}

/// Dimension uniform in `1..=d_max`, eigenangles uniform on the circle.
pub fn generic_model(rng: &mut impl Rng, d_max: usize, kappa_max: f64) -> Result<SimilarityModel> {
    let d = rng.random_range(1..=d_max.max(1));
    model_of_dim(rng, d, kappa_max)
}

/// As [`generic_model`] with the dimension fixed.
pub fn model_of_dim(rng: &mut impl Rng, d: usize, kappa_max: f64) -> Result<SimilarityModel> {
    let ts: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..TAU)).collect();
    let kappa = draw_kappa(rng, kappa_max);
    SimilarityModel::random(DiagonalUnitary::new(angles(ts)?)?, kappa, rng)
}

/// `blocks × block_size` eigenvalues, labelled by block, with a coupling `Y`.
pub fn block_model(rng: &mut impl Rng, blocks: usize, block_size: usize, kappa_max: f64) -> Result<SimilarityModel> {
    let d = blocks * block_size;
    let ts: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..TAU)).collect();
    let labels = (0..d).map(|i| i / block_size).collect();
    let kappa = draw_kappa(rng, kappa_max);
    SimilarityModel::random(DiagonalUnitary::with_blocks(angles(ts)?, labels)?, kappa, rng)
}

/// The partial-sum cluster `{Σ_{k≤n} aᵏ : n ≥ 1}` with its limit.
pub fn partial_sum_set(ratio: f64) -> Result<SymbolicCircleSet> {
    SymbolicCircleSet::new(vec![], vec![GeometricCluster::partial_sums(ratio, 1)?])
}

/// `d` distinct spectral points drawn from the limit and the first
/// `depth` points of a cluster.
pub fn cluster_model(
    rng: &mut impl Rng,
    set: &SymbolicCircleSet,
    d: usize,
    depth: usize,
    kappa_max: f64,
) -> Result<SimilarityModel> {
    let c = set.clusters()[0];
    let mut pool = vec![c.limit()];
    pool.extend((0..depth as u64).map(|i| c.point(c.start_index() as u64 + i)));
    let pick = sample(rng, pool.len(), d.min(pool.len()));
    let chosen = pick.iter().map(|i| pool[i]).collect();
    let kappa = draw_kappa(rng, kappa_max);
    SimilarityModel::random(DiagonalUnitary::new(chosen)?, kappa, rng)
}

/// Random positive weights on the eigenangles.
pub fn spectral_measure(rng: &mut impl Rng, model: &SimilarityModel) -> Result<AtomicMeasure> {
    AtomicMeasure::new(
        model
            .unitary()
            .eigenangles
            .iter()
            .map(|&angle| Atom { angle, weight: rng.random_range(0.1..1.0) })
            .collect(),
    )
}

/// A random unit-norm complex vector.
pub fn random_vector(rng: &mut impl Rng, d: usize) -> Vec<num_complex::Complex64> {
    let v: Vec<num_complex::Complex64> =
        (0..d).map(|_| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}
