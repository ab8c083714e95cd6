use crate::circle_sets::Angle;
use crate::error::{invalid, Error, Result};
use crate::linalg::{diagonal, extreme_singular_values, identity, spectral_norm, CMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Largest `‖Y Y⁻¹ − I‖` accepted for a similarity.
pub const INVERSE_GATE: f64 = 1e-10;
/// Eigenvalues of `T` must match those of `U` to this accuracy.
pub const SPECTRUM_TOL: f64 = 1e-8;

/// `U = diag(e^{iθ_j})`, optionally partitioned into labelled blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalUnitary {
    pub eigenangles: Vec<Angle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
}

impl DiagonalUnitary {
    pub fn new(eigenangles: Vec<Angle>) -> Result<Self> {
        if eigenangles.is_empty() {
            return invalid("a unitary needs at least one eigenvalue");
        }
        Ok(DiagonalUnitary { eigenangles, blocks: None })
    }

    pub fn with_blocks(eigenangles: Vec<Angle>, blocks: Vec<usize>) -> Result<Self> {
        if blocks.len() != eigenangles.len() {
            return invalid("one block label per eigenvalue is required");
        }
        let mut u = Self::new(eigenangles)?;
        u.blocks = Some(blocks);
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.eigenangles.len()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.eigenangles.iter().map(|a| a.to_unimodular()).collect()
    }

    pub fn matrix(&self) -> CMatrix {
        diagonal(&self.eigenvalues())
    }

    /// Index sets of the blocks, ordered by label.
    pub fn block_indices(&self) -> Vec<Vec<usize>> {
        let Some(labels) = &self.blocks else { return vec![(0..self.dim()).collect()] };
        let mut keys: Vec<usize> = labels.clone();
        keys.sort_unstable();
        keys.dedup();
        keys.iter().map(|&k| (0..labels.len()).filter(|&i| labels[i] == k).collect()).collect()
    }
}

/// `T = Y U Y⁻¹` with its inverse and the condition number of `Y` cached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct SimilarityModel {
    u: DiagonalUnitary,
    y: CMatrix,
    y_inv: CMatrix,
    t: CMatrix,
    t_inv: CMatrix,
    kappa: f64,
    spectrum_error: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    eigenangles: Vec<Angle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blocks: Option<Vec<usize>>,
    /// Row-major `(re, im)` entries.
    y: Vec<Vec<Complex64>>,
}

impl TryFrom<RawModel> for SimilarityModel {
    type Error = Error;
    fn try_from(r: RawModel) -> Result<Self> {
        let d = r.y.len();
        if r.y.iter().any(|row| row.len() != d) {
            return invalid("Y must be square");
        }
        let y = CMatrix::from_fn(d, d, |i, j| r.y[i][j]);
        let u = DiagonalUnitary { eigenangles: r.eigenangles, blocks: r.blocks };
        SimilarityModel::new(u, y)
    }
}

impl From<SimilarityModel> for RawModel {
    fn from(m: SimilarityModel) -> Self {
        let d = m.y.nrows();
        RawModel {
            eigenangles: m.u.eigenangles,
            blocks: m.u.blocks,
            y: (0..d).map(|i| (0..d).map(|j| m.y[(i, j)]).collect()).collect(),
        }
    }
}

/// Smallest achievable largest distance when pairing `a` with `b`; exact
/// over all permutations for small sizes, greedy beyond.
fn match_spectra(a: &[Complex64], b: &[Complex64]) -> f64 {
    let n = a.len();
    if n <= 7 {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, &mut |p| {
            let e = (0..n).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max);
            best = best.min(e);
        });
        best
    } else {
        let mut used = vec![false; n];
        let mut worst: f64 = 0.0;
        for &z in a {
            let (j, d) = (0..n)
                .filter(|&j| !used[j])
                .map(|j| (j, (z - b[j]).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("sizes agree");
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

impl SimilarityModel {
    pub fn new(u: DiagonalUnitary, y: CMatrix) -> Result<Self> {
        let d = u.dim();
        if y.nrows() != d || y.ncols() != d {
            return invalid(format!("Y must be {d}×{d}"));
        }
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("Y has non-finite entries");
        }
        let y_inv = y.clone().try_inverse().ok_or_else(|| Error::RankDeficient("Y is singular".into()))?;
        let gate = spectral_norm(&(&y * &y_inv - identity(d)))?;
        if gate > INVERSE_GATE {
            return Err(Error::Precondition(format!("‖Y·Y⁻¹ − I‖ = {gate:e} exceeds {INVERSE_GATE:e}")));
        }
        let (lo, hi) = extreme_singular_values(&y)?;
        let kappa = hi / lo;
        let um = u.matrix();
        let t = &y * &um * &y_inv;
        let t_inv = &y * um.adjoint() * &y_inv;
        let eig = nalgebra::Schur::new(t.clone())
            .eigenvalues()
            .ok_or_else(|| Error::NonConvergence { what: "Schur form of T".into(), best: f64::NAN })?;
        let spectrum_error = match_spectra(&u.eigenvalues(), eig.as_slice());
        if spectrum_error > SPECTRUM_TOL {
            return Err(Error::Precondition(format!(
                "spectrum of T deviates from that of U by {spectrum_error:e}"
            )));
        }
        Ok(SimilarityModel { u, y, y_inv, t, t_inv, kappa, spectrum_error })
    }

    /// `Y = Q₁ diag(s) Q₂` with Haar unitaries and singular values whose
    /// extremes are `√κ` and `1/√κ`, the rest log-uniform in between.
    pub fn random(u: DiagonalUnitary, kappa: f64, rng: &mut impl Rng) -> Result<Self> {
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return invalid("target condition number must be at least 1");
        }
        let d = u.dim();
        let y = random_with_condition(d, kappa, rng);
        Self::new(u, y)
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn unitary(&self) -> &DiagonalUnitary {
        &self.u
    }

    pub fn y(&self) -> &CMatrix {
        &self.y
    }

    pub fn y_inv(&self) -> &CMatrix {
        &self.y_inv
    }

    pub fn t(&self) -> &CMatrix {
        &self.t
    }

    pub fn t_inv(&self) -> &CMatrix {
        &self.t_inv
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn spectrum_error(&self) -> f64 {
        self.spectrum_error
    }
}

pub fn random_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    let mut g = || -> f64 { rng.sample(StandardNormal) };
    let z = DMatrix::from_fn(d, d, |_, _| Complex64::new(g(), g()));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    // Fix the column phases so the distribution is Haar.
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn random_with_condition(d: usize, kappa: f64, rng: &mut impl Rng) -> CMatrix {
    let half = kappa.sqrt().ln();
    let mut s: Vec<f64> = (0..d).map(|_| rng.random_range(-half..=half)).collect();
    if d >= 2 {
        s[0] = half;
        s[d - 1] = -half;
    }
    let q1 = random_unitary(d, rng);
    let q2 = random_unitary(d, rng);
    let sd = diagonal(&s.iter().map(|&x| Complex64::new(x.exp(), 0.0)).collect::<Vec<_>>());
    q1 * sd * q2
}
