//! Dense complex matrix helpers.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
///
/// Only the Hermitian part of `h` is used. Jacobi is chosen for its small
/// relative error on the extreme eigenvalues of Gram matrices.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let mut a = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let thresh = scale * (f64::EPSILON * f64::EPSILON) * 1e-2;
    let off = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s
    };
    let mut sweeps = 0;
    while off(&a) > thresh {
        if sweeps == JACOBI_MAX_SWEEPS {
            let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
            d.sort_by(f64::total_cmp);
            return Err(Error::NonConvergence {
                what: "Hermitian Jacobi eigensolver".into(),
                best: d.last().copied().unwrap_or(0.0),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag; // e^{iφ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();
                // Columns: A ← A W with W = diag(1, e^{-iφ}) · [[c, s], [-s, c]].
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)] * ph_conj;
                    a[(k, p)] = akp * c - akq * s;
                    a[(k, q)] = akp * s + akq * c;
                }
                // Rows: A ← W* A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)] * phase;
                    a[(p, k)] = apk * c - aqk * s;
                    a[(q, k)] = apk * s + aqk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    let gram = a.adjoint() * a;
    let ev = hermitian_eigenvalues(&gram)?;
    Ok(ev.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Smallest and largest singular values.
pub fn extreme_singular_values(a: &CMatrix) -> Result<(f64, f64)> {
    let gram = a.adjoint() * a;
    let ev = hermitian_eigenvalues(&gram)?;
    let lo = ev.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let hi = ev.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    Ok((lo, hi))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diagonal(entries: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let d = diagonal(&[c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(hermitian_eigenvalues(&d).unwrap(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_complex_hermitian() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let h = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let ev = hermitian_eigenvalues(&h).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14);
        assert!((ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_agrees_with_svd() {
        let a = CMatrix::from_fn(5, 5, |i, j| {
            c(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i * 2 + j * 5) % 7) as f64 * 0.3 - 1.0)
        });
        let svd = a.clone().svd(false, false);
        let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let ours = spectral_norm(&a).unwrap();
        assert!((ours - max).abs() <= 1e-12 * max);
    }
}
