//! Lawson–Hanson active-set nonnegative least squares.

use nalgebra::{DMatrix, DVector};

/// Least squares on the columns listed in `cols`; `None` if rank deficient.
fn restricted_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, cols: &[usize]) -> Option<DVector<f64>> {
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])]);
    let svd = sub.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * 1e-13 * (a.nrows().max(cols.len()) as f64);
    svd.solve(b, eps).ok()
}

/// `argmin_{x ≥ 0} ‖A x − b‖₂`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * a.norm().max(1.0) * b.norm().max(1.0);
    for _outer in 0..3 * n + 10 {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;
        for _inner in 0..3 * n + 10 {
            let cols: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let Some(z) = restricted_lstsq(a, b, &cols) else { return x };
            if z.iter().all(|&v| v > 0.0) {
                for (k, &c) in cols.iter().enumerate() {
                    x[c] = z[k];
                }
                break;
            }
            // Step back toward x until the first passive coordinate hits zero.
            let mut step = 1.0f64;
            for (k, &c) in cols.iter().enumerate() {
                if z[k] <= 0.0 {
                    step = step.min(x[c] / (x[c] - z[k]));
                }
            }
            for (k, &c) in cols.iter().enumerate() {
                x[c] += step * (z[k] - x[c]);
                if x[c] <= 1e-15 * (1.0 + z[k].abs()) {
                    x[c] = 0.0;
                    passive[c] = false;
                }
            }
        }
    }
    x
}
