#![allow(dead_code)]

use std::collections::HashSet;
use std::f64::consts::TAU;

/// Minimal number of closed arcs of length `eps` covering a finite point
/// list, by exhaustive branching: the first uncovered point must lie in
/// some arc, and every arc can be slid until one of its endpoints hits a
/// point, so only arcs starting or ending at points are tried.
pub fn exhaustive_cover(points: &[f64], eps: f64) -> usize {
    let mut pts: Vec<f64> = points.iter().map(|p| p.rem_euclid(TAU)).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let n = pts.len();
    assert!(n <= 64, "oracle limited to 64 points");
    if n == 0 {
        return 0;
    }
    if eps >= TAU {
        return 1;
    }
    let mut arcs: Vec<u64> = Vec::new();
    for &p in &pts {
        let mut fwd = 0u64;
        let mut back = 0u64;
        for (k, &q) in pts.iter().enumerate() {
            if (q - p).rem_euclid(TAU) <= eps {
                fwd |= 1 << k;
            }
            if (p - q).rem_euclid(TAU) <= eps {
                back |= 1 << k;
            }
        }
        arcs.push(fwd);
        arcs.push(back);
    }
    arcs.sort_unstable();
    arcs.dedup();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for depth in 1..=n {
        let mut failed = HashSet::new();
        if search(0, depth, full, &arcs, &mut failed) {
            return depth;
        }
    }
    n
}

fn search(covered: u64, depth: usize, full: u64, arcs: &[u64], failed: &mut HashSet<(u64, usize)>) -> bool {
    if covered == full {
        return true;
    }
    if depth == 0 || failed.contains(&(covered, depth)) {
        return false;
    }
    let first = (!covered & full).trailing_zeros();
    for &m in arcs {
        if m & (1 << first) != 0 && search(covered | m, depth - 1, full, arcs, failed) {
            return true;
        }
    }
    failed.insert((covered, depth));
    false
}

/// Distance to the nearest integer through exact rational bookkeeping: the
/// double `t` is a dyadic rational `num / 2^52·…`, and `q·t` is evaluated
/// in 128-bit integers.
pub fn exact_dist(q: u64, t: f64) -> f64 {
    let (d, den) = exact_dist_ratio(q, t);
    d as f64 / den as f64
}

/// `‖q·t‖` as an exact fraction `(numerator, denominator)`.
pub fn exact_dist_ratio(q: u64, t: f64) -> (i128, i128) {
    if t == 0.0 {
        return (0, 1);
    }
    let bits = t.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let mant = if exp == 0 { (bits & ((1 << 52) - 1)) << 1 } else { (bits & ((1 << 52) - 1)) | (1 << 52) };
    let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
    // t = sign · mant · 2^(exp − 1075)
    let shift = 1075 - exp;
    assert!((0..=120).contains(&shift), "test oracle covers |t| < 2^52 with moderate exponents");
    let num = sign * mant as i128 * q as i128;
    let den = 1i128 << shift;
    let rem = num.rem_euclid(den);
    (rem.min(den - rem), den)
}

/// `‖q·t‖ ≤ 1/m` decided in integer arithmetic.
pub fn exact_within(q: u64, t: f64, m: u64) -> bool {
    let (d, den) = exact_dist_ratio(q, t);
    match d.checked_mul(m as i128) {
        Some(dm) => dm <= den,
        None => exact_dist(q, t) <= 1.0 / m as f64,
    }
}

pub fn brute_min_q(t: &[f64], m: u64, q_min: u64, bound: u64) -> Option<u64> {
    (q_min..=bound).find(|&q| t.iter().all(|&tj| exact_within(q, tj, m)))
}

/// Closed form for the depth-`d` approximation: each split moves the two
/// child midpoints by `±(1 − a)ℓa^k/2` from the parent midpoint, so the
/// coefficient factors into a centre phase times `d` cosines.
pub fn cantor_product(c: &powerbound::measures::CantorApproxMeasure, n: i64) -> num_complex::Complex64 {
    let nf = n as f64;
    let (s, l, a) = (c.arc_start.radians(), c.arc_length, c.ratio);
    let phase = num_complex::Complex64::from_polar(c.mass, -nf * (s + 0.5 * l));
    (0..c.depth).fold(phase, |acc, k| acc * (nf * (1.0 - a) * l * a.powi(k as i32) / 2.0).cos())
}

/// Brackets the covering number of a set with clusters by two exhaustive
/// searches on a truncated point list: dropped tail points sit within
/// `lambda` of their limit, so the truth lies between the truncated count at
/// arc length `eps` and the truncated count at `eps − lambda`.
pub fn oracle_bracket(set: &powerbound::circle_sets::SymbolicCircleSet, eps: f64) -> (usize, usize) {
    let lambda = eps * 1e-3;
    let pts: Vec<f64> = set.truncated_points(lambda).iter().map(|p| p.radians()).collect();
    let lo = exhaustive_cover(&pts, eps);
    let hi = if set.is_finite() { lo } else { exhaustive_cover(&pts, eps - lambda) };
    (lo, hi)
}

pub fn random_set(rng: &mut rand_chacha::ChaCha8Rng) -> Option<powerbound::circle_sets::SymbolicCircleSet> {
    use powerbound::circle_sets::{Angle, GeometricCluster, Sign, SymbolicCircleSet};
    use rand::Rng;
    let a = |t: f64| Angle::new(t).unwrap();
    let n_points = rng.random_range(0..6);
    let n_clusters = rng.random_range(0..3);
    if n_points + n_clusters == 0 {
        return None;
    }
    let points: Vec<Angle> = (0..n_points).map(|_| a(rng.random_range(0.0..TAU))).collect();
    let clusters: Vec<GeometricCluster> = (0..n_clusters)
        .map(|_| {
            let sign = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
            GeometricCluster::new(
                a(rng.random_range(0.0..TAU)),
                rng.random_range(0.1..0.35),
                rng.random_range(0.05..1.5),
                sign,
                rng.random_range(1..3),
            )
            .unwrap()
        })
        .collect();
    SymbolicCircleSet::new(points, clusters).ok()
}

pub mod interp {
    use nalgebra::{DMatrix, DVector};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    pub struct Instance {
        pub nodes: Vec<Complex64>,
        pub values: Vec<Complex64>,
        pub degree: usize,
    }

    fn vandermonde(nodes: &[Complex64], degree: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(nodes.len(), degree + 1, |j, n| nodes[j].powi(n as i32))
    }

    fn l1(c: &DVector<Complex64>) -> f64 {
        c.iter().map(|z| z.norm()).sum()
    }

    /// `c = W V* (V W V*)⁻¹ b`: exactly feasible for every weight vector.
    fn weighted_solution(v: &DMatrix<Complex64>, b: &DVector<Complex64>, w: &[f64]) -> DVector<Complex64> {
        let wm = DMatrix::from_diagonal(&DVector::from_iterator(w.len(), w.iter().map(|&x| Complex64::new(x, 0.0))));
        let vw = v * &wm;
        let g = &vw * v.adjoint();
        wm * v.adjoint() * g.lu().solve(b).expect("Gram matrix invertible")
    }

    /// Iteratively reweighted least squares with a shrinking smoothing
    /// parameter; every iterate is feasible, so the value is an upper bound.
    pub fn irls(nodes: &[Complex64], values: &[Complex64], degree: usize) -> f64 {
        let v = vandermonde(nodes, degree);
        let b = DVector::from_column_slice(values);
        let mut c = weighted_solution(&v, &b, &vec![1.0; degree + 1]);
        let mut best = l1(&c);
        let mut eps = 1.0;
        while eps > 1e-13 {
            for _ in 0..200 {
                let w: Vec<f64> = c.iter().map(|z| (z.norm_sqr() + eps * eps).sqrt()).collect();
                let next = weighted_solution(&v, &b, &w);
                let change = (&next - &c).norm();
                c = next;
                best = best.min(l1(&c));
                if change < 1e-3 * eps {
                    break;
                }
            }
            eps *= 0.3;
        }
        best
    }

    /// For `D = m` the feasible set is a complex line `c₀ + z·v`; the norm is
    /// minimized over `z` by a zooming grid search on the plane.
    pub fn grid_line_search(nodes: &[Complex64], values: &[Complex64]) -> f64 {
        let m = nodes.len();
        let v = vandermonde(nodes, m);
        let b = DVector::from_column_slice(values);
        let c0 = weighted_solution(&v, &b, &vec![1.0; m + 1]);
        // Null vector: coefficients of Π (z − ζ_j).
        let mut null = vec![Complex64::new(1.0, 0.0)];
        for &zj in nodes {
            let mut next = vec![Complex64::new(0.0, 0.0); null.len() + 1];
            for (k, &a) in null.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * zj;
            }
            null = next;
        }
        let nv = DVector::from_vec(null);
        let f = |z: Complex64| l1(&(&c0 + &nv * z));
        let mut center = Complex64::new(0.0, 0.0);
        let mut radius = 2.0 * l1(&c0) / nv.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let k = 40;
        let mut best = f(center);
        while radius > 1e-12 {
            let mut arg = center;
            for i in -k..=k {
                for j in -k..=k {
                    let z = center + Complex64::new(i as f64, j as f64) * (radius / k as f64);
                    let val = f(z);
                    if val < best {
                        best = val;
                        arg = z;
                    }
                }
            }
            center = arg;
            radius *= 0.1;
        }
        best
    }

    /// Thirty fixed instances with at most three nodes and degree at most six.
    pub fn corpus() -> Vec<Instance> {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut out = Vec::new();
        while out.len() < 30 {
            let i = out.len();
            let m = 1 + i % 3;
            let degree = (m - 1) + (i / 3) % (8 - m);
            let angles: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..TAU)).collect();
            let separated = (0..m).all(|a| {
                (0..a).all(|b| {
                    let d = (angles[a] - angles[b]).rem_euclid(TAU);
                    d.min(TAU - d) > 0.1
                })
            });
            if !separated {
                continue;
            }
            let nodes: Vec<Complex64> = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
            let values = if i % 2 == 0 {
                let k = 1 + (i / 2) % 3;
                nodes.iter().map(|z| z.powi(-(k as i32))).collect()
            } else {
                (0..m).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
            };
            out.push(Instance { nodes, values, degree });
        }
        out
    }
}
