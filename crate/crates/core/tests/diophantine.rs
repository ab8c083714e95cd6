use num_complex::Complex64;
use powerbound::circle_sets::{Angle, GeometricCluster, SymbolicCircleSet};
use powerbound::diophantine::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

mod common;
use common::{brute_min_q, exact_dist};

#[test]
fn dirichlet_equals_exhaustive_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    while done < 100 {
        let n = rng.random_range(1..=3usize);
        let m = rng.random_range(2..=10u64);
        let q_min = rng.random_range(1..=1000u64);
        let bound = q_min * m.pow(n as u32);
        if bound > 1_000_000 {
            continue;
        }
        let t: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let c = dirichlet_simultaneous(&t, m, q_min, &SearchBudget::default()).unwrap();
        assert_eq!(Some(c.q), brute_min_q(&t, m, q_min, bound));
        assert!(q_min <= c.q && c.q <= bound);
        assert!(c.max_residual <= 1.0 / m as f64);
        for (tj, pj) in t.iter().zip(&c.p) {
            assert!((c.q as f64 * tj - *pj as f64).abs() <= 1.0 / m as f64 + 1e-12);
        }
        done += 1;
    }
}

#[test]
fn rational_cases_resolve_at_one() {
    // Both coordinates are within 1/m of an integer already at q = 1.
    let b = SearchBudget::default();
    let c = dirichlet_simultaneous(&[1.0 / 3.0, 1.0 / 7.0], 3, 1, &b).unwrap();
    assert_eq!(c.q, 1);
    assert_eq!(Some(c.q), brute_min_q(&[1.0 / 3.0, 1.0 / 7.0], 3, 1, 9));
    // Tightening to m = 10 forces the common period.
    let c = dirichlet_simultaneous(&[1.0 / 3.0, 1.0 / 7.0], 10, 1, &b).unwrap();
    assert_eq!(Some(c.q), brute_min_q(&[1.0 / 3.0, 1.0 / 7.0], 10, 1, 100));
    assert_eq!(c.q, 21);
    assert!(c.max_residual < 1e-14);
}

#[test]
fn golden_ratio_against_continued_fraction() {
    let t = 0.6180339887;
    // Convergent denominators of [0; 1, 1, 1, ...].
    let fib = [1u64, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89];
    for m in [3u64, 5, 10, 20, 50] {
        let c = dirichlet_simultaneous(&[t], m, 1, &SearchBudget::default()).unwrap();
        assert_eq!(Some(c.q), brute_min_q(&[t], m, 1, m));
        assert!(fib.contains(&c.q), "q = {} for m = {m}", c.q);
    }
}

#[test]
fn pigeonhole_never_beats_the_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let n = rng.random_range(1..=3usize);
        let m = rng.random_range(2..=8u64);
        let q_min = rng.random_range(1..=50u64);
        let t: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let box_cert = dirichlet_pigeonhole(&t, m, q_min, &SearchBudget::default()).unwrap();
        let scan = dirichlet_simultaneous(&t, m, q_min, &SearchBudget::default()).unwrap();
        assert!(box_cert.max_residual <= 1.0 / m as f64);
        assert!(box_cert.q >= scan.q || box_cert.q < q_min);
        assert!(box_cert.q <= box_cert.bound().unwrap());
    }
}

#[test]
fn near_recurrence_matches_brute_force() {
    let l1 = Complex64::from_polar(1.0, TAU * 2f64.sqrt() / 10.0);
    let l2 = Complex64::from_polar(1.0, TAU * 3f64.sqrt() / 10.0);
    let delta = 0.3;
    let n = near_recurrence_to_identity(&[l1, l2], delta, &SearchBudget::default()).unwrap();
    let brute = (1..=((8.0f64 / delta).ceil() as u64).pow(2))
        .find(|&k| (l1.powi(k as i32) - 1.0).norm() <= delta && (l2.powi(k as i32) - 1.0).norm() <= delta)
        .unwrap();
    assert_eq!(n, brute);
}

#[test]
fn recurrence_on_the_tenth_cluster() {
    let set = SymbolicCircleSet::new(vec![], vec![GeometricCluster::partial_sums(0.1, 1).unwrap()]).unwrap();
    let r = recurrence_exponent(&set, 8, &default_q_schedule(6), &RecurrenceOptions::default()).unwrap();
    let target = 2.0 * (std::f64::consts::PI / 7.0).sin();
    assert!(r.sup_error <= target);
    assert!(r.n_used as f64 <= (1.0 / r.epsilon_used).ln() / 8f64.ln());
    assert!(r.certificate.max_residual <= 1.0 / 7.0);
    // Independent recomputation through complex exponentials of q·θ.
    let c = set.clusters()[0];
    let mut direct = (Complex64::from_polar(1.0, r.q as f64 * c.limit().radians()) - 1.0).norm();
    for n in 1..=40u64 {
        let th: f64 = (1..=n).map(|k| 0.1f64.powi(k as i32)).sum();
        let z = Complex64::from_polar(1.0, (r.q as f64 * th).rem_euclid(TAU));
        direct = direct.max((z - 1.0).norm());
    }
    assert!(direct <= r.sup_error + 1e-10, "direct {direct} vs reported {}", r.sup_error);
}

#[test]
fn certified_sup_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..30 {
        let c = GeometricCluster::partial_sums(rng.random_range(0.05..0.3), 1).unwrap();
        let set = SymbolicCircleSet::new(vec![Angle::new(rng.random_range(3.0..6.0)).unwrap()], vec![c]).unwrap();
        let q = rng.random_range(1..100_000u64);
        let s = certified_sup_error(&set, q);
        let mut direct: f64 = 0.0;
        for p in set.truncated_points(1e-15) {
            let z = Complex64::from_polar(1.0, (q as f64 * p.radians()).rem_euclid(TAU));
            direct = direct.max((z - 1.0).norm());
        }
        assert!(direct <= s.value + 1e-10);
        assert!(s.value <= direct + s.tail_allowance + 1e-10);
    }
}

#[test]
fn weak_limit_for_two_irrational_rotations() {
    let l = [Complex64::from_polar(1.0, TAU * 2f64.sqrt()), Complex64::from_polar(1.0, TAU * 5f64.sqrt())];
    let tols = [0.3, 0.1, 0.03, 0.01];
    let w = weak_limit_subsequence(&l, 4, &tols, &SearchBudget::default()).unwrap();
    assert!(w.indices.windows(2).all(|p| p[1] > p[0]));
    for (k, &n) in w.indices.iter().enumerate() {
        for (lj, xj) in l.iter().zip(&w.xi) {
            let direct = (lj.powi(n as i32) - xj).norm();
            assert!(direct <= tols[k] + 1e-9, "k {k} n {n}: {direct}");
        }
        assert!(w.residuals[k] <= tols[k]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificates_satisfy_their_invariants(t in proptest::collection::vec(-3.0f64..3.0, 1..4), m in 2u64..8, q in 1u64..200) {
        let c = dirichlet_simultaneous(&t, m, q, &SearchBudget::default()).unwrap();
        prop_assert!(c.q >= q && c.q <= c.bound().unwrap());
        prop_assert!(c.max_residual <= 1.0 / m as f64);
        for (tj, pj) in t.iter().zip(&c.p) {
            prop_assert!(exact_dist(c.q, *tj) <= 1.0 / m as f64);
            prop_assert!(((c.q as f64) * tj - *pj as f64).abs() <= 0.5 + 1e-9);
        }
    }

    #[test]
    fn near_recurrence_is_minimal(t1 in 0.0f64..1.0, t2 in 0.0f64..1.0, delta in 0.2f64..1.0) {
        let l = [Complex64::from_polar(1.0, TAU * t1), Complex64::from_polar(1.0, TAU * t2)];
        let n = near_recurrence_to_identity(&l, delta, &SearchBudget::default()).unwrap();
        let err = |k: u64| l.iter().map(|z| 2.0 * (std::f64::consts::PI * exact_dist(k, powerbound::numeric::turns_of(*z))).sin()).fold(0.0, f64::max);
        prop_assert!(err(n) <= delta + 1e-12);
        for k in 1..n {
            prop_assert!(err(k) > delta - 1e-12);
        }
    }
}
