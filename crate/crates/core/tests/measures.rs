use num_complex::Complex64;
use powerbound::circle_sets::Angle;
use powerbound::diophantine::{near_recurrence_to_identity, SearchBudget};
use powerbound::measures::*;
use proptest::prelude::*;
use rayon::prelude::*;
use std::f64::consts::TAU;

mod common;
use common::cantor_product;

fn two_atoms(t1: f64, t2: f64, w: f64) -> AtomicMeasure {
    AtomicMeasure::new(vec![
        Atom { angle: Angle::new(TAU * t1).unwrap(), weight: w },
        Atom { angle: Angle::new(TAU * t2).unwrap(), weight: w },
    ])
    .unwrap()
}

#[test]
fn cantor_coefficients_match_product_formula() {
    for ratio in [1.0 / 3.0, 0.25] {
        for depth in [0, 1, 4, 8, 12] {
            let c = CantorApproxMeasure::new(ratio, depth, 1.0, Angle::new(0.0).unwrap(), TAU).unwrap();
            let m = c.render().unwrap();
            let worst = (-10_000i64..=10_000)
                .into_par_iter()
                .map(|n| (m.fourier_coefficient(n) - cantor_product(&c, n)).norm())
                .reduce(|| 0.0, f64::max);
            assert!(worst < 1e-10, "ratio {ratio} depth {depth}: {worst}");
        }
    }
}

#[test]
fn cantor_on_a_short_arc() {
    let c = CantorApproxMeasure::new(0.3, 6, 2.5, Angle::new(5.0).unwrap(), 0.7).unwrap();
    let m = c.render().unwrap();
    for n in (-3000..3000).step_by(7) {
        assert!((m.fourier_coefficient(n) - cantor_product(&c, n)).norm() < 1e-10);
    }
}

#[test]
fn irrational_pair_nearly_recurs() {
    let w = 0.75;
    let m = two_atoms(0.0, 2f64.sqrt(), w);
    let small = limsup_abs_fourier(&m, 1, 1_000).unwrap();
    let large = limsup_abs_fourier(&m, 1, 1_000_000).unwrap();
    assert!(small.value <= large.value && large.value <= 2.0 * w);
    assert!(2.0 * w - large.value < 2.0 * w * 1e-6);
    // |μ̂(n)| = 2w·|cos(πn√2)|, so any n with ζ₂ⁿ near 1 is near-maximal.
    let z = [Complex64::from_polar(1.0, TAU * 2f64.sqrt())];
    let n = near_recurrence_to_identity(&z, 1e-3, &SearchBudget::default()).unwrap();
    assert!(m.fourier_coefficient(n as i64).norm() >= 2.0 * w * (1.0 - 1e-6));
    assert!(large.value >= m.fourier_coefficient(n as i64).norm());

    let k = k_condition_estimate(&m, 1, 1_000_000).unwrap();
    assert!((1.0..=1.0 + 1e-3).contains(&k.value), "{k:?}");
    assert_eq!(k.achieving_n, large.n);
}

#[test]
fn concentration_for_irrational_pair() {
    let m = two_atoms(2f64.sqrt() / 2.0, 3f64.sqrt(), 1.0);
    let tol = 1e-3;
    let c = lemma28_extract(&m, tol, 5, 10_000_000).unwrap();
    assert!(c.indices.windows(2).all(|p| p[1] > p[0]));
    for &n in &c.indices {
        assert!(m.fourier_coefficient(n as i64).norm() >= (1.0 - tol) * 2.0);
    }
    let last = *c.indices.last().unwrap() as i32;
    let direct: f64 = m.atoms().iter().map(|a| a.weight * (a.angle.to_unimodular().powi(last) - c.xi).norm_sqr()).sum();
    assert!((direct - c.dispersion).abs() < 1e-9);
    assert!(direct <= 2.0 * tol * 2.0 + 1e-12);
    assert!((c.xi.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn concentration_reports_missing_indices() {
    let m = two_atoms(0.0, 2f64.sqrt(), 1.0);
    assert!(matches!(lemma28_extract(&m, 1e-9, 3, 100), Err(powerbound::Error::NotFound(_))));
}

#[test]
fn absolute_convergence_at_i() {
    let a: Vec<f64> = (1..=100).map(|n| 1.0 / (n * n) as f64).collect();
    let got = absolute_convergence_partial(&a, Complex64::new(0.0, 1.0), 100).unwrap();
    let odd: f64 = (1..=100).step_by(2).map(|n| 1.0 / (n * n) as f64).sum();
    assert!((got - odd).abs() < 1e-15, "{got} vs {odd}");
}

#[test]
fn minimizing_sequence_single_atom() {
    let t = (5f64.sqrt() - 1.0) / 2.0;
    let w = 1.5;
    let m = AtomicMeasure::new(vec![Atom { angle: Angle::new(TAU * t).unwrap(), weight: w }]).unwrap();
    let targets: Vec<f64> = (1..=8).map(|k| 0.5f64.powi(k)).collect();
    let s = minimizing_sequence(&m, &targets, 10_000_000).unwrap();
    for (term, target) in s.terms.iter().zip(&targets) {
        let direct = w * (TAU * t * term.n as f64).sin().abs();
        assert!((term.value - direct).abs() < 1e-9 * (1.0 + term.n as f64 * 1e-7));
        assert!(term.value <= *target);
    }
    assert!(s.terms.windows(2).all(|p| p[1].n > p[0].n));
    let total: f64 = s.terms.iter().map(|t| t.value).sum();
    assert!((s.total - total).abs() < 1e-15);
}

#[test]
fn minimizing_sequence_two_atoms() {
    let m = two_atoms(2f64.sqrt(), 3f64.sqrt(), 0.5);
    let targets: Vec<f64> = (1..=10).map(|k| 0.5f64.powi(k)).collect();
    match minimizing_sequence(&m, &targets, 10_000_000) {
        Ok(s) => {
            assert_eq!(s.terms.len(), 10);
            for (term, target) in s.terms.iter().zip(&targets) {
                assert!(imaginary_moment(&m, term.n) <= *target);
            }
        }
        Err(e) => assert!(matches!(e, powerbound::Error::NotFound(_))),
    }
}

#[test]
fn pseudomeasure_consistent_with_k_estimate() {
    let m = two_atoms(0.1, 2f64.sqrt(), 0.5);
    let p = Pseudomeasure::from_measure(&m);
    let r = pseudomeasure_ratio(&p, 50, (1, 100_000)).unwrap();
    let k = k_condition_estimate(&m, 1, 100_000).unwrap();
    // The sup window contains n = 0, where the coefficient is the mass.
    assert!((r.sup.value - m.total_mass()).abs() < 1e-14);
    assert!((r.value - m.total_mass() / k.window_max).abs() < 1e-12);

    let decay = Pseudomeasure::new(|n| Complex64::new(1.0 / (1.0 + n.abs() as f64), 0.0), 1.0).unwrap();
    let r = pseudomeasure_ratio(&decay, 10, (1000, 2000)).unwrap();
    assert!((r.value - 1001.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficient_bounds_and_symmetry(
        atoms in proptest::collection::vec((0.0..TAU, 0.01f64..5.0), 1..8),
        n in -100_000i64..100_000,
    ) {
        let atoms: Vec<Atom> = atoms.into_iter().map(|(t, w)| Atom { angle: Angle::new(t).unwrap(), weight: w }).collect();
        let Ok(m) = AtomicMeasure::new(atoms) else { return Ok(()) };
        let mass = m.total_mass();
        prop_assert!((m.fourier_coefficient(0).re - mass).abs() <= 1e-13 * mass);
        let c = m.fourier_coefficient(n);
        prop_assert!(c.norm() <= mass * (1.0 + 1e-13));
        prop_assert!((m.fourier_coefficient(-n) - c.conj()).norm() <= 1e-13 * mass);
        let k = k_condition_estimate(&m, 1, 200).unwrap();
        prop_assert!(k.value >= 1.0);
    }

    #[test]
    fn roots_of_unity_have_unit_k(r in 1usize..30, mass in 0.1f64..10.0) {
        let m = AtomicMeasure::roots_of_unity(r, mass).unwrap();
        prop_assert_eq!(k_condition_estimate(&m, 1, 100).unwrap().value, 1.0);
    }
}
