//! Property-based invariants over randomized measures, series and grid
//! parameters.

use genhilbert::analytic::{self, mobius, PowerSeries};
use genhilbert::measure::{CarlesonGridSpec, Measure};
use genhilbert::operator::HankelOperator;
use num_complex::Complex64;
use proptest::prelude::*;

fn power_log_params() -> impl Strategy<Value = (f64, f64)> {
    (0.3f64..4.0, -3.0f64..1.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn moments_are_positive_and_nonincreasing(
        (beta, gamma) in power_log_params(),
        n in 0i64..60,
    ) {
        let m = Measure::power_log(1.0, beta, gamma).unwrap();
        let a = m.moment(n).unwrap().value;
        let b = m.moment(n + 1).unwrap().value;
        prop_assert!(a > 0.0);
        prop_assert!(b <= a * (1.0 + 1e-9) + 1e-15, "mu_{}={} < mu_{}={}", n, a, n + 1, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mixture_moments_are_additive(
        (b1, g1) in power_log_params(),
        (b2, g2) in power_log_params(),
        t in 0.05f64..0.95,
        c in 0.1f64..3.0,
        n in 0i64..40,
    ) {
        let m1 = Measure::power_log(1.0, b1, g1).unwrap();
        let m2 = Measure::power_log(0.7, b2, g2).unwrap();
        let m3 = Measure::atoms(vec![(t, c)]).unwrap();
        let mix = Measure::mixture(vec![m1.clone(), m2.clone(), m3.clone()]);
        let direct = m1.moment(n).unwrap().value
            + m2.moment(n).unwrap().value
            + m3.moment(n).unwrap().value;
        let mixed = mix.moment(n).unwrap().value;
        prop_assert!((mixed - direct).abs() <= 1e-10 * direct.max(1.0));
    }

    #[test]
    fn truncation_kills_the_tail_exactly(
        (beta, gamma) in power_log_params(),
        r in 0.1f64..0.9,
        extra in 0.0f64..0.09,
    ) {
        let m = Measure::power_log(1.0, beta, gamma).unwrap().truncate(r).unwrap();
        prop_assert_eq!(m.tail_mass(r + extra).unwrap(), 0.0);
    }

    #[test]
    fn csv_roundtrip_preserves_coefficients(coeffs in prop::collection::vec(-5.0f64..5.0, 1..12)) {
        let f = PowerSeries::polynomial(&coeffs);
        let back = PowerSeries::from_csv(&f.to_csv()).unwrap();
        prop_assert_eq!(f.coeffs(), back.coeffs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_is_an_involution(
        ar in -0.9f64..0.9, ai in -0.9f64..0.9,
        zr in -0.9f64..0.9, zi in -0.9f64..0.9,
    ) {
        let a = 0.7 * Complex64::new(ar, ai);
        let z = 0.7 * Complex64::new(zr, zi);
        let w = mobius(a, mobius(a, z));
        prop_assert!((w - z).norm() < 1e-12, "a={a} z={z} w={w}");
    }

    #[test]
    fn power_family_matches_closed_form(
        lambda in 0.05f64..0.9,
        alpha in 0.3f64..3.0,
        zr in -0.55f64..0.55, zi in -0.55f64..0.55,
    ) {
        let f = analytic::test_function_power(lambda, alpha, 4096).unwrap();
        let z = Complex64::new(zr, zi);
        let got = f.eval(z).unwrap();
        let want = (1.0 - lambda * lambda)
            * (Complex64::new(1.0, 0.0) - lambda * z).powf(-alpha);
        prop_assert!((got - want).norm() < 1e-9, "lambda={lambda} alpha={alpha} z={z}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn hankel_matrices_are_positive_semidefinite(idx in 0usize..6, m in 4usize..16) {
        let cases: [Measure; 6] = [
            Measure::lebesgue(),
            Measure::power_log(1.0, 2.0, 0.0).unwrap(),
            Measure::power_log(1.0, 0.5, 0.0).unwrap(),
            Measure::power_log(1.0, 1.0, -2.0).unwrap(),
            Measure::atoms(vec![(0.5, 1.0)]).unwrap(),
            Measure::mixture(vec![
                Measure::lebesgue(),
                Measure::atoms(vec![(0.25, 0.5)]).unwrap(),
            ]),
        ];
        let op = HankelOperator::new(cases[idx].clone(), m).unwrap();
        let min = op.hankel_min_eigenvalue(m).unwrap();
        prop_assert!(min >= -1e-9, "min eigenvalue {min}");
    }

    #[test]
    fn transform_shifts_the_carleson_exponent(beta in 0.6f64..3.0, p in 0.2f64..1.5) {
        // u is s-Carleson iff the (1-t)^p reweighting is (s+p)-Carleson
        let grid = CarlesonGridSpec::default();
        let m = Measure::power_log(1.0, beta, 0.0).unwrap();
        for s in [0.5 * beta, beta, beta + 0.5] {
            let base = m.carleson_report(s, 0.0, &grid).unwrap();
            let shifted = m
                .transform_weight(p, 0.0)
                .unwrap()
                .carleson_report(s + p, 0.0, &grid)
                .unwrap();
            prop_assert_eq!(base.verdict_bounded, shifted.verdict_bounded, "beta={} s={} p={}", beta, s, p);
            prop_assert_eq!(base.verdict_vanishing, shifted.verdict_vanishing, "beta={} s={} p={}", beta, s, p);
        }
    }
}

#[test]
fn disk_grids_refine_monotonically() {
    let coarse = analytic::disk_grid(1);
    let fine = analytic::disk_grid(2);
    assert!(fine.len() > coarse.len());
    for p in &coarse {
        assert!(
            fine.iter().any(|q| (q - p).norm() == 0.0),
            "coarse point {p} missing from refined grid"
        );
    }
    // consequence: sampled sup norms can only go up under refinement
    let f = PowerSeries::polynomial(&[0.3, -1.0, 0.25, 0.0, 2.0]);
    let sup = |grid: &[Complex64]| -> f64 {
        grid.iter().map(|&z| f.eval(z).unwrap().norm()).fold(0.0, f64::max)
    };
    assert!(sup(&fine) >= sup(&coarse));
}
