use std::collections::BTreeMap;

use circmat::car::{car_covariance_curve, phi1, phi2, phi_m_spectral, CarOrder, CarSpec};
use circmat::fields::conditional_predict;
use circmat::linkage::{match_car_to_matern_alpha1, match_matern_to_car};
use circmat::matern::{matern_curve, psi1_closed, psi2_closed, psi3_closed, psi_closed, MaternParams};
use circmat::spectral::{angular_lag, CirculantMatrix};
use proptest::prelude::*;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn central<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = 1e-5 * x;
    (f(x + h) - f(x - h)) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn angular_lag_is_shift_invariant_and_reflects(n in 3usize..200, i in 0usize..1000, j in 0usize..1000) {
        let (i, j) = (i % n, j % n);
        let d = angular_lag(i, j, n).unwrap();
        prop_assert!((0.0..1.0).contains(&d));
        let back = angular_lag(j, i, n).unwrap();
        prop_assert!(d == 0.0 && back == 0.0 || (d + back - 1.0).abs() < 1e-15);
        prop_assert_eq!(d, angular_lag((i + 1) % n, (j + 1) % n, n).unwrap());
    }

    #[test]
    fn circulant_apply_inverts_solve(n in 3usize..40, seed in any::<u64>()) {
        let mut row = vec![0.0; n];
        row[0] = 4.0;
        row[1] = 1.0 + (seed % 7) as f64 * 0.1;
        row[n - 1] = row[1];
        let m = CirculantMatrix::new(row).unwrap();
        let rhs: Vec<f64> = (0..n).map(|k| ((seed >> (k % 60)) & 0xff) as f64 / 64.0 - 2.0).collect();
        let back = m.apply(&m.solve(&rhs).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&rhs) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn matern_closed_forms_are_even_periodic_and_peaked(order in 1u32..=3, kappa in 0.05f64..80.0, theta in 0.0f64..1.0) {
        let v = psi_closed(order, theta, kappa).unwrap();
        let v0 = psi_closed(order, 0.0, kappa).unwrap();
        prop_assert!(v > 0.0);
        prop_assert!(v <= v0 * (1.0 + 1e-12));
        prop_assert!(rel_err(psi_closed(order, 1.0 - theta, kappa).unwrap(), v) < 1e-10);
        prop_assert!(rel_err(psi_closed(order, theta + 3.0, kappa).unwrap(), v) < 1e-10);
    }

    #[test]
    fn matern_curves_are_positive_definite(order in 1u32..=3, kappa in 0.05f64..60.0, n in 3usize..80) {
        let curve = matern_curve(&MaternParams::new(kappa, order as f64).unwrap(), n).unwrap();
        prop_assert!(curve.is_psd());
    }

    #[test]
    fn car_curves_are_positive_definite(a in 0.001f64..0.4999, n in 5usize..80, sigma2 in 0.01f64..10.0, second in any::<bool>()) {
        let order = if second { CarOrder::Second } else { CarOrder::First };
        let curve = car_covariance_curve(&CarSpec::new(n, order, a, sigma2).unwrap()).unwrap();
        prop_assert!(curve.is_psd());
        let v = curve.values();
        prop_assert!(v.iter().all(|x| *x <= v[0]));
    }

    #[test]
    fn exact_match_reproduces_matern_and_roundtrips(kappa in 0.05f64..60.0, n in 3usize..300) {
        let spec = match_car_to_matern_alpha1(kappa, n).unwrap();
        let car = car_covariance_curve(&spec).unwrap();
        let matern = matern_curve(&MaternParams::new(kappa, 1.0).unwrap(), n).unwrap();
        for (c, m) in car.values().iter().zip(matern.values()) {
            prop_assert!(rel_err(*c, *m) < 1e-10);
        }
        let back = match_matern_to_car(&spec).unwrap();
        prop_assert!(rel_err(back.kappa(), kappa) < 1e-12);
        prop_assert!(rel_err(back.variance_scale(), 1.0) < 1e-12);
    }

    #[test]
    fn conditioning_never_increases_variance(kappa in 0.2f64..20.0, n in 4usize..24, mask in any::<u32>()) {
        let curve = matern_curve(&MaternParams::new(kappa, 1.0).unwrap(), n).unwrap();
        let observed: BTreeMap<usize, f64> = (0..n).filter(|i| mask >> (i % 32) & 1 == 1).map(|i| (i, 0.1 * i as f64)).collect();
        let targets: Vec<usize> = (0..n).collect();
        for p in conditional_predict(&curve, &observed, &targets).unwrap() {
            prop_assert!(p.variance <= curve.variance() * (1.0 + 1e-12));
            prop_assert!(p.variance >= 0.0);
        }
    }

    #[test]
    fn car_ladders(a in 0.02f64..0.45, n in 3usize..40, lag in 0usize..40) {
        let lag = lag % n;
        let theta = lag as f64 / n as f64;
        let d1 = central(|x| phi1(theta, n, x).unwrap(), a);
        let ladder2 = phi1(theta, n, a).unwrap() + a * d1;
        let phi2v = phi2(theta, n, a).unwrap();
        prop_assert!((phi2v - ladder2).abs() <= 1e-5 * phi2v.abs().max(phi2(0.0, n, a).unwrap() * 1e-3));

        let d2 = central(|x| phi2(theta, n, x).unwrap(), a);
        let ladder3 = phi2v + 0.5 * a * d2;
        let phi3v = phi_m_spectral(3, n, a, lag).unwrap();
        prop_assert!((phi3v - ladder3).abs() <= 1e-5 * phi3v.abs().max(phi_m_spectral(3, n, a, 0).unwrap() * 1e-3));
    }

    #[test]
    fn matern_ladders(kappa in 0.1f64..50.0, theta in 0.0f64..1.0) {
        let d1 = central(|k| psi1_closed(theta, k).unwrap(), kappa);
        let p2 = psi2_closed(theta, kappa).unwrap();
        prop_assert!(rel_err(-d1 / (2.0 * kappa), p2) < 1e-5);
        let d2 = central(|k| psi2_closed(theta, k).unwrap(), kappa);
        let p3 = psi3_closed(theta, kappa).unwrap();
        prop_assert!(rel_err(-d2 / (4.0 * kappa), p3) < 1e-5);
    }
}
