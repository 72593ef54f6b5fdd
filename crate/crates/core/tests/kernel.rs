use ksp_core::kernel::*;
use ksp_core::quad;
use proptest::prelude::*;

#[test]
fn percent_off_grid_matches_two_evaluations() {
    let v = eval_k_percent(10, 0.31, 0.7).unwrap();
    let direct = eval_k(0.31, 0.7).unwrap() - eval_k(0.4, 0.7).unwrap();
    assert!((v - direct).abs() < 1e-15);
    assert!(v > -1.0 && v < 1.0);
}

#[test]
fn domain_errors() {
    assert!(eval_k(1.5, 0.5).is_err());
    assert!(eval_k(-0.1, 0.5).is_err());
    assert!(eval_k_dagger(3, 0.5, 1.01).is_err());
    assert!(eval_k_percent(3, -0.5, 0.2).is_err());
    assert!(integral_b1_squared(-1.0).is_err());
}

#[test]
fn zero_axes() {
    assert_eq!(eval_k(0.0, 0.3).unwrap(), 0.0);
    assert_eq!(eval_k_dagger(5, 0.3, 0.0).unwrap(), 0.0);
}

#[test]
fn b1_squared_matches_quadrature() {
    for s in [0.3f64, 1.0, 2.7, 7.25, 19.9] {
        let mut breaks: Vec<f64> = (0..=s.floor() as usize).map(|k| k as f64).collect();
        breaks.push(s);
        let q = quad::piecewise(&breaks, quad::gl16(), |u| bernoulli_b1_tilde(u).powi(2));
        assert!((integral_b1_squared(s).unwrap() - q).abs() < 1e-13, "s = {s}");
    }
}

#[test]
fn grid_values_float_vs_exact() {
    for n in [7u64, 30, 101] {
        for i in 1..=n {
            for j in 1..=n {
                let e = k_grid_exact(n, i, j);
                let f = *e.numer() as f64 / *e.denom() as f64;
                assert!((k_grid(n, i, j) - f).abs() <= f64::EPSILON, "{n} {i} {j}");
            }
        }
    }
}

fn b4_fourier(t: f64, l: usize) -> f64 {
    use std::f64::consts::PI;
    // B4(t) = -(48 / (2 pi)^4) sum_{l >= 1} cos(2 pi l t) / l^4
    let s: f64 = (1..=l).map(|k| (2.0 * PI * k as f64 * t).cos() / (k as f64).powi(4)).sum();
    -3.0 / PI.powi(4) * s
}

proptest! {
    #[test]
    fn k_is_symmetric(x in 1e-6f64..=1.0, y in 1e-6f64..=1.0) {
        prop_assert_eq!(eval_k(x, y).unwrap(), eval_k(y, x).unwrap());
    }

    #[test]
    fn ranges(x in 0.0f64..=1.0, y in 0.0f64..=1.0, n in 1u64..500) {
        let k = eval_k(x, y).unwrap();
        prop_assert!(k > -0.5 && k <= 0.5);
        let d = eval_k_dagger(n, x, y).unwrap();
        prop_assert!(d > -0.5 && d <= 0.5);
        let p = eval_k_percent(n, x, y).unwrap();
        prop_assert!(p > -1.0 && p < 1.0);
    }

    #[test]
    fn percent_vanishes_on_grid(n in 1u64..300, m in 1u64..300, y in 0.0f64..=1.0) {
        let m = (m % n) + 1;
        prop_assert_eq!(eval_k_percent(n, m as f64 / n as f64, y).unwrap(), 0.0);
    }

    #[test]
    fn b1_squared_near_linear(s in 0.0f64..100.0) {
        let dev = (integral_b1_squared(s).unwrap() - s / 12.0).abs();
        prop_assert!(dev <= 1.0 / (36.0 * 3f64.sqrt()) + 1e-15);
    }

    #[test]
    fn b4_matches_fourier(t in -5.0f64..5.0) {
        let l = 100;
        let tol = 3.0 / (std::f64::consts::PI.powi(4) * 3.0 * (l as f64).powi(3));
        prop_assert!((bernoulli_b4_tilde(t) - b4_fourier(t, l)).abs() <= tol);
    }

    #[test]
    fn bernoulli_periodic(t in -50.0f64..50.0, k in -5i32..5) {
        let s = t + k as f64;
        prop_assert!((bernoulli_b1_tilde(t) - bernoulli_b1_tilde(s)).abs() < 1e-12);
        prop_assert!((bernoulli_b4_tilde(t) - bernoulli_b4_tilde(s)).abs() < 1e-12);
    }
}
