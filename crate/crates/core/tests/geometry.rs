use ksp_core::geometry::*;

#[test]
fn sweep_satisfies_sandwich() {
    let mut n = 3usize;
    while n <= 100_000 {
        let g = solve_epsilon(n).unwrap();
        assert!(g.residual().abs() <= 1e-13, "N = {n}");
        assert!(g.sandwich_violations().is_empty(), "N = {n}: {:?}", g.sandwich_violations());
        // 1 - delta^2 = delta^{N+1}
        let lhs = 1.0 - g.delta * g.delta;
        assert!((lhs - g.delta.powi(n as i32 + 1)).abs() <= 1e-13, "N = {n}");
        n = if n < 100 { n + 1 } else { n * 3 / 2 };
    }
}

#[test]
fn matches_independent_bisection() {
    let n = 1_000_000usize;
    let f = |e: f64| 2.0 * e.sinh() - (-(n as f64) * e).exp();
    let (mut lo, mut hi) = (0.0f64, 0.25f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = solve_epsilon(n).unwrap();
    assert!((g.epsilon - lo).abs() <= 1e-14 * lo.max(1e-300) + 1e-20);
    assert!(g.residual().abs() <= 1e-13);
}

#[test]
fn grid_descends_and_ends_at_zero() {
    for n in [3usize, 17, 400] {
        let g = solve_epsilon(n).unwrap();
        let xs: Vec<f64> = (1..=n + 2).map(|i| g.grid_point(i).unwrap()).collect();
        assert_eq!(xs[0], 1.0);
        assert_eq!(xs[n + 1], 0.0);
        assert!(xs.windows(2).all(|w| w[0] > w[1]));
        assert!(g.grid_point(0).is_err());
        assert!(g.grid_point(n + 3).is_err());
    }
}

#[test]
fn hyperbola_spacing() {
    let n = 60usize;
    let g = solve_epsilon(n).unwrap();
    let x = |i: usize| g.grid_point(i).unwrap();
    for i in 1..=n + 1 {
        for j in 1..=n + 1 {
            let gap = 1.0 / (x(i + 1) * x(j + 1)) - 1.0 / (x(i) * x(j));
            if i + j <= n + 1 {
                assert!(gap <= 1.0 + 1e-12, "{i} {j} {gap}");
            } else if i + j == n + 2 && i <= n && j <= n {
                assert!(gap > 1.0 - 1e-12, "{i} {j} {gap}");
            }
        }
    }
}

#[test]
fn serializes_with_capital_delta() {
    let g = solve_epsilon(3).unwrap();
    let v = serde_json::to_value(g).unwrap();
    assert!(v.get("Delta").is_some());
    assert!(v.get("epsilon").is_some());
}
