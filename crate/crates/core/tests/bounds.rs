use ksp_core::bounds::*;
use ksp_core::discretization::{hankel_coefficients, i_tilde_quadrature, psi};
use ksp_core::geometry::solve_epsilon;
use ksp_core::kernel::eval_k_percent;
use ksp_core::spectra::*;

fn u_brute(n: u64) -> u64 {
    let n2 = n * n;
    let mut c = 0;
    for p in 0..n {
        for q in 0..n {
            // pq/N^2 < 1/m < (p+1)(q+1)/N^2, i.e. m pq < N^2 < m (p+1)(q+1)
            if (1..=4 * n2).any(|m| m * p * q < n2 && n2 < m * (p + 1) * (q + 1)) {
                c += 1;
            }
        }
    }
    c
}

#[test]
fn norm_constant() {
    let c = k_norm_squared_const();
    assert_eq!(format!("{:.3}", c.sqrt()), "0.286");
    assert!(c > 0.0625 && c < 0.25);
    assert!((c - k_norm_sq_quadrature()).abs() < 1e-4);
}

#[test]
fn u_enumeration() {
    assert_eq!(enumerate_u(1, false).unwrap().count, 1);
    assert_eq!(enumerate_u(2, false).unwrap().count, 4);
    for n in 1..=24u64 {
        assert_eq!(enumerate_u(n as usize, false).unwrap().count, u_brute(n), "N = {n}");
    }
    let u = enumerate_u(100, true).unwrap();
    assert!((u.count as f64) < lemma42_bound(100));
    let pts = u.points.unwrap();
    assert_eq!(pts.len() as u64, u.count);
    assert!(pts.iter().all(|&(p, q)| pts.contains(&(q, p))));
    assert!(enumerate_u(0, false).is_err());
    assert!(enumerate_u(100_001, false).is_err());
}

#[test]
fn u_below_lemma42_bound() {
    for n in 2..=2000 {
        assert!((enumerate_u(n, false).unwrap().count as f64) < lemma42_bound(n), "N = {n}");
    }
}

#[test]
fn theorem1_chain() {
    for n in 25..=500 {
        let u = enumerate_u(n, false).unwrap().count;
        assert!(lemma41_bound(n, u).unwrap() <= theorem1_bound(n).unwrap() + 1e-15, "N = {n}");
    }
    let t25 = theorem1_bound(25).unwrap();
    assert!(t25.is_finite() && t25 > 0.0);
    assert!(theorem1_bound(100_000_000).unwrap() < t25);
    assert!(theorem1_bound(24).is_err());
    assert!(lemma41_bound(24, 0).is_err());
    let u100 = enumerate_u(100, false).unwrap().count;
    assert!(lemma41_bound(100, u100).unwrap() < theorem1_bound(100).unwrap());
    let only_second = lemma41_bound(25, 0).unwrap();
    let s = (1.0 + 0.2f64).powi(8) * (4.0 / 9.0 + 23.0 / 30.0 * 25f64.powf(-1.0 / 6.0)) * 0.2;
    assert!((only_second - s).abs() < 1e-15);
}

#[test]
fn kdagger_quadrature_brute_force() {
    // midpoint rule on a fine grid, each cell of the N-grid sampled m x m times
    let n = 6u64;
    let m = 600;
    let h = 1.0 / (n as f64 * m as f64);
    let mut s = 0.0;
    for i in 0..n * m {
        for j in 0..n * m {
            let x = (i as f64 + 0.5) * h;
            let y = (j as f64 + 0.5) * h;
            let d = ksp_core::kernel::eval_k(x, y).unwrap() - ksp_core::kernel::eval_k_dagger(n, x, y).unwrap();
            s += d * d;
        }
    }
    let q = kdagger_norm_sq_quadrature(n as usize);
    assert!((s * h * h - q).abs() < 3e-3 * q, "{} vs {q}", s * h * h);
}

#[test]
fn kdagger_bounds_hold_at_desk_scale() {
    for n in [25usize, 50, 100, 200] {
        let q = kdagger_norm_sq_quadrature(n);
        let l = lemma41_bound(n, enumerate_u(n, false).unwrap().count).unwrap();
        assert!(q <= l && l <= theorem1_bound(n).unwrap(), "N = {n}");
    }
}

#[test]
fn theorem1_exceeds_quadrature_at_ten_thousand() {
    let q = kdagger_norm_sq_quadrature(10_000);
    assert!(q < theorem1_bound(10_000).unwrap());
}

#[test]
fn v_bounds_dominate_quadrature() {
    for n in [50usize, 100, 200] {
        let g = solve_epsilon(n).unwrap();
        let m = hankel_coefficients(&g);
        let q0 = v0_quadrature(&m);
        assert!(q0 <= v0_bound_refined(&m) + 1e-10, "N = {n}");
        assert!(v0_bound_refined(&m) <= v0_bound(&m));
        assert!(v1_quadrature(&g) <= v1_bound(&g), "N = {n}");
        assert!(v1_bound(&g) > 0.0 && v0_bound(&m) > 0.0);
    }
}

#[test]
fn lemma66_per_term() {
    let g = solve_epsilon(200).unwrap();
    let m = hankel_coefficients(&g);
    let mut ones = 0;
    for n in 1..=200 {
        let b = lemma66_term_bound(&m, n).unwrap();
        let at_dprime = i_tilde_quadrature(&g, n, m.mu_dprime[n - 1]).unwrap();
        let at_tilde = i_tilde_quadrature(&g, n, m.mu_tilde[n - 1]).unwrap();
        assert!(lemma66_raw(&m, n) >= at_dprime - 1e-12, "n = {n}");
        assert!(b >= at_tilde - 1e-12, "n = {n}");
        if m.sigma[n - 1] == 1.0 {
            ones += 1;
            assert!((b - at_tilde).abs() < 1e-11, "n = {n}");
        }
    }
    assert!(ones > 0);
    assert!(lemma66_term_bound(&m, 0).is_err());
    assert!(lemma66_term_bound(&m, 201).is_err());
    assert_eq!(psi(0.0), -1.0 / 3.0);
    assert_eq!(psi(1.0), 0.0);
}

#[test]
fn orthogonal_decomposition() {
    let g = solve_epsilon(100).unwrap();
    let m = hankel_coefficients(&g);
    let total = m.ktriangle_norm_sq() + v0_quadrature(&m) + v1_quadrature(&g);
    assert!((k_norm_squared_const() - total).abs() <= 5e-5);
    for n in [10usize, 100, 1000, 10_000] {
        let r = norm_report(n, n <= 1000).unwrap();
        assert!(r.ktriangle_norm_sq + r.v0_bound + r.v1_bound >= r.k_norm_sq - 1e-9);
        assert!((r.kbowtie_bound - (r.v0_bound + r.v1_bound).sqrt()).abs() < 1e-15);
    }
    let m = hankel_coefficients(&solve_epsilon(1000).unwrap());
    let floor = (k_norm_squared_const() - m.ktriangle_norm_sq()).max(0.0).sqrt();
    assert!(kbowtie_norm_bound(&m) >= floor - 1e-6);
}

fn fake_spectrum(plus: Vec<f64>, minus: Vec<f64>) -> Spectrum {
    Spectrum {
        model: Model::Triangle,
        n: 10,
        nu_plus: plus,
        nu_minus: minus,
        solver: Solver::Dense,
        seed: 0,
        residuals: vec![],
        vectors_plus: None,
        vectors_minus: None,
        iterations: 0,
    }
}

#[test]
fn enclosure_basics() {
    let s = fake_spectrum(vec![0.5, 0.2], vec![-0.3]);
    let e = enclose(&s, 0.01).unwrap();
    assert_eq!(e.len(), 3);
    assert!((e[0].lo - 0.49).abs() < 1e-15 && (e[0].hi - 0.51).abs() < 1e-15);
    assert!(e.iter().all(|x| x.lo < x.hi && x.lo == x.center - x.radius));
    assert!(e[0].lo > 0.0);
    assert!(enclose(&s, 0.0).is_err());
    assert!(enclose(&s, -1.0).is_err());
    let g = gap_lower_bound(&s, 0.01, 1, 1, Sign::Plus).unwrap();
    assert_eq!(g, -(2f64.sqrt()) * 0.01);
    assert!(gap_lower_bound(&s, 0.01, 1, 3, Sign::Plus).is_err());
    assert!(gap_lower_bound(&s, 0.01, 1, 2, Sign::Minus).is_err());
}

fn enclosures(model: Model, n: usize) -> Vec<Enclosure> {
    let s = match model {
        Model::Triangle => {
            let m = hankel_coefficients(&solve_epsilon(n).unwrap());
            spectrum_of_h(&m, &SpectrumOptions::lanczos(6, 42)).unwrap()
        }
        Model::Dagger => spectrum_of_z(n, &SpectrumOptions::dense(Some(6))).unwrap(),
    };
    enclose(&s, certified_radius(&s).unwrap()).unwrap()
}

fn pairwise_intersect(a: &[Enclosure], b: &[Enclosure]) {
    for x in a {
        let y = b.iter().find(|y| y.k == x.k && y.sign == x.sign).expect("matching index");
        assert!(x.intersects(y), "{:?} vs {:?}", x, y);
    }
}

#[test]
fn cross_scale_enclosures() {
    let a = enclosures(Model::Triangle, 1000);
    let b = enclosures(Model::Triangle, 4000);
    assert_eq!(a.len(), 12);
    pairwise_intersect(&a, &b);
    for n in [100usize, 400] {
        pairwise_intersect(&enclosures(Model::Dagger, n), &enclosures(Model::Triangle, n));
    }
    for e in a.iter().chain(&b) {
        let (lo, hi) = e.capped();
        let c = 0.5 / (e.k as f64).sqrt();
        assert!(lo >= -c && hi <= c && lo <= hi);
    }
}

#[test]
fn d_estimate() {
    for n in [10usize, 100, 1000] {
        let d = kpercent_d_estimate(n).unwrap();
        assert!(d >= 0.0 && d <= lemma54_bound(n), "N = {n}");
    }
    assert!(kpercent_d_estimate(2001).is_err());
}

#[test]
fn d_row_integral_brute_force() {
    for (n, y) in [(10usize, 0.37), (10, 0.9), (25, 0.05)] {
        let m = 2_000_000;
        let h = 1.0 / m as f64;
        let s: f64 = (0..m).map(|i| eval_k_percent(n as u64, (i as f64 + 0.5) * h, y).unwrap().abs()).sum::<f64>() * h;
        let q = kpercent_row_integral(n, y);
        assert!((s - q).abs() < 2e-3 * q, "N = {n}, y = {y}: {s} vs {q}");
    }
}

#[test]
fn theorem6_leading_term() {
    let v = theorem6_bound(9).unwrap();
    assert!(v.asymptotic);
    assert!((v.value - 21.0 / 40.0 * 9f64.ln().powi(3) / 81.0).abs() < 1e-15);
    assert!(theorem6_bound(8).is_err());
    let vals: Vec<f64> = (21..400).map(|k| theorem6_bound(k).unwrap().value).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn theorem6_against_computed_spectrum() {
    let m = hankel_coefficients(&solve_epsilon(2048).unwrap());
    let s = spectrum_of_h(&m, &SpectrumOptions::dense(Some(100))).unwrap();
    let r = kbowtie_norm_bound(&m);
    let t = theorem6_bound(100).unwrap().value;
    assert!(t >= s.nu_plus[99] - r);
    assert!(t >= s.nu_minus[99].abs() - r);
}

fn grid_min(k: usize, t7: &Theorem7, c: f64) -> f64 {
    let kf = k as f64;
    let f = |th: f64| c.exp() * (t7.s / (th * kf) + 1.0 / ((1.0 - th) * t7.t * kf).sqrt());
    // coarse 10^4-point grid on (0, 1), then a second 10^4-point grid across the best cell's neighbours
    let pts = 10_000;
    let best = (1..pts).min_by(|&a, &b| f(a as f64 / pts as f64).total_cmp(&f(b as f64 / pts as f64))).unwrap();
    let lo = (best - 1) as f64 / pts as f64;
    let hi = ((best + 1) as f64 / pts as f64).min(1.0);
    (0..=pts).map(|i| lo + (hi - lo) * i as f64 / pts as f64).filter(|&t| t > 0.0 && t < 1.0).map(f).fold(f64::INFINITY, f64::min)
}

#[test]
fn theorem7_evaluator() {
    assert!((solve_theta1(2.0) - 0.5).abs() <= 1e-12);
    let mut saw_316 = false;
    let mut saw_317 = false;
    for kind in [Model::Dagger, Model::Triangle] {
        for (k, n) in [
            (9usize, 9usize),
            (20, 1000),
            (100, 100_000),
            (1000, 1_000_000),
            (50_000, 60_000),
            (9, 1_000_000_000),
            (100_000_000, 100_000_000),
            (1_000_000_000, 1_000_000_000),
        ] {
            let r = theorem7_eval(k, n, 0.5, kind).unwrap();
            assert!(r.asymptotic);
            let th = r.theta1;
            assert!(((1.0 - th).powi(3) / th.powi(4) - r.kappa).abs() <= 1e-12 * r.kappa.max(1.0));
            let g = grid_min(k, &r, 0.5);
            assert!(r.bound_311 <= g * (1.0 + 1e-12));
            assert!((g - r.bound_311) / r.bound_311 <= 1e-8, "k = {k}, N = {n}: {}", (g - r.bound_311) / r.bound_311);
            if let Some((a, b)) = r.bound_316 {
                saw_316 = true;
                assert!(r.kappa <= 2.0);
                assert!(a <= b + 1e-15);
                assert!((a - r.bound_311).abs() <= 1e-12 * a);
            }
            if let Some((a, b)) = r.bound_317 {
                saw_317 = true;
                assert!(r.kappa >= 2.0);
                assert!(a <= b + 1e-15);
                assert!((a - r.bound_311).abs() <= 1e-12 * a);
            }
        }
    }
    assert!(saw_316 && saw_317);
    assert!(theorem7_eval(8, 100, 1.0, Model::Dagger).is_err());
    assert!(theorem7_eval(50, 10, 1.0, Model::Dagger).is_err());
    assert!(theorem7_eval(50, 100, 0.0, Model::Dagger).is_err());
}

#[test]
fn r_sum() {
    for n in [3usize, 100, 1000, 100_000] {
        let g = solve_epsilon(n).unwrap();
        let r = eval_r(&g);
        let top = ((n + 1) as f64 * g.epsilon).exp();
        let cap: f64 = (2..).take_while(|&k| (k as f64) < top).map(|k: u64| (k as f64).ln() / k as f64).sum::<f64>() / 30.0;
        assert!(r.is_finite() && r.abs() <= cap + 1e-15);
        assert_eq!(r.to_bits(), eval_r(&g).to_bits());
    }
}

#[test]
fn r_diagnostic_against_v0() {
    // V0 is comparable to (7/60) log^3 N / N + e R / 2 up to O(1/log N)
    let n = 1000;
    let g = solve_epsilon(n).unwrap();
    let m = hankel_coefficients(&g);
    let lead = 7.0 / 60.0 * (n as f64).ln().powi(3) / n as f64 + 0.5 * g.epsilon * eval_r(&g);
    let v0 = v0_quadrature(&m);
    assert!(v0 > 0.2 * lead && v0 < 5.0 * lead, "{v0} vs {lead}");
}
