//! Pointwise kernels and periodic Bernoulli functions.

use num_rational::Ratio;

use crate::error::{domain, Result};

/// Distance between `t` and the next representable double away from zero.
fn ulp(t: f64) -> f64 {
    let a = t.abs();
    if a == 0.0 {
        return f64::MIN_POSITIVE;
    }
    f64::from_bits(a.to_bits() + 1) - a
}

/// Round `t` to the nearest integer when it is within 4 ulp of one.
pub fn snap(t: f64) -> f64 {
    let r = t.round();
    if (t - r).abs() <= 4.0 * ulp(t) {
        r
    } else {
        t
    }
}

/// `t - floor(t)` after [`snap`].
pub fn frac(t: f64) -> f64 {
    let t = snap(t);
    t - t.floor()
}

fn check_unit(x: f64, y: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return Err(domain(format!("({x}, {y}) outside the unit square")));
    }
    Ok(())
}

/// K(x, y) = 1/2 - {1/(xy)}, and 0 on the axes.
pub fn eval_k(x: f64, y: f64) -> Result<f64> {
    check_unit(x, y)?;
    if x == 0.0 || y == 0.0 {
        return Ok(0.0);
    }
    Ok(k_unchecked(x, y))
}

#[inline]
pub(crate) fn k_unchecked(x: f64, y: f64) -> f64 {
    0.5 - frac(1.0 / (x * y))
}

/// `ceil(N t)` with the snap guard, as an integer.
pub fn ceil_grid(n: u64, t: f64) -> u64 {
    snap(n as f64 * t).ceil() as u64
}

/// Exact `(N^2 mod ab) / ab` for positive integers.
fn frac_ratio_f64(n: u64, a: u64, b: u64) -> f64 {
    let d = a as u128 * b as u128;
    let r = (n as u128 * n as u128) % d;
    r as f64 / d as f64
}

/// K-dagger: 1/2 - {N^2 / (ceil(Nx) ceil(Ny))}, 0 when xy = 0.
pub fn eval_k_dagger(n: u64, x: f64, y: f64) -> Result<f64> {
    check_unit(x, y)?;
    if n == 0 {
        return Err(domain("N must be positive"));
    }
    if x == 0.0 || y == 0.0 {
        return Ok(0.0);
    }
    let a = ceil_grid(n, x);
    let b = ceil_grid(n, y);
    Ok(0.5 - frac_ratio_f64(n, a, b))
}

/// K%(x, y) = K(x, y) - K(ceil(Nx)/N, y).
pub fn eval_k_percent(n: u64, x: f64, y: f64) -> Result<f64> {
    check_unit(x, y)?;
    if n == 0 {
        return Err(domain("N must be positive"));
    }
    let nx = snap(n as f64 * x);
    if nx == nx.floor() {
        return Ok(0.0);
    }
    let g = nx.ceil() / n as f64;
    Ok(eval_k(x, y)? - eval_k(g, y)?)
}

/// Float value of K(m/N, n/N) via the integer remainder.
pub fn k_grid(n: u64, i: u64, j: u64) -> f64 {
    0.5 - frac_ratio_f64(n, i, j)
}

/// Exact K(m/N, n/N) = 1/2 - (N^2 mod mn)/(mn).
pub fn k_grid_exact(n: u64, i: u64, j: u64) -> Ratio<i128> {
    let d = i as i128 * j as i128;
    let r = (n as i128 * n as i128) % d;
    Ratio::new(d - 2 * r, 2 * d)
}

/// {t} - 1/2.
pub fn bernoulli_b1_tilde(t: f64) -> f64 {
    frac(t) - 0.5
}

/// B4({t}) with B4(X) = X^4 - 2X^3 + X^2 - 1/30.
pub fn bernoulli_b4_tilde(t: f64) -> f64 {
    let x = frac(t);
    x * x * (x - 1.0) * (x - 1.0) - 1.0 / 30.0
}

/// Integral of B1-tilde squared over [0, s].
pub fn integral_b1_squared(s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(domain(format!("s = {s} must be finite and non-negative")));
    }
    let tau = frac(s);
    let p = (tau - 0.5).powi(3) - tau / 4.0 + 0.125;
    Ok(s / 12.0 + p / 3.0)
}
