//! The grid equation 2 sinh(e) = exp(-N e) and the geometric partition of [0, 1].

use serde::Serialize;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonGeometry {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(rename = "Delta")]
    pub big_delta: f64,
}

/// 2 sinh(e) - exp(-N e).
pub fn grid_residual(n: usize, eps: f64) -> f64 {
    2.0 * eps.sinh() - (-(n as f64) * eps).exp()
}

/// Solve the grid equation by bisection on (1e-18, 1/4) then Newton.
pub fn solve_epsilon(n: usize) -> Result<EpsilonGeometry> {
    if n < 3 {
        return Err(domain(format!("N = {n} < 3")));
    }
    let (mut lo, mut hi) = (1e-18_f64, 0.25_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if grid_residual(n, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-10 * lo {
            break;
        }
    }
    let bracket = (lo, hi);
    let nf = n as f64;
    let mut eps = 0.5 * (lo + hi);
    for _ in 0..5 {
        let f = grid_residual(n, eps);
        let df = 2.0 * eps.cosh() + nf * (-nf * eps).exp();
        let next = eps - f / df;
        if !(next > bracket.0 && next < bracket.1) {
            eps = bisect_only(n, bracket.0, bracket.1);
            break;
        }
        if next == eps {
            break;
        }
        eps = next;
    }
    Ok(EpsilonGeometry::from_epsilon(n, eps))
}

fn bisect_only(n: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if grid_residual(n, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl EpsilonGeometry {
    pub fn from_epsilon(n: usize, epsilon: f64) -> Self {
        Self { n, epsilon, delta: (-epsilon).exp(), big_delta: epsilon.exp() }
    }

    pub fn residual(&self) -> f64 {
        grid_residual(self.n, self.epsilon)
    }

    /// x_i = exp(-(i-1) e) for i <= N+1, x_{N+2} = 0.
    pub fn grid_point(&self, i: usize) -> Result<f64> {
        if i == 0 || i > self.n + 2 {
            return Err(Error::Index { index: i, lo: 1, hi: self.n + 2 });
        }
        Ok(self.x(i))
    }

    #[inline]
    pub(crate) fn x(&self, i: usize) -> f64 {
        if i == self.n + 2 {
            0.0
        } else {
            (-((i - 1) as f64) * self.epsilon).exp()
        }
    }

    /// x_i - x_{i+1}, computed without cancellation.
    #[inline]
    pub(crate) fn width(&self, i: usize) -> f64 {
        if i == self.n + 1 {
            self.x(i)
        } else {
            -(-((i - 1) as f64) * self.epsilon).exp() * (-self.epsilon).exp_m1()
        }
    }

    /// 1 - delta.
    pub fn one_minus_delta(&self) -> f64 {
        -(-self.epsilon).exp_m1()
    }

    /// Index i with x_{i+1} < t < x_i, or None when t is a grid point, 0, or outside (0, 1).
    pub fn locate(&self, t: f64) -> Option<usize> {
        if !(t > 0.0 && t < 1.0) {
            return None;
        }
        let guess = ((-t.ln() / self.epsilon).floor() as i64 + 1).min(self.n as i64 + 1);
        for i in [guess - 1, guess, guess + 1] {
            if i < 1 || i as usize > self.n + 1 {
                continue;
            }
            let i = i as usize;
            let (hi, lo) = (self.x(i), self.x(i + 1));
            if t < hi && t > lo {
                return Some(i);
            }
        }
        None
    }

    /// Names of the sandwich inequalities on e, delta and Delta that fail (empty when all hold).
    pub fn sandwich_violations(&self) -> Vec<&'static str> {
        let e = self.epsilon;
        let nf = self.n as f64;
        let ln = nf.ln();
        let big = (nf * e).exp();
        let omd = self.one_minus_delta();
        let dm1 = e.exp_m1();
        let checks = [
            ("sqrt3 < exp(Ne)", 3f64.sqrt() < big),
            ("exp(Ne) < 1/(2e)", big < 0.5 / e),
            ("(63/256) log N / N < e", 63.0 / 256.0 * ln / nf < e),
            ("e < 1/4", e < 0.25),
            ("e < log N / N", e < ln / nf),
            ("1/(1+e) < (1-delta)/e", 1.0 / (1.0 + e) < omd / e),
            ("(1-delta)/e < 1", omd / e < 1.0),
            ("1 < (Delta-1)/e", 1.0 < dm1 / e),
            ("(Delta-1)/e < 1/(1-e)", dm1 / e < 1.0 / (1.0 - e)),
            ("(4/5)e < 1-delta", 0.8 * e < omd),
            ("Delta-1 < (4/3)e", dm1 < 4.0 / 3.0 * e),
            ("3/4 < delta", 0.75 < self.delta),
            ("delta < 1 < Delta", self.delta < 1.0 && self.big_delta > 1.0),
            ("Delta < 4/3", self.big_delta < 4.0 / 3.0),
        ];
        checks.iter().filter(|c| !c.1).map(|c| c.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_n_is_rejected() {
        assert!(solve_epsilon(2).is_err());
    }

    #[test]
    fn n3_examples() {
        let g = solve_epsilon(3).unwrap();
        assert!(g.residual().abs() < 1e-13);
        let l = 3f64.ln() / 3.0;
        assert!(g.epsilon > 63.0 / 256.0 * l && g.epsilon < l);
        assert_eq!(g.grid_point(1).unwrap(), 1.0);
        assert_eq!(g.grid_point(5).unwrap(), 0.0);
        let x2 = g.grid_point(2).unwrap();
        assert_eq!(x2, (-g.epsilon).exp());
        assert!(x2 < 1.0 && x2 > g.grid_point(3).unwrap());
        assert!(g.grid_point(0).is_err() && g.grid_point(6).is_err());
    }

    #[test]
    fn locate_finds_cells() {
        let g = solve_epsilon(50).unwrap();
        for i in 1..=51 {
            let mid = 0.5 * (g.x(i) + g.x(i + 1));
            assert_eq!(g.locate(mid), Some(i));
        }
        assert_eq!(g.locate(1.0), None);
        assert_eq!(g.locate(g.x(7)), None);
    }
}
