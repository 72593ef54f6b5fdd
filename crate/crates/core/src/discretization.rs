//! Dense Gram matrix Z(N) and the geometric-grid Hankel model H(N).

use std::sync::Arc;

use num_rational::Ratio;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::EpsilonGeometry;
use crate::kernel::{k_grid, k_grid_exact, snap};
use crate::{par, quad};

/// Default cap on N for exact-mode Z.
pub const EXACT_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GramEntries {
    Float(Vec<f64>),
    Exact(Vec<Ratio<i128>>),
}

/// Z(N), stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseGram {
    pub n: usize,
    pub entries: GramEntries,
}

impl DenseGram {
    /// Entry z_{mn} (1-based) as a double.
    pub fn get(&self, m: usize, n: usize) -> f64 {
        let idx = (m - 1) * self.n + (n - 1);
        match &self.entries {
            GramEntries::Float(v) => v[idx],
            GramEntries::Exact(v) => *v[idx].numer() as f64 / *v[idx].denom() as f64,
        }
    }

    /// Row-major doubles, converting exact entries if needed.
    pub fn to_f64(&self) -> Vec<f64> {
        match &self.entries {
            GramEntries::Float(v) => v.clone(),
            GramEntries::Exact(v) => v.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect(),
        }
    }
}

pub fn build_z(n: usize, mode: Mode) -> Result<DenseGram> {
    build_z_capped(n, mode, EXACT_CAP)
}

pub fn build_z_capped(n: usize, mode: Mode, cap: usize) -> Result<DenseGram> {
    if n == 0 {
        return Err(domain("N must be positive"));
    }
    let nn = n as u64;
    let entries = match mode {
        Mode::Float => {
            let rows = par::map(n, |i| (1..=nn).map(|j| k_grid(nn, i as u64 + 1, j)).collect::<Vec<_>>());
            GramEntries::Float(rows.concat())
        }
        Mode::Exact => {
            if n > cap {
                return Err(Error::Cap { what: "N (exact mode)", value: n as u64, cap: cap as u64 });
            }
            let rows = par::map(n, |i| (1..=nn).map(|j| k_grid_exact(nn, i as u64 + 1, j)).collect::<Vec<_>>());
            GramEntries::Exact(rows.concat())
        }
    };
    Ok(DenseGram { n, entries })
}

/// Per-n data of the Hankel model (index 0 holds n = 1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HankelModel {
    pub geom: EpsilonGeometry,
    pub k: Vec<u64>,
    pub sigma: Vec<f64>,
    pub mu_tilde: Vec<f64>,
    pub mu_dprime: Vec<f64>,
    /// eta_1 .. eta_{2N-1}
    pub eta: Vec<f64>,
}

/// k_n = floor(exp((n-1)e)) + 1 and sigma_n = min(1, log(k_n)/e - n).
pub fn k_sigma(geom: &EpsilonGeometry, n: usize) -> (u64, f64) {
    let eps = geom.epsilon;
    let k = snap(((n - 1) as f64 * eps).exp()).floor() as u64 + 1;
    let sigma = ((k as f64).ln() / eps - n as f64).min(1.0);
    (k, sigma)
}

/// chi(a) = (2 - |a|) a.
pub fn chi(a: f64) -> f64 {
    (2.0 - a.abs()) * a
}

/// psi(a) = -(2/3)|a|^3 + a^2 - 1/3, in the factored form -(|a| - 1)^2 (2|a| + 1) / 3.
pub fn psi(a: f64) -> f64 {
    let t = a.abs();
    -(t - 1.0) * (t - 1.0) * (2.0 * t + 1.0) / 3.0
}

/// sum_{k>=2} (k-1) z^k / k! = 1 + (z - 1) e^z, by series for small |z|.
fn h_series(z: f64) -> f64 {
    if z.abs() > 0.5 {
        return 1.0 + (z - 1.0) * z.exp();
    }
    let mut term = z; // z^k / k! at k = 1
    let mut s = 0.0;
    for k in 2..40 {
        term *= z / k as f64;
        let add = (k - 1) as f64 * term;
        s += add;
        if add.abs() <= 1e-18 * s.abs() {
            break;
        }
    }
    s
}

/// sinh(e) - e.
fn sinh_minus_id(e: f64) -> f64 {
    if e.abs() > 0.5 {
        return e.sinh() - e;
    }
    let mut term = e;
    let mut s = 0.0;
    let e2 = e * e;
    for k in 1..30 {
        term *= e2 / ((2 * k) * (2 * k + 1)) as f64;
        s += term;
        if term.abs() <= 1e-18 * s.abs() {
            break;
        }
    }
    s
}

/// Mean of K over R_{n,1} by the closed form of the mean-value lemma.
pub fn mu_tilde_closed(geom: &EpsilonGeometry, n: usize) -> f64 {
    let eps = geom.epsilon;
    let (k, sigma) = k_sigma(geom, n);
    let half = 0.5 * eps;
    let sh = half.sinh();
    // 2(cosh e - 1) = 4 sinh^2(e/2)
    let d2 = 4.0 * sh * sh;
    let x = (sh / half) * (sh / half);
    let u = -eps * sigma;
    // sinh e - |1 - e^{-e s}| - e e^{-e s}(1 - |s|), rearranged to avoid cancellation
    let t = sinh_minus_id(eps) - sigma.signum() * h_series(u) - eps * u.exp_m1();
    k as f64 - (n as f64 * eps).exp() / x - t / d2
}

/// mu'' = k + (e s - 1) exp((n + s) e) - chi(s)/2.
pub fn mu_dprime(geom: &EpsilonGeometry, n: usize) -> f64 {
    let eps = geom.epsilon;
    let (k, sigma) = k_sigma(geom, n);
    k as f64 + (eps * sigma - 1.0) * ((n as f64 + sigma) * eps).exp() - 0.5 * chi(sigma)
}

pub fn hankel_coefficients(geom: &EpsilonGeometry) -> HankelModel {
    let n = geom.n;
    let rows = par::map(n, |i| {
        let idx = i + 1;
        let (k, sigma) = k_sigma(geom, idx);
        (k, sigma, mu_tilde_closed(geom, idx), mu_dprime(geom, idx))
    });
    let omd = geom.one_minus_delta();
    let mut eta = vec![0.0; 2 * n - 1];
    for (i, r) in rows.iter().enumerate() {
        eta[i] = (-0.5 * i as f64 * geom.epsilon).exp() * omd * r.2;
    }
    HankelModel {
        geom: *geom,
        k: rows.iter().map(|r| r.0).collect(),
        sigma: rows.iter().map(|r| r.1).collect(),
        mu_tilde: rows.iter().map(|r| r.2).collect(),
        mu_dprime: rows.iter().map(|r| r.3).collect(),
        eta,
    }
}

impl HankelModel {
    pub fn n(&self) -> usize {
        self.geom.n
    }

    /// Area of R_{n,1}: (1 - delta)^2 delta^{n-1}.
    pub fn area(&self, n: usize) -> f64 {
        let omd = self.geom.one_minus_delta();
        omd * omd * (-((n - 1) as f64) * self.geom.epsilon).exp()
    }

    /// ||K-triangle||^2 = sum n mu_n^2 area_n.
    pub fn ktriangle_norm_sq(&self) -> f64 {
        par::sum(self.n(), |i| {
            let n = i + 1;
            n as f64 * self.mu_tilde[i] * self.mu_tilde[i] * self.area(n)
        })
    }

    /// Squared Frobenius norm of H, summed over anti-diagonals.
    pub fn frobenius_sq(&self) -> f64 {
        par::sum(self.n(), |i| (i + 1) as f64 * self.eta[i] * self.eta[i])
    }

    /// Dense H, row-major.
    pub fn dense(&self) -> Vec<f64> {
        let n = self.n();
        let rows = par::map(n, |i| (0..n).map(|j| self.eta[i + j]).collect::<Vec<_>>());
        rows.concat()
    }

    /// O(N^2) product used as an oracle for the FFT path.
    pub fn matvec_direct(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if v.len() != n {
            return Err(Error::Length { expected: n, got: v.len() });
        }
        Ok(par::map(n, |i| {
            let mut s = 0.0;
            for (j, vj) in v.iter().enumerate() {
                s += self.eta[i + j] * vj;
            }
            s
        }))
    }

    /// K-triangle at (x, y).
    pub fn eval_k_triangle(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(domain(format!("({x}, {y}) outside the unit square")));
        }
        let (Some(i), Some(j)) = (self.geom.locate(x), self.geom.locate(y)) else {
            return Ok(0.0);
        };
        if i + j <= self.n() + 1 {
            Ok(self.mu_tilde[i + j - 2])
        } else {
            Ok(0.0)
        }
    }
}

/// H(N) as a fast operator: (Hv)_i = sum_j eta_{i+j-1} v_j via a cyclic convolution.
pub struct HankelOp {
    n: usize,
    len: usize,
    eta_hat: Vec<Complex<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl HankelOp {
    pub fn new(model: &HankelModel) -> Self {
        let n = model.n();
        let len = (2 * n - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let mut eta_hat = vec![Complex::new(0.0, 0.0); len];
        for (i, e) in model.eta.iter().enumerate() {
            eta_hat[i] = Complex::new(*e, 0.0);
        }
        fwd.process(&mut eta_hat);
        Self { n, len, eta_hat, fwd, inv }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn fft_len(&self) -> usize {
        self.len
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if v.len() != n {
            return Err(Error::Length { expected: n, got: v.len() });
        }
        let mut buf = vec![Complex::new(0.0, 0.0); self.len];
        for (j, vj) in v.iter().enumerate() {
            buf[n - 1 - j] = Complex::new(*vj, 0.0);
        }
        self.fwd.process(&mut buf);
        let eh = &self.eta_hat;
        par::for_chunks_mut(&mut buf, 1 << 14, |c, chunk| {
            let off = c << 14;
            for (t, b) in chunk.iter_mut().enumerate() {
                *b *= eh[off + t];
            }
        });
        self.inv.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        Ok((0..n).map(|i| buf[i + n - 1].re * scale).collect())
    }
}

/// Mean of K over R_{n,1} by 2-D quadrature split at the crossing hyperbolas.
pub fn mu_quadrature_oracle(geom: &EpsilonGeometry, n: usize) -> Result<f64> {
    if n == 0 || n > geom.n {
        return Err(Error::Index { index: n, lo: 1, hi: geom.n });
    }
    let (x0, x1) = (geom.x(n + 1), geom.x(n));
    let (y0, y1) = (geom.x(2), geom.x(1));
    let lo = 1.0 / (x1 * y1);
    let hi = 1.0 / (x0 * y0);
    let cands: Vec<f64> = ((lo.ceil() as u64)..=(hi.floor() as u64)).map(|m| m as f64).filter(|&m| m > lo && m < hi).collect();
    let inner = |x: f64| {
        let mut ys = vec![y0, y1];
        for &m in &cands {
            let y = 1.0 / (m * x);
            if y > y0 && y < y1 {
                ys.push(y);
            }
        }
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        quad::piecewise(&ys, quad::gl32(), |y| {
            let s = 1.0 / (x * y);
            0.5 - (s - s.floor())
        })
    };
    let mut xs = vec![x0, x1];
    for &m in &cands {
        for x in [1.0 / (m * y0), 1.0 / (m * y1)] {
            if x > x0 && x < x1 {
                xs.push(x);
            }
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let area = geom.width(n) * geom.width(1);
    let mut f = inner;
    let mut total = 0.0;
    for w in xs.windows(2) {
        total += quad::adaptive(w[0], w[1], 1e-14 * area, &mut f);
    }
    Ok(total / area)
}

/// Integral of (K - kappa)^2 over R_{n,1} by 1-D quadrature in the log-coordinate form.
pub fn i_tilde_quadrature(geom: &EpsilonGeometry, n: usize, kappa: f64) -> Result<f64> {
    if n == 0 || n > geom.n {
        return Err(Error::Index { index: n, lo: 1, hi: geom.n });
    }
    let eps = geom.epsilon;
    let (k, sigma) = k_sigma(geom, n);
    let k = k as f64;
    let en = (n as f64 * eps).exp();
    let piece = |s: f64, shift: f64| {
        // kappa + e^{(s+n)e} - (k -/+ 1/2), with e^{(s+n)e} - k formed first
        let base = en * (s * eps).exp() - k;
        let v = kappa + base + shift;
        v * v * (1.0 - s.abs()) * (-s * eps).exp()
    };
    let mut lower = vec![-1.0];
    if sigma > 0.0 {
        lower.push(0.0);
    }
    lower.push(sigma);
    let mut upper = vec![sigma];
    if sigma < 0.0 {
        upper.push(0.0);
    }
    upper.push(1.0);
    let a = quad::piecewise(&lower, quad::gl32(), |s| piece(s, 0.5));
    let b = quad::piecewise(&upper, quad::gl32(), |s| piece(s, -0.5));
    Ok(eps * eps * (-(n as f64) * eps).exp() * (a + b))
}
