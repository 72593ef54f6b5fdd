//! Norm bounds, certified enclosures and formula evaluators.

use serde::Serialize;

use crate::discretization::{hankel_coefficients, i_tilde_quadrature, k_sigma, HankelModel};
use crate::error::{domain, Error, Result};
use crate::geometry::{solve_epsilon, EpsilonGeometry};
use crate::spectra::{Model, Spectrum};
use crate::{par, quad};

/// Euler's constant (Stieltjes constant gamma_0).
pub const GAMMA0: f64 = 0.577_215_664_901_532_9;
/// Stieltjes constant gamma_1.
pub const GAMMA1: f64 = -0.072_815_845_483_676_73;

/// ||K||^2 = 3/4 - pi^2/24 - (log(2 pi) - 1)^2 / 2 + gamma_0^2 / 2 + gamma_1.
pub fn k_norm_squared_const() -> f64 {
    use std::f64::consts::PI;
    let l = (2.0 * PI).ln() - 1.0;
    0.75 - PI * PI / 24.0 - 0.5 * l * l + 0.5 * GAMMA0 * GAMMA0 + GAMMA1
}

/// ||K||^2 by hyperbola-split quadrature over the whole square.
pub fn k_norm_sq_quadrature() -> f64 {
    quad::rect_xy_periodic(0.0, 1.0, 0.0, 1.0, |t| (t - 0.5) * (t - 0.5))
}

/// Cap on N for the O(N^2) enumeration of U(N).
pub const U_CAP: usize = 100_000;

/// Membership of the cell (p, q) in U(N).
#[inline]
pub fn in_u(n: u64, p: u64, q: u64) -> bool {
    let n2 = n * n;
    let m0 = n2 / ((p + 1) * (q + 1)) + 1;
    m0 * p * q < n2
}

#[derive(Debug, Clone, Serialize)]
pub struct UCount {
    pub n: usize,
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<(u32, u32)>>,
}

/// |U(N)|, optionally with the member cells.
pub fn enumerate_u(n: usize, with_points: bool) -> Result<UCount> {
    if n == 0 {
        return Err(domain("N must be positive"));
    }
    if n > U_CAP {
        return Err(Error::Cap { what: "N (U enumeration)", value: n as u64, cap: U_CAP as u64 });
    }
    let nn = n as u64;
    // count q >= p and use the symmetry of the membership test
    let rows = par::map(n, |p| {
        let p = p as u64;
        (p..nn).filter(|&q| in_u(nn, p, q)).count() as u64
    });
    let diag = (0..nn).filter(|&p| in_u(nn, p, p)).count() as u64;
    let count = 2 * rows.iter().sum::<u64>() - diag;
    let points = with_points.then(|| {
        let mut v = Vec::new();
        for p in 0..nn {
            for q in 0..nn {
                if in_u(nn, p, q) {
                    v.push((p as u32, q as u32));
                }
            }
        }
        v
    });
    Ok(UCount { n, count, points })
}

/// (2 + (log log N + 9) / log N) N^{3/2} sqrt(log N).
pub fn lemma42_bound(n: usize) -> f64 {
    let l = (n as f64).ln();
    (2.0 + (l.ln() + 9.0) / l) * (n as f64).powf(1.5) * l.sqrt()
}

fn second_term(n: f64) -> f64 {
    (1.0 + n.powf(-0.5)).powi(8) * (4.0 / 9.0 + 23.0 / 30.0 * n.powf(-1.0 / 6.0))
}

fn need_25(n: usize) -> Result<()> {
    if n < 25 {
        return Err(domain(format!("N = {n} < 25")));
    }
    Ok(())
}

/// Upper bound for ||K - K-dagger||^2, N >= 25.
pub fn theorem1_bound(n: usize) -> Result<f64> {
    need_25(n)?;
    let nf = n as f64;
    let l = nf.ln();
    Ok((2.0 * l.sqrt() + second_term(nf) + (l.ln() + 9.0) / l.sqrt()) * nf.powf(-0.5))
}

/// |U| N^-2 + (1 + N^-1/2)^8 (4/9 + (23/30) N^-1/6) N^-1/2.
pub fn lemma41_bound(n: usize, u_count: u64) -> Result<f64> {
    need_25(n)?;
    let nf = n as f64;
    Ok(u_count as f64 / (nf * nf) + second_term(nf) * nf.powf(-0.5))
}

/// ((N e + 1)/12) Delta^-N + (N e / (18 sqrt 3)) Delta^-2N.
pub fn v1_bound(geom: &EpsilonGeometry) -> f64 {
    let ne = geom.n as f64 * geom.epsilon;
    let d = (-ne).exp();
    (ne + 1.0) / 12.0 * d + ne / (18.0 * 3f64.sqrt()) * d * d
}

/// Exact Ĩ_n(mu_n) when sigma_n = 1.
pub fn i_tilde_sigma_one(geom: &EpsilonGeometry, n: usize) -> f64 {
    let eps = geom.epsilon;
    let h = 0.5 * eps;
    let r = (h.sinh() / h).powi(2);
    // r - 1/r with the leading 1 - 1 removed
    let diff = (r - 1.0) * (1.0 + 1.0 / r);
    eps * eps * (n as f64 * eps).exp() * diff
}

/// The four-term per-n bound, without the sigma = 1 substitution.
pub fn lemma66_raw(model: &HankelModel, n: usize) -> f64 {
    let eps = model.geom.epsilon;
    let s = model.sigma[n - 1];
    let nf = n as f64;
    let c = crate::discretization::chi(s);
    let e2 = eps * eps;
    let e4 = e2 * e2;
    (1.0 - c * c) / 4.0 * e2 * ((1.0 - nf) * eps).exp()
        + crate::discretization::psi(s) * e2 * eps * ((1.0 + s) * eps).exp()
        + e4 / 6.0 * ((nf + 1.0 + 2.0 * s) * eps).exp()
        + (1.0 / 6.0 + s * s) * (2.0 * eps).exp() * e4
}

/// Per-n bound for Ĩ_n(mu_n); uses the exact value when sigma_n = 1 and it is smaller.
pub fn lemma66_term_bound(model: &HankelModel, n: usize) -> Result<f64> {
    if n == 0 || n > model.n() {
        return Err(Error::Index { index: n, lo: 1, hi: model.n() });
    }
    let raw = lemma66_raw(model, n);
    if model.sigma[n - 1] == 1.0 {
        Ok(raw.min(i_tilde_sigma_one(&model.geom, n)))
    } else {
        Ok(raw)
    }
}

/// sum_n n times the four-term bound, as aggregated for the published V0 figure.
pub fn v0_bound(model: &HankelModel) -> f64 {
    par::sum(model.n(), |i| (i + 1) as f64 * lemma66_raw(model, i + 1))
}

/// sum_n n * lemma66_term_bound(n): tighter, with the exact value wherever sigma_n = 1.
pub fn v0_bound_refined(model: &HankelModel) -> f64 {
    par::sum(model.n(), |i| (i + 1) as f64 * lemma66_term_bound(model, i + 1).unwrap())
}

/// sqrt(V0_bound + V1_bound).
pub fn kbowtie_norm_bound(model: &HankelModel) -> f64 {
    (v0_bound(model) + v1_bound(&model.geom)).sqrt()
}

/// True V0 = sum_n n Ĩ_n(mu_n) by quadrature.
pub fn v0_quadrature(model: &HankelModel) -> f64 {
    let g = model.geom;
    par::sum(model.n(), |i| (i + 1) as f64 * i_tilde_quadrature(&g, i + 1, model.mu_tilde[i]).unwrap())
}

/// True V1: integral of K^2 over the rectangles with i + j > N + 1.
pub fn v1_quadrature(geom: &EpsilonGeometry) -> f64 {
    let n = geom.n;
    let g = *geom;
    // rectangles R_{i,j}, 1 <= i, j <= N+1, i + j >= N + 2; pair (i, j) with (j, i)
    par::sum(n + 1, |ii| {
        let i = ii + 1;
        let mut parts = Vec::new();
        for j in i.max(n + 2 - i)..=n + 1 {
            let v = quad::rect_xy_periodic(g.x(i + 1), g.x(i), g.x(j + 1), g.x(j), |t| (t - 0.5) * (t - 0.5));
            parts.push(if i == j { v } else { 2.0 * v });
        }
        par::pairwise(&parts)
    })
}

/// ||K - K-dagger||^2 by quadrature over the N^2 squares.
pub fn kdagger_norm_sq_quadrature(n: usize) -> f64 {
    let nn = n as u64;
    let nf = n as f64;
    let h = 1.0 / nf;
    par::sum(n, |r| {
        let r = r as u64;
        let mut parts = Vec::new();
        for s in r..nn {
            let d = (r + 1) * (s + 1);
            let v = if in_u(nn, r, s) {
                let c = ((nn * nn) % d) as f64 / d as f64;
                let (a, b) = (r as f64 * h, (r + 1) as f64 * h);
                let (cy, dy) = (s as f64 * h, (s + 1) as f64 * h);
                quad::rect_xy_periodic(a, b, cy, dy, |t| (c - t) * (c - t))
            } else {
                // no hyperbola inside: K-dagger difference is N^2/((r+1)(s+1)) - 1/(xy)
                let inv = nf * nf / d as f64;
                let (rf, sf) = (r as f64, s as f64);
                let g = quad::gl8();
                h * h
                    * 0.25
                    * g.integrate(-1.0, 1.0, |u| {
                        let th = rf + 0.5 * (u + 1.0);
                        g.integrate(-1.0, 1.0, |w| {
                            let ph = sf + 0.5 * (w + 1.0);
                            let k = inv - nf * nf / (th * ph);
                            k * k
                        })
                    })
            };
            parts.push(if r == s { v } else { 2.0 * v });
        }
        par::pairwise(&parts)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "V0_bound")]
    pub v0_bound: f64,
    #[serde(rename = "V1_bound")]
    pub v1_bound: f64,
    pub kbowtie_bound: f64,
    pub ktriangle_norm_sq: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kdagger_bound_thm1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kdagger_bound_lemma41: Option<f64>,
    #[serde(rename = "K_norm_sq")]
    pub k_norm_sq: f64,
}

/// All norm quantities at N; |U(N)| is enumerated when `with_u` and N is in range.
pub fn norm_report(n: usize, with_u: bool) -> Result<NormReport> {
    let geom = solve_epsilon(n)?;
    let model = hankel_coefficients(&geom);
    let v0 = v0_bound(&model);
    let v1 = v1_bound(&geom);
    let thm1 = theorem1_bound(n).ok();
    let l41 = if with_u && (25..=U_CAP).contains(&n) { Some(lemma41_bound(n, enumerate_u(n, false)?.count)?) } else { None };
    Ok(NormReport {
        n,
        v0_bound: v0,
        v1_bound: v1,
        kbowtie_bound: (v0 + v1).sqrt(),
        ktriangle_norm_sq: model.ktriangle_norm_sq(),
        kdagger_bound_thm1: thm1,
        kdagger_bound_lemma41: l41,
        k_norm_sq: k_norm_squared_const(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Serialize)]
pub struct Enclosure {
    pub k: usize,
    pub sign: Sign,
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub radius: f64,
    pub source: Model,
}

impl Enclosure {
    /// Intersection with the trivial range |nu_k| < 1/(2 sqrt k).
    pub fn capped(&self) -> (f64, f64) {
        let c = 0.5 / (self.k as f64).sqrt();
        match self.sign {
            Sign::Plus => (self.lo.max(0.0), self.hi.min(c)),
            Sign::Minus => (self.lo.max(-c), self.hi.min(0.0)),
        }
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// One enclosure [nu - r, nu + r] per stored reciprocal eigenvalue.
pub fn enclose(spectrum: &Spectrum, radius: f64) -> Result<Vec<Enclosure>> {
    if !(radius > 0.0) {
        return Err(domain(format!("radius {radius} must be positive")));
    }
    let mk =
        |k: usize, sign: Sign, c: f64| Enclosure { k, sign, lo: c - radius, hi: c + radius, center: c, radius, source: spectrum.model };
    let mut out: Vec<Enclosure> = spectrum.nu_plus.iter().enumerate().map(|(i, &c)| mk(i + 1, Sign::Plus, c)).collect();
    out.extend(spectrum.nu_minus.iter().enumerate().map(|(i, &c)| mk(i + 1, Sign::Minus, c)));
    Ok(out)
}

/// Certified radius for a spectrum: sqrt(theorem1) for dagger, the bowtie bound for triangle.
pub fn certified_radius(spectrum: &Spectrum) -> Result<f64> {
    match spectrum.model {
        Model::Dagger => Ok(theorem1_bound(spectrum.n)?.sqrt()),
        Model::Triangle => {
            let geom = solve_epsilon(spectrum.n)?;
            Ok(kbowtie_norm_bound(&hankel_coefficients(&geom)))
        }
    }
}

/// Lower bound |nu_i| - |nu_j| - sqrt(2) * norm_bound for the gap of K (1-based, i <= j).
pub fn gap_lower_bound(spectrum: &Spectrum, norm_bound: f64, i: usize, j: usize, sign: Sign) -> Result<f64> {
    let seq = match sign {
        Sign::Plus => &spectrum.nu_plus,
        Sign::Minus => &spectrum.nu_minus,
    };
    if i == 0 || j < i || j > seq.len() {
        return Err(Error::Index { index: j.max(i), lo: 1, hi: seq.len() });
    }
    Ok(seq[i - 1].abs() - seq[j - 1].abs() - 2f64.sqrt() * norm_bound)
}

/// Cap on N for the D estimate.
pub const D_CAP: usize = 2000;

/// Integral over [u, v] (inside one unit s-interval starting at m) of |phi - (s - m)| / s^2.
fn abs_piece(phi: f64, m: f64, u: f64, v: f64) -> f64 {
    let prim = |a: f64, b: f64, sgn: f64| {
        if b <= a {
            return 0.0;
        }
        // sgn * int (phi + m - s) / s^2 ds
        sgn * ((phi + m) * (1.0 / a - 1.0 / b) - (b / a).ln())
    };
    let t = m + phi;
    if v <= t {
        prim(u, v, 1.0)
    } else if u >= t {
        prim(u, v, -1.0)
    } else {
        prim(u, t, 1.0) + prim(t, v, -1.0)
    }
}

/// int_A^B |phi - {s}| s^-2 ds.
fn strip_integral(phi: f64, a: f64, b: f64) -> f64 {
    const EXACT_LIMIT: f64 = 1e4;
    let mut total = 0.0;
    let mut s = a;
    let cut = b.min(EXACT_LIMIT.max(a.ceil() + 4.0));
    while s < cut {
        let m = s.floor();
        let e = (m + 1.0).min(cut);
        total += abs_piece(phi, m, s, e);
        s = e;
    }
    if b > s {
        let gbar = 0.5 * (phi * phi + (1.0 - phi) * (1.0 - phi));
        // int_0^1 (1-u)(|phi-u| - gbar) du
        let cbar = quad::piecewise(&[0.0, phi, 1.0], quad::gl8(), |u| (1.0 - u) * ((phi - u).abs() - gbar));
        let ib = if b.is_finite() { 1.0 / b } else { 0.0 };
        total += gbar * (1.0 / s - ib) + cbar * (1.0 / (s * s) - ib * ib);
    }
    total
}

/// int_0^1 |K%(x, y)| dx.
pub fn kpercent_row_integral(n: usize, y: f64) -> f64 {
    let nf = n as f64;
    let mut parts = Vec::with_capacity(n);
    for r in 0..n {
        let lo = nf / ((r + 1) as f64 * y);
        let hi = if r == 0 { f64::INFINITY } else { nf / (r as f64 * y) };
        let phi = lo - lo.floor();
        parts.push(strip_integral(phi, lo, hi));
    }
    par::pairwise(&parts) / y
}

/// D = int_0^1 (int_0^1 |K%| dx)^2 dy by nested quadrature.
pub fn kpercent_d_estimate(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("N must be positive"));
    }
    if n > D_CAP {
        return Err(Error::Cap { what: "N (D estimate)", value: n as u64, cap: D_CAP as u64 });
    }
    let y_min: f64 = 1e-7;
    let ratio: f64 = 1.02;
    let panels = ((1.0 / y_min).ln() / ratio.ln()).ceil() as usize;
    let g = quad::gl8();
    let vals = par::map(panels, |p| {
        let a = y_min * ratio.powi(p as i32);
        let b = (a * ratio).min(1.0);
        if a >= 1.0 {
            return 0.0;
        }
        g.integrate(a, b, |y| kpercent_row_integral(n, y).powi(2))
    });
    let head = y_min * kpercent_row_integral(n, y_min).powi(2);
    Ok(head + par::pairwise(&vals))
}

/// 49 (1 + log N) / N.
pub fn lemma54_bound(n: usize) -> f64 {
    49.0 * (1.0 + (n as f64).ln()) / n as f64
}

/// A formula value whose hypotheses carry unspecified constants.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Asymptotic {
    pub value: f64,
    pub asymptotic: bool,
}

/// Leading term (21/40) k^-2 log^3 k of the eigenvalue bound.
pub fn theorem6_bound(k: usize) -> Result<Asymptotic> {
    if k < 9 {
        return Err(domain(format!("k = {k} < 9")));
    }
    let l = (k as f64).ln();
    Ok(Asymptotic { value: 21.0 / 40.0 * l * l * l / (k as f64 * k as f64), asymptotic: true })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Theorem7 {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub kappa: f64,
    pub theta1: f64,
    pub bound_311: f64,
    /// (first, second) expressions, only when kappa <= 2.
    pub bound_316: Option<(f64, f64)>,
    /// (first, second) expressions, only when kappa >= 2.
    pub bound_317: Option<(f64, f64)>,
    pub asymptotic: bool,
}

/// Root of (1 - t)^3 t^-4 = kappa on (0, 1) by bisection.
pub fn solve_theta1(kappa: f64) -> f64 {
    let f = |t: f64| (1.0 - t).powi(3) / t.powi(4) - kappa;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn theorem7_eval(k: usize, n: usize, c: f64, kind: Model) -> Result<Theorem7> {
    if k < 9 || n < k {
        return Err(domain(format!("need N >= k >= 9, got N = {n}, k = {k}")));
    }
    if !(c > 0.0) {
        return Err(domain("c must be positive"));
    }
    let kf = k as f64;
    let nf = n as f64;
    let ln = nf.ln();
    let s = (21.0f64 / 40.0).sqrt() * kf.ln().powf(1.5);
    let t = match kind {
        Model::Dagger => (nf / (4.0 * ln)).sqrt(),
        Model::Triangle => 60.0 * nf / (7.0 * ln * ln * ln),
    };
    let kappa = kf / (4.0 * s * s * t);
    let th = solve_theta1(kappa);
    let ec = c.exp();
    let bound_311 = ec * (s / (th * kf) + 1.0 / ((1.0 - th) * t * kf).sqrt());
    let bound_316 = (kappa <= 2.0).then(|| {
        let first = ec * s / kf * (1.0 + 2.0 * (kappa * th).cbrt()) / th;
        let second = ec * s / kf * 6f64.min((3.0 * kappa.cbrt()).exp());
        (first, second)
    });
    let bound_317 = (kappa >= 2.0).then(|| {
        let pre = ec / (t * kf).sqrt();
        let first = pre * (1.0 + 0.5 * (kappa * (1.0 - th)).powf(-0.25)) / (1.0 - th).sqrt();
        let second = pre * (3.0 / 2f64.sqrt()).min((2.0 / kappa).powf(0.25).exp());
        (first, second)
    });
    Ok(Theorem7 { s, t, kappa, theta1: th, bound_311, bound_316, bound_317, asymptotic: true })
}

/// R = -sum_{1 < k < Delta^{N+1}} (log k / k) B4-tilde(log k / e).
pub fn eval_r(geom: &EpsilonGeometry) -> f64 {
    let top = ((geom.n + 1) as f64 * geom.epsilon).exp();
    let kmax = top.ceil() as usize - 1;
    if kmax < 2 {
        return 0.0;
    }
    let eps = geom.epsilon;
    -par::sum(kmax - 1, |i| {
        let k = (i + 2) as f64;
        let l = k.ln();
        l / k * crate::kernel::bernoulli_b4_tilde(l / eps)
    })
}

/// Number of n with sigma_n = 1.
pub fn count_sigma_one(geom: &EpsilonGeometry) -> usize {
    (1..=geom.n).filter(|&n| k_sigma(geom, n).1 == 1.0).count()
}
