//! Möbius sieve, Mertens function and the quadratic-form identity for M(N^2).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::discretization::Mode;
use crate::error::{domain, Error, Result};
use crate::kernel::k_grid;
use crate::par;
use crate::spectra::Spectrum;

/// Largest sieve limit accepted.
pub const SIEVE_CAP: u64 = 1_000_000_000;
/// Cap on N for the exact identity check.
pub const EXACT_IDENTITY_CAP: usize = 512;
/// Cap on N for the float identity check.
pub const FLOAT_IDENTITY_CAP: usize = 5000;

#[derive(Debug, Clone)]
pub struct MobiusTable {
    pub limit: usize,
    /// mu[n] for 0 <= n <= limit, with mu[0] = 0 unused.
    pub mu: Vec<i8>,
    pub m_prefix: Vec<i32>,
}

impl MobiusTable {
    pub fn mu(&self, n: usize) -> i8 {
        self.mu[n]
    }
}

/// Linear sieve for mu on [1, x].
pub fn sieve_mobius(x: u64) -> Result<MobiusTable> {
    if x == 0 {
        return Err(domain("sieve limit must be positive"));
    }
    if x > SIEVE_CAP {
        return Err(Error::Cap { what: "sieve limit", value: x, cap: SIEVE_CAP });
    }
    let x = x as usize;
    // 2 marks "not yet visited" (prime when reached)
    let mut mu = vec![2i8; x + 1];
    mu[0] = 0;
    mu[1] = 1;
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=x {
        if mu[i] == 2 {
            mu[i] = -1;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if ip > x {
                break;
            }
            if i % p as usize == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    let mut m_prefix = vec![0i32; x + 1];
    for i in 1..=x {
        m_prefix[i] = m_prefix[i - 1] + mu[i] as i32;
    }
    Ok(MobiusTable { limit: x, mu, m_prefix })
}

/// M(x) = sum_{n <= x} mu(n).
pub fn mertens_m(table: &MobiusTable, x: f64) -> Result<i64> {
    if !(x >= 1.0) || x.floor() > table.limit as f64 {
        return Err(domain(format!("x = {x} outside [1, {}]", table.limit)));
    }
    Ok(table.m_prefix[x.floor() as usize] as i64)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => ratio_to_f64(r),
            Value::Float(x) => *x,
        }
    }

    /// "p/q" for exact values, shortest round-trip decimal otherwise.
    pub fn render(&self) -> String {
        match self {
            Value::Exact(r) if r.is_integer() => r.numer().to_string(),
            Value::Exact(r) => format!("{}/{}", r.numer(), r.denom()),
            Value::Float(x) => format!("{x:?}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Exact(_) => s.serialize_str(&self.render()),
            Value::Float(x) => s.serialize_f64(*x),
        }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    // scale so that the quotient keeps 64 significant bits
    let (n, d) = (r.numer(), r.denom());
    if n.is_zero() {
        return 0.0;
    }
    let shift = d.bits() as i64 - n.bits() as i64 + 64;
    let q = if shift >= 0 { (n << shift as usize) / d } else { n / (d << (-shift) as usize) };
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-shift as i32)
}

fn check_range(table: &MobiusTable, n: usize) -> Result<()> {
    if n == 0 || n > table.limit {
        return Err(Error::Index { index: n, lo: 1, hi: table.limit });
    }
    Ok(())
}

/// lcm(1, ..., n).
fn lcm_upto(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)))
}

/// sum_{n <= N} mu(n)/n.
pub fn harmonic_mobius_sum(table: &MobiusTable, n: usize, mode: Mode) -> Result<Value> {
    check_range(table, n)?;
    Ok(match mode {
        Mode::Exact => {
            let l = lcm_upto(n);
            let num = scaled_harmonic(table, n, &l);
            Value::Exact(BigRational::new(num, l))
        }
        Mode::Float => {
            let terms: Vec<f64> = (1..=n).map(|k| table.mu[k] as f64 / k as f64).collect();
            Value::Float(par::pairwise(&terms))
        }
    })
}

/// L * sum mu(n)/n for L a common multiple of 1..N.
fn scaled_harmonic(table: &MobiusTable, n: usize, l: &BigInt) -> BigInt {
    let mut s = BigInt::zero();
    for k in 1..=n {
        match table.mu[k] {
            1 => s += l / k,
            -1 => s -= l / k,
            _ => {}
        }
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    #[serde(rename = "N")]
    pub n: usize,
    pub mode: Mode,
    #[serde(rename = "M_N")]
    pub m_n: i64,
    #[serde(rename = "M_N2")]
    pub m_n2: i64,
    pub harmonic_sum: Value,
    /// sum_{m,n} K(m/N, n/N) mu(m) mu(n).
    pub quadratic_form: Value,
    pub residual: Value,
}

/// M(N^2) - [2M(N) - (sum mu(n)/n)^2 N^2 + M(N)^2/2 - sum_{m,n} K(m/N, n/N) mu(m) mu(n)].
pub fn verify_identity_1_1(n: usize, mode: Mode) -> Result<IdentityCheck> {
    if n == 0 {
        return Err(domain("N must be positive"));
    }
    let cap = match mode {
        Mode::Exact => EXACT_IDENTITY_CAP,
        Mode::Float => FLOAT_IDENTITY_CAP,
    };
    if n > cap {
        return Err(Error::Cap { what: "N (identity check)", value: n as u64, cap: cap as u64 });
    }
    let table = sieve_mobius((n * n) as u64)?;
    verify_with_table(&table, n, mode)
}

pub fn verify_with_table(table: &MobiusTable, n: usize, mode: Mode) -> Result<IdentityCheck> {
    check_range(table, n * n)?;
    let m_n = table.m_prefix[n] as i64;
    let m_n2 = table.m_prefix[n * n] as i64;
    let nn = n as u64;
    let sq = nn * nn;
    let support: Vec<usize> = (1..=n).filter(|&k| table.mu[k] != 0).collect();
    let (harmonic, form, residual) = match mode {
        Mode::Exact => {
            // everything over L^2 with L = lcm(1..N): 1/(mn) = (L/m)(L/n)/L^2
            let l = lcm_upto(n);
            let s = scaled_harmonic(table, n, &l);
            let rows: Vec<BigInt> = par::map(support.len(), |a| {
                let m = support[a];
                let mut acc = BigInt::zero();
                for &k in &support {
                    let d = m as u64 * k as u64;
                    let r = sq % d;
                    if r == 0 {
                        continue;
                    }
                    let t = BigInt::from(r) * (&l / k);
                    if table.mu[k] == table.mu[m] {
                        acc += t;
                    } else {
                        acc -= t;
                    }
                }
                acc * (&l / m)
            });
            // sum mu(m) mu(n) (N^2 mod mn)/(mn), times L^2
            let a = rows.into_iter().fold(BigInt::zero(), |x, y| x + y);
            let l2 = &l * &l;
            let half_m2 = BigRational::new(BigInt::from(m_n * m_n), BigInt::from(2));
            let form = half_m2 - BigRational::new(a.clone(), l2.clone());
            // residual * L^2 = (M(N^2) - 2M(N)) L^2 + S^2 N^2 - A
            let num = BigInt::from(m_n2 - 2 * m_n) * &l2 + &s * &s * BigInt::from(sq) - a;
            (Value::Exact(BigRational::new(s, l)), Value::Exact(form), Value::Exact(BigRational::new(num, l2)))
        }
        Mode::Float => {
            let h = match harmonic_mobius_sum(table, n, Mode::Float)? {
                Value::Float(x) => x,
                Value::Exact(_) => unreachable!(),
            };
            let rows = par::map(support.len(), |a| {
                let m = support[a];
                let terms: Vec<f64> =
                    support.iter().map(|&k| k_grid(nn, m as u64, k as u64) * (table.mu[m] * table.mu[k]) as f64).collect();
                par::pairwise(&terms)
            });
            let q = par::pairwise(&rows);
            let mf = m_n as f64;
            let rhs = 2.0 * mf - h * h * (sq as f64) + 0.5 * mf * mf - q;
            (Value::Float(h), Value::Float(q), Value::Float(m_n2 as f64 - rhs))
        }
    };
    Ok(IdentityCheck { n, mode, m_n, m_n2, harmonic_sum: harmonic, quadratic_form: form, residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct Truncation {
    pub delta: f64,
    pub retained_terms: usize,
    pub truncated: f64,
    pub remainder: f64,
    /// Whether delta > sqrt((1 + log N)/N).
    pub delta_exceeds_threshold: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadraticForm {
    #[serde(rename = "N")]
    pub n: usize,
    pub direct: f64,
    pub spectral: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated: Option<Truncation>,
    /// N^{-1/2} sum mu(n) v_j(n) per eigenvector, positive then negative.
    pub s_plus: Vec<f64>,
    pub s_minus: Vec<f64>,
}

/// Spectral decomposition of m^T Z m with m = (mu(1), ..., mu(N)).
pub fn quadratic_form_spectral(table: &MobiusTable, spectrum: &Spectrum, n: usize, delta: Option<f64>) -> Result<QuadraticForm> {
    check_range(table, n)?;
    if spectrum.n != n {
        return Err(Error::Length { expected: n, got: spectrum.n });
    }
    let (vp, vm) = match (&spectrum.vectors_plus, &spectrum.vectors_minus) {
        (Some(p), Some(m)) => (p, m),
        _ => return Err(Error::MissingVectors),
    };
    if let Some(d) = delta {
        if !(d >= 0.0) {
            return Err(domain(format!("delta = {d} must be non-negative")));
        }
    }
    let nn = n as u64;
    let mu: Vec<f64> = (1..=n).map(|k| table.mu[k] as f64).collect();
    let rows = par::map(n, |i| {
        if mu[i] == 0.0 {
            return 0.0;
        }
        let t: Vec<f64> = (0..n).map(|j| k_grid(nn, i as u64 + 1, j as u64 + 1) * mu[j]).collect();
        mu[i] * par::pairwise(&t)
    });
    let direct = par::pairwise(&rows);
    let nf = n as f64;
    let proj = |v: &Vec<f64>| par::dot(v, &mu);
    // (nu, <m, v>) per stored eigenpair
    let pairs: Vec<(f64, f64)> =
        spectrum.nu_plus.iter().zip(vp).chain(spectrum.nu_minus.iter().zip(vm)).map(|(&nu, v)| (nu, proj(v))).collect();
    let term = |&(nu, c): &(f64, f64)| nf * nu * c * c;
    let spectral = par::pairwise(&pairs.iter().map(term).collect::<Vec<_>>());
    let truncated = delta.map(|d| {
        let kept: Vec<f64> = pairs.iter().filter(|p| p.0.abs() > d).map(term).collect();
        let t = par::pairwise(&kept);
        Truncation {
            delta: d,
            retained_terms: kept.len(),
            truncated: t,
            remainder: direct - t,
            delta_exceeds_threshold: d > ((1.0 + nf.ln()) / nf).sqrt(),
        }
    });
    let s = |vs: &Vec<Vec<f64>>| vs.iter().map(|v| proj(v) / nf.sqrt()).collect();
    Ok(QuadraticForm { n, direct, spectral, truncated, s_plus: s(vp), s_minus: s(vm) })
}

/// True when the residual is exactly zero.
pub fn residual_is_zero(v: &Value) -> bool {
    match v {
        Value::Exact(r) => r.is_zero(),
        Value::Float(x) => *x == 0.0,
    }
}

/// |residual| as a double.
pub fn residual_abs(v: &Value) -> f64 {
    match v {
        Value::Exact(r) => ratio_to_f64(&r.abs()),
        Value::Float(x) => x.abs(),
    }
}
