//! Dense and Lanczos symmetric eigensolvers and reciprocal-eigenvalue spectra.

use serde::Serialize;

use crate::discretization::{build_z, DenseGram, HankelModel, HankelOp, Mode};
use crate::error::{domain, Error, Result};
use crate::par;

/// Default dimension cap for the dense solver.
pub const DENSE_CAP: usize = 4096;

/// Eigen-decomposition with ascending eigenvalues; `vectors[i]` pairs with `values[i]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

fn check_square(a: &[f64], n: usize, cap: usize) -> Result<()> {
    if a.len() != n * n {
        return Err(Error::Length { expected: n * n, got: a.len() });
    }
    if n > cap {
        return Err(Error::Cap { what: "dense dimension", value: n as u64, cap: cap as u64 });
    }
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((a[i * n + j] - a[j * n + i]).abs());
        }
        for j in 0..n {
            scale = scale.max(a[i * n + j].abs());
        }
    }
    if worst > 1e-14 * scale.max(1.0) {
        return Err(Error::NotSymmetric(worst));
    }
    Ok(())
}

/// Full symmetric eigen-decomposition (Householder tridiagonalization then implicit QL).
pub fn eig_dense_symmetric(a: &[f64], n: usize, want_vectors: bool) -> Result<Eigen> {
    check_square(a, n, DENSE_CAP)?;
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: want_vectors.then(Vec::new) });
    }
    // w holds the transpose of the working matrix so every inner loop is contiguous.
    let mut w: Vec<f64> = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut w, &mut d, &mut e, n, want_vectors);
    tql2(&mut w, &mut d, &mut e, n, want_vectors)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let values = idx.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| idx.iter().map(|&i| w[i * n..(i + 1) * n].to_vec()).collect());
    Ok(Eigen { values, vectors })
}

// w[c * n + r] is entry (r, c) of the working matrix.
#[allow(clippy::needless_range_loop)]
fn tred2(w: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize, acc: bool) {
    for j in 0..n {
        d[j] = w[j * n + (n - 1)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = w[j * n + (i - 1)];
                w[j * n + i] = 0.0;
                w[i * n + j] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                w[i * n + j] = f;
                let col = &w[j * n..j * n + i];
                g = e[j] + col[j] * f;
                for k in j + 1..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let (f, g) = (d[j], e[j]);
                let col = &mut w[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = w[j * n + (i - 1)];
                w[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }
    if !acc {
        for j in 0..n {
            d[j] = w[j * n + j];
        }
        e[0] = 0.0;
        return;
    }
    for i in 0..n - 1 {
        w[i * n + (n - 1)] = w[i * n + i];
        w[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = w[(i + 1) * n + k] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += w[(i + 1) * n + k] * w[j * n + k];
                }
                for k in 0..=i {
                    w[j * n + k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            w[(i + 1) * n + k] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = w[j * n + (n - 1)];
        w[j * n + (n - 1)] = 0.0;
    }
    w[(n - 1) * n + (n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tql2(w: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize, acc: bool) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(domain("implicit QL failed to converge"));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if acc {
                        let (lo, hi) = w.split_at_mut((i + 1) * n);
                        let vi = &mut lo[i * n..(i + 1) * n];
                        let vi1 = &mut hi[..n];
                        for k in 0..n {
                            let t = vi1[k];
                            vi1[k] = s * vi[k] + c * t;
                            vi[k] = c * vi[k] - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigen-decomposition of a symmetric tridiagonal matrix (diagonal `a`, off-diagonal `b`).
pub fn eig_tridiagonal(a: &[f64], b: &[f64], want_vectors: bool) -> Result<Eigen> {
    let n = a.len();
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: want_vectors.then(Vec::new) });
    }
    let mut d = a.to_vec();
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(&b[..n - 1]);
    let mut w = vec![0.0; if want_vectors { n * n } else { 0 }];
    for i in 0..n.min(if want_vectors { n } else { 0 }) {
        w[i * n + i] = 1.0;
    }
    tql2(&mut w, &mut d, &mut e, n, want_vectors)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let values = idx.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| idx.iter().map(|&i| w[i * n..(i + 1) * n].to_vec()).collect());
    Ok(Eigen { values, vectors })
}

/// splitmix64 step.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Entries uniform in [-1, 1) drawn from the splitmix64 stream.
pub fn seeded_vector(n: usize, state: &mut u64) -> Vec<f64> {
    (0..n).map(|_| (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0).collect()
}

fn norm(v: &[f64]) -> f64 {
    par::dot(v, v).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub k: usize,
    pub seed: u64,
    pub tol: f64,
    /// Defaults to 10k + 200 when None.
    pub max_iter: Option<usize>,
    /// Steps between convergence checks.
    pub check_every: usize,
}

impl LanczosOptions {
    pub fn new(k: usize, seed: u64, tol: f64) -> Self {
        Self { k, seed, tol, max_iter: None, check_every: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct LanczosResult {
    /// Largest values first, in descending order.
    pub largest: Vec<EigenPair>,
    /// Smallest values first, in ascending order.
    pub smallest: Vec<EigenPair>,
    pub iterations: usize,
    pub converged: bool,
}

/// Subtract the projection of `w` onto the span of `q` (classical Gram-Schmidt, one pass).
fn project_out(q: &[Vec<f64>], w: &mut [f64]) {
    let m = q.len();
    if m == 0 {
        return;
    }
    let n = w.len();
    let chunk = par::CHUNK * 16;
    let nchunks = n.div_ceil(chunk);
    let wr: &[f64] = w;
    let partial: Vec<Vec<f64>> = par::map(nchunks, |c| {
        let lo = c * chunk;
        let hi = (lo + chunk).min(n);
        q.iter().map(|qi| qi[lo..hi].iter().zip(&wr[lo..hi]).map(|(a, b)| a * b).sum()).collect()
    });
    let coef: Vec<f64> = (0..m).map(|i| par::pairwise(&partial.iter().map(|p| p[i]).collect::<Vec<_>>())).collect();
    par::for_chunks_mut(w, chunk, |c, wc| {
        let lo = c * chunk;
        for (qi, ci) in q.iter().zip(&coef) {
            for (t, x) in wc.iter_mut().enumerate() {
                *x -= ci * qi[lo + t];
            }
        }
    });
}

/// Extreme eigenpairs of a symmetric operator by Lanczos with full reorthogonalization.
pub fn lanczos_extreme<F>(n: usize, matvec: F, opts: LanczosOptions) -> Result<LanczosResult>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let k = opts.k;
    if k == 0 || k > n {
        return Err(domain(format!("k = {k} must lie in [1, {n}]")));
    }
    let max_iter = opts.max_iter.unwrap_or(10 * k + 200).min(n);
    let mut state = opts.seed;
    let mut q0 = seeded_vector(n, &mut state);
    let nq = norm(&q0);
    q0.iter_mut().for_each(|x| *x /= nq);
    let mut basis: Vec<Vec<f64>> = vec![q0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let need = (2 * k).min(n);

    loop {
        let j = alpha.len();
        let mut w = matvec(&basis[j]);
        alpha.push(par::dot(&basis[j], &w));
        for _ in 0..2 {
            project_out(&basis, &mut w);
        }
        let b = norm(&w);
        let m = alpha.len();
        let last = m == max_iter || m == n;
        if last || (m >= need && m.is_multiple_of(opts.check_every)) {
            let eig = eig_tridiagonal(&alpha, &beta, true)?;
            let s = eig.vectors.as_ref().unwrap();
            let est = |i: usize| (b * s[i][m - 1]).abs();
            let kk = k.min(m);
            let ok = m >= need && (0..kk).all(|i| est(i) <= opts.tol && est(m - 1 - i) <= opts.tol);
            if ok || last {
                return Ok(finish(&basis, eig, k, &matvec, m, ok || m == n));
            }
        }
        let scale = alpha.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        if b <= 1e-14 * scale.max(1e-300) {
            // invariant subspace: restart from a fresh vector orthogonal to the basis
            let mut r = seeded_vector(n, &mut state);
            for _ in 0..2 {
                project_out(&basis, &mut r);
            }
            let nr = norm(&r);
            r.iter_mut().for_each(|x| *x /= nr);
            beta.push(0.0);
            basis.push(r);
        } else {
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }
    }
}

fn finish<F>(basis: &[Vec<f64>], eig: Eigen, k: usize, matvec: &F, m: usize, converged: bool) -> LanczosResult
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = basis[0].len();
    let s = eig.vectors.unwrap();
    let ritz = |i: usize| -> EigenPair {
        let mut y = vec![0.0; n];
        par::for_chunks_mut(&mut y, par::CHUNK * 16, |c, yc| {
            let lo = c * par::CHUNK * 16;
            for (qj, sj) in basis.iter().take(m).zip(&s[i]) {
                for (t, x) in yc.iter_mut().enumerate() {
                    *x += sj * qj[lo + t];
                }
            }
        });
        let ny = norm(&y);
        y.iter_mut().for_each(|x| *x /= ny);
        let theta = eig.values[i];
        let ay = matvec(&y);
        let r: Vec<f64> = ay.iter().zip(&y).map(|(a, b)| a - theta * b).collect();
        EigenPair { value: theta, residual: norm(&r), vector: y }
    };
    let kk = k.min(m);
    let largest = (0..kk).map(|i| ritz(m - 1 - i)).collect();
    let smallest = (0..kk).map(ritz).collect();
    LanczosResult { largest, smallest, iterations: m, converged }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Dagger,
    Triangle,
}

/// Reciprocal eigenvalues of a square kernel in the two orderings.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub model: Model,
    pub n: usize,
    pub nu_plus: Vec<f64>,
    pub nu_minus: Vec<f64>,
    pub solver: Solver,
    pub seed: u64,
    /// Residuals of the stored pairs, plus ones first.
    pub residuals: Vec<f64>,
    #[serde(skip)]
    pub vectors_plus: Option<Vec<Vec<f64>>>,
    #[serde(skip)]
    pub vectors_minus: Option<Vec<Vec<f64>>>,
    #[serde(skip)]
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Number of pairs per sign; None keeps everything (dense only).
    pub k: Option<usize>,
    pub solver: Solver,
    pub seed: u64,
    /// Keep eigenvectors and compute residuals for the dense path.
    pub vectors: bool,
    pub max_iter: Option<usize>,
}

impl SpectrumOptions {
    pub fn dense(k: Option<usize>) -> Self {
        Self { k, solver: Solver::Dense, seed: 42, vectors: false, max_iter: None }
    }

    pub fn lanczos(k: usize, seed: u64) -> Self {
        Self { k: Some(k), solver: Solver::Lanczos, seed, vectors: false, max_iter: None }
    }
}

fn frob(a: &[f64]) -> f64 {
    par::dot(a, a).sqrt()
}

fn dense_matvec(a: &[f64], n: usize, v: &[f64]) -> Vec<f64> {
    par::map(n, |i| a[i * n..(i + 1) * n].iter().zip(v).map(|(x, y)| x * y).sum())
}

struct Raw {
    plus: Vec<(f64, Option<Vec<f64>>, f64)>,
    minus: Vec<(f64, Option<Vec<f64>>, f64)>,
    iterations: usize,
}

fn solve_dense(a: &[f64], n: usize, frob_norm: f64, opts: &SpectrumOptions) -> Result<Raw> {
    let eig = eig_dense_symmetric(a, n, opts.vectors)?;
    let thr = 1e-10 * frob_norm;
    let vecs = eig.vectors;
    let take = opts.k.unwrap_or(n);
    let pair = |i: usize| {
        let lam = eig.values[i];
        match &vecs {
            Some(v) => {
                let av = dense_matvec(a, n, &v[i]);
                let r = av.iter().zip(&v[i]).map(|(x, y)| (x - lam * y).powi(2)).sum::<f64>().sqrt();
                (lam, Some(v[i].clone()), r)
            }
            None => (lam, None, f64::NAN),
        }
    };
    let plus = (0..n).rev().filter(|&i| eig.values[i] > thr).take(take).map(pair).collect();
    let minus = (0..n).filter(|&i| eig.values[i] < -thr).take(take).map(pair).collect();
    Ok(Raw { plus, minus, iterations: 0 })
}

fn solve_lanczos<F: Fn(&[f64]) -> Vec<f64>>(n: usize, f: F, frob_norm: f64, opts: &SpectrumOptions) -> Result<Raw> {
    let k = opts.k.ok_or_else(|| domain("Lanczos needs a finite k"))?.min(n);
    let mut lo = LanczosOptions::new(k, opts.seed, 1e-10 * frob_norm);
    lo.max_iter = opts.max_iter;
    let res = lanczos_extreme(n, f, lo)?;
    if !res.converged {
        let ok = res.largest.iter().chain(&res.smallest).filter(|p| p.residual <= lo.tol).count();
        return Err(Error::NoConvergence { iterations: res.iterations, converged: ok, wanted: 2 * k });
    }
    let thr = 1e-10 * frob_norm;
    let keep = opts.vectors;
    let conv = |p: &EigenPair| (p.value, keep.then(|| p.vector.clone()), p.residual);
    let plus = res.largest.iter().filter(|p| p.value > thr).map(conv).collect();
    let minus = res.smallest.iter().filter(|p| p.value < -thr).map(conv).collect();
    Ok(Raw { plus, minus, iterations: res.iterations })
}

fn assemble(model: Model, n: usize, scale: f64, raw: Raw, opts: &SpectrumOptions) -> Spectrum {
    let residuals = raw.plus.iter().chain(&raw.minus).map(|p| p.2).filter(|r| !r.is_nan()).collect();
    let keep_vec = opts.vectors;
    Spectrum {
        model,
        n,
        nu_plus: raw.plus.iter().map(|p| p.0 / scale).collect(),
        nu_minus: raw.minus.iter().map(|p| p.0 / scale).collect(),
        solver: opts.solver,
        seed: opts.seed,
        residuals,
        vectors_plus: keep_vec.then(|| raw.plus.iter().map(|p| p.1.clone().unwrap()).collect()),
        vectors_minus: keep_vec.then(|| raw.minus.iter().map(|p| p.1.clone().unwrap()).collect()),
        iterations: raw.iterations,
    }
}

/// Reciprocal eigenvalues nu = Lambda / N of K-dagger from Z(N).
pub fn spectrum_of_z(n: usize, opts: &SpectrumOptions) -> Result<Spectrum> {
    let z = build_z(n, Mode::Float)?;
    spectrum_of_gram(&z, opts)
}

pub fn spectrum_of_gram(z: &DenseGram, opts: &SpectrumOptions) -> Result<Spectrum> {
    let n = z.n;
    let a = z.to_f64();
    let fr = frob(&a);
    let raw = match opts.solver {
        Solver::Dense => solve_dense(&a, n, fr, opts)?,
        Solver::Lanczos => solve_lanczos(n, |v| dense_matvec(&a, n, v), fr, opts)?,
    };
    Ok(assemble(Model::Dagger, n, n as f64, raw, opts))
}

/// Reciprocal eigenvalues of K-triangle: the nonzero eigenvalues of H(N).
pub fn spectrum_of_h(model: &HankelModel, opts: &SpectrumOptions) -> Result<Spectrum> {
    let n = model.n();
    let fr = model.frobenius_sq().sqrt();
    let raw = match opts.solver {
        Solver::Dense => {
            let a = model.dense();
            solve_dense(&a, n, fr, opts)?
        }
        Solver::Lanczos => {
            let op = HankelOp::new(model);
            solve_lanczos(n, |v| op.apply(v).expect("length checked"), fr, opts)?
        }
    };
    Ok(assemble(Model::Triangle, n, 1.0, raw, opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diag() {
        let id = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let e = eig_dense_symmetric(&id, 3, true).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let dg = vec![2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0];
        let e = eig_dense_symmetric(&dg, 3, true).unwrap();
        assert_eq!(e.values, vec![-1.0, 0.0, 2.0]);
        let v = e.vectors.unwrap();
        assert_eq!(v[2][0].abs(), 1.0);
        assert_eq!(v[0][1].abs(), 1.0);
        assert_eq!(v[1][2].abs(), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(eig_dense_symmetric(&[1.0, 2.0, 3.0, 4.0], 2, false), Err(Error::NotSymmetric(_))));
        assert!(eig_dense_symmetric(&[1.0; 3], 2, false).is_err());
    }

    #[test]
    fn lanczos_on_identity() {
        let r = lanczos_extreme(50, |v| v.to_vec(), LanczosOptions::new(3, 1, 1e-12)).unwrap();
        assert!(r.converged);
        assert!(r.largest.iter().chain(&r.smallest).all(|p| (p.value - 1.0).abs() < 1e-14));
    }

    #[test]
    fn tiny_z_spectra() {
        let s = spectrum_of_z(1, &SpectrumOptions::dense(None)).unwrap();
        assert_eq!(s.nu_plus, vec![0.5]);
        assert!(s.nu_minus.is_empty());
        let s = spectrum_of_z(2, &SpectrumOptions::dense(None)).unwrap();
        assert_eq!(s.nu_plus.len(), 1);
        assert!((s.nu_plus[0] - 0.5).abs() < 1e-15);
        assert!(s.nu_minus.is_empty());
    }
}
