//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers run on the rayon pool unless
//! [`set_sequential`] has been called. Reductions always split work into
//! fixed-size chunks and combine the chunk partials pairwise, so results are
//! bit-identical whatever the thread count or execution path.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

static FORCE_SEQ: AtomicBool = AtomicBool::new(false);

/// Chunk length used by every reduction.
pub const CHUNK: usize = 1024;

/// Force the sequential path at runtime (no-op without `parallel`).
pub fn set_sequential(on: bool) {
    FORCE_SEQ.store(on, Ordering::SeqCst);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQ.load(Ordering::SeqCst)
}

/// `f(i)` for every `i` in `0..n`, in index order.
pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Apply `f(chunk_index, chunk)` to consecutive mutable chunks of `data`.
pub fn for_chunks_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Pairwise sum of a slice.
pub fn pairwise(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n if n <= 16 => {
            let mut s = 0.0;
            for &x in xs {
                s += x;
            }
            s
        }
        n => {
            let h = n / 2;
            pairwise(&xs[..h]) + pairwise(&xs[h..])
        }
    }
}

/// Deterministic sum of `f(i)` over `0..n`.
pub fn sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let partial = map(chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        let v: Vec<f64> = (lo..hi).map(&f).collect();
        pairwise(&v)
    });
    pairwise(&partial)
}

/// Deterministic sum of an already materialized slice.
pub fn sum_slice(xs: &[f64]) -> f64 {
    sum(xs.len(), |i| xs[i])
}

/// Dot product with the same chunked reduction as [`sum`].
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum(a.len(), |i| a[i] * b[i])
}
