//! Execution strategy and deterministic reductions.
//!
//! Every reduction splits its index range into fixed-size chunks, sums each
//! chunk with Neumaier compensation and merges the chunk results in index
//! order. Chunk boundaries do not depend on the thread count, so sequential
//! and parallel runs produce bit-identical output.

use std::ops::Range;

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of indices summed per chunk in deterministic reductions.
pub const CHUNK: usize = 4096;

/// How data-parallel loops are executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled, and
    /// falls back to sequential execution otherwise.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Neumaier-compensated accumulator for a real sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for a complex sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Maps `f` over `0..len`, preserving index order in the output.
pub fn map_indexed<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..len).into_par_iter().map(f).collect(),
        _ => (0..len).map(f).collect(),
    }
}

/// Sums `chunk_sum` over fixed chunks of `0..len` and merges them in order.
pub fn chunked_sum<F>(exec: Execution, len: usize, chunk_sum: F) -> ComplexSum
where
    F: Fn(Range<usize>) -> ComplexSum + Sync + Send,
{
    let n_chunks = len.div_ceil(CHUNK);
    let parts = map_indexed(exec, n_chunks, |c| {
        let start = c * CHUNK;
        chunk_sum(start..(start + CHUNK).min(len))
    });
    let mut total = ComplexSum::new();
    for part in &parts {
        total.merge(part);
    }
    total
}

/// Real-valued counterpart of [`chunked_sum`]; stops at the first error.
pub fn chunked_real_sum<F, E>(exec: Execution, len: usize, chunk_sum: F) -> Result<f64, E>
where
    E: Send,
    F: Fn(Range<usize>) -> Result<KahanSum, E> + Sync + Send,
{
    let n_chunks = len.div_ceil(CHUNK);
    let parts = map_indexed(exec, n_chunks, |c| {
        let start = c * CHUNK;
        chunk_sum(start..(start + CHUNK).min(len))
    });
    let mut total = KahanSum::new();
    for part in parts {
        total.merge(&part?);
    }
    Ok(total.value())
}
