//! Korobov p-sets with exact rational coordinates and their multiset unions.
//!
//! For a prime `p` and dimension `d`:
//!
//! * the S-set has points `x_h = (h, h², …, h^d) / p² mod 1` for `0 ≤ h < p²`;
//! * the T-set has points `x_{h,ℓ} = h·(ℓ, ℓ², …, ℓ^d) / p mod 1` for
//!   `0 ≤ h, ℓ < p`, stored in row-major order `h·p + ℓ`.
//!
//! Coordinates are kept as integer numerators over the common denominator
//! (`p²` or `p`), so phases `k·x mod 1` are computed exactly. Point order is
//! canonical: window primes ascending, then point index ascending.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, mul_mod, pow_mod, reduce_signed, RootTable};
use crate::error::{check_dim, domain, Error, Result};
use crate::fourier::Frequency;
use crate::prime_window::{enumerate_window, PrimeWindow};

/// Sets with more points than this are generated on the fly by default.
pub const STREAMING_THRESHOLD: u64 = 1_000_000;

/// A point of `[0,1)^d` as numerators over a shared denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalPoint {
    numerators: Vec<u64>,
    denominator: u64,
}

impl RationalPoint {
    pub fn new(numerators: Vec<u64>, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return domain("rational point with zero denominator");
        }
        if let Some(&bad) = numerators.iter().find(|&&a| a >= denominator) {
            return domain(format!("numerator {bad} not below denominator {denominator}"));
        }
        Ok(Self {
            numerators,
            denominator,
        })
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let q = self.denominator as f64;
        self.numerators.iter().map(|&a| a as f64 / q).collect()
    }

    /// `k·x mod 1` as an exact residue modulo the denominator.
    pub fn phase(&self, k: &Frequency) -> Result<u64> {
        check_dim(self.dim(), k.dim())?;
        Ok(phase_residue(&self.numerators, self.denominator, k))
    }
}

pub(crate) fn phase_residue(numerators: &[u64], q: u64, k: &Frequency) -> u64 {
    k.entries().iter().fold(0u64, |acc, &(j, v)| {
        let term = mul_mod(reduce_signed(v, q), numerators[j as usize], q);
        ((acc as u128 + term as u128) % q as u128) as u64
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetKind {
    S,
    T,
}

impl SetKind {
    /// Name of the union built from this kind of set.
    pub fn union_name(self) -> &'static str {
        match self {
            SetKind::S => "P1",
            SetKind::T => "P2",
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::S => "S",
            SetKind::T => "T",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Storage {
    Streaming,
    /// Row-major numerators, `d` per point.
    Materialized(Vec<u64>),
}

/// One Korobov p-set of `p²` points.
#[derive(Clone, Debug)]
pub struct KorobovSet {
    kind: SetKind,
    p: u64,
    d: usize,
    storage: Storage,
    roots: RootTable,
}

impl PartialEq for KorobovSet {
    fn eq(&self, other: &Self) -> bool {
        (self.kind, self.p, self.d) == (other.kind, other.p, other.d)
    }
}

impl Eq for KorobovSet {}

/// The S-set for prime `p` in dimension `d`.
pub fn s_set(p: u64, d: usize) -> Result<KorobovSet> {
    KorobovSet::new(SetKind::S, p, d)
}

/// The T-set for prime `p` in dimension `d`.
pub fn t_set(p: u64, d: usize) -> Result<KorobovSet> {
    KorobovSet::new(SetKind::T, p, d)
}

impl KorobovSet {
    pub fn new(kind: SetKind, p: u64, d: usize) -> Result<Self> {
        if !is_prime(p) {
            return domain(format!("Korobov set needs a prime, got {p}"));
        }
        if d == 0 {
            return domain("dimension must be at least 1");
        }
        if p >= 1 << 32 {
            return domain(format!("prime {p} too large: p² must fit in 64 bits"));
        }
        let q = match kind {
            SetKind::S => p * p,
            SetKind::T => p,
        };
        let roots = RootTable::new(q);
        let mut set = KorobovSet {
            kind,
            p,
            d,
            storage: Storage::Streaming,
            roots,
        };
        if set.len() <= STREAMING_THRESHOLD {
            set = set.materialize();
        }
        Ok(set)
    }

    /// Switches to materialized storage, caching every numerator.
    pub fn materialize(mut self) -> Self {
        if matches!(self.storage, Storage::Streaming) {
            let mut flat = vec![0u64; self.len() as usize * self.d];
            for (i, row) in flat.chunks_mut(self.d).enumerate() {
                self.fill_numerators(i as u64, row);
            }
            self.storage = Storage::Materialized(flat);
        }
        self
    }

    /// Drops cached numerators; points are regenerated per access.
    pub fn streaming(mut self) -> Self {
        self.storage = Storage::Streaming;
        self
    }

    pub fn is_materialized(&self) -> bool {
        matches!(self.storage, Storage::Materialized(_))
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Always `p²`.
    pub fn len(&self) -> u64 {
        self.p * self.p
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn denominator(&self) -> u64 {
        match self.kind {
            SetKind::S => self.p * self.p,
            SetKind::T => self.p,
        }
    }

    fn fill_numerators(&self, index: u64, out: &mut [u64]) {
        match self.kind {
            SetKind::S => {
                let q = self.p * self.p;
                let mut pw = 1u64;
                for slot in out.iter_mut() {
                    pw = mul_mod(pw, index, q);
                    *slot = pw;
                }
            }
            SetKind::T => {
                let (h, l) = (index / self.p, index % self.p);
                let mut pw = 1u64;
                for slot in out.iter_mut() {
                    pw = mul_mod(pw, l, self.p);
                    *slot = mul_mod(h, pw, self.p);
                }
            }
        }
    }

    /// `exp(2πi·r/denominator)` lookup for this set.
    pub fn roots(&self) -> &RootTable {
        &self.roots
    }

    /// Cached row-major numerators, if materialized.
    pub(crate) fn flat(&self) -> Option<&[u64]> {
        match &self.storage {
            Storage::Materialized(flat) => Some(flat),
            Storage::Streaming => None,
        }
    }

    /// Numerators of point `index` written into `out` (length `d`).
    pub fn numerators_into(&self, index: u64, out: &mut [u64]) {
        debug_assert_eq!(out.len(), self.d);
        match &self.storage {
            Storage::Materialized(flat) => {
                let i = index as usize * self.d;
                out.copy_from_slice(&flat[i..i + self.d]);
            }
            Storage::Streaming => self.fill_numerators(index, out),
        }
    }

    pub fn point(&self, index: u64) -> RationalPoint {
        let mut numerators = vec![0; self.d];
        self.numerators_into(index, &mut numerators);
        RationalPoint {
            numerators,
            denominator: self.denominator(),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = RationalPoint> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Exact phase residue of `k·x_index` modulo the denominator.
    ///
    /// `k` must already match the set dimension.
    #[inline]
    pub fn phase(&self, index: u64, k: &Frequency) -> u64 {
        if let Storage::Materialized(flat) = &self.storage {
            let i = index as usize * self.d;
            return phase_residue(&flat[i..i + self.d], self.denominator(), k);
        }
        match self.kind {
            SetKind::S => {
                let q = self.p * self.p;
                poly_residue(k, index % q, q)
            }
            SetKind::T => {
                let (h, l) = (index / self.p, index % self.p);
                mul_mod(h, poly_residue(k, l, self.p), self.p)
            }
        }
    }

    pub(crate) fn check_freq(&self, k: &Frequency) -> Result<()> {
        check_dim(self.d, k.dim())
    }
}

/// `Σ_j k_j·x^(j+1) mod q` over the sparse entries of `k`.
pub(crate) fn poly_residue(k: &Frequency, x: u64, q: u64) -> u64 {
    k.entries().iter().fold(0u64, |acc, &(j, v)| {
        let term = mul_mod(reduce_signed(v, q), pow_mod(x, j as u64 + 1, q), q);
        ((acc as u128 + term as u128) % q as u128) as u64
    })
}

/// Multiset union of one p-set per window prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionPointSet {
    kind: SetKind,
    window: PrimeWindow,
    d: usize,
    sets: Vec<KorobovSet>,
}

/// `P¹` (kind S) or `P²` (kind T) for window `m` in dimension `d`.
pub fn union_set(kind: SetKind, m: u64, d: usize) -> Result<UnionPointSet> {
    let window = enumerate_window(m)?;
    if window.is_empty() {
        return Err(Error::Domain(format!("empty prime window for m={m}")));
    }
    let sets = window
        .primes()
        .iter()
        .map(|&p| KorobovSet::new(kind, p, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(UnionPointSet { kind, window, d, sets })
}

impl UnionPointSet {
    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn m(&self) -> u64 {
        self.window.m()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn window(&self) -> &PrimeWindow {
        &self.window
    }

    pub fn sets(&self) -> &[KorobovSet] {
        &self.sets
    }

    /// `n = Σ p²`.
    pub fn len(&self) -> u64 {
        self.sets.iter().map(KorobovSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// All points in canonical order.
    pub fn points(&self) -> impl Iterator<Item = RationalPoint> + '_ {
        self.sets.iter().flat_map(KorobovSet::points)
    }
}
