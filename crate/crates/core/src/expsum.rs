//! Exponential sums over Korobov p-sets and their unions, with the bounds
//! they satisfy.
//!
//! For `p > d` and `p ∤ k`, the normalized sum over either p-set is at most
//! `width(supp k)/p`. Splitting `h = h₀ + h₁p` turns the S-type sum into
//! `(1/p)·Σ_{h₀ root} exp(2πi·P(h₀)/p²)`, where `P(h) = Σ_j k_j h^j` and the
//! roots solve `P'(h₀) ≡ 0 (mod p)`; `P'/h₀^(j_min−1)` has degree
//! `width − 1`, which bounds the root count.
//!
//! Over a union the bound becomes
//! `(4·width(supp k) + (8/c_P)·min_j log|k_j|)/m` because at most
//! `2·min_j log|k_j| / log m` window primes divide every entry of `k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{mul_mod, pow_mod, reduce_signed, unit_root};
use crate::error::{domain, Error, Result};
use crate::exec::{chunked_sum, map_indexed, ComplexSum, Execution};
use crate::fourier::Frequency;
use crate::korobov::{phase_residue, KorobovSet, SetKind, UnionPointSet};
use crate::prime_window::{enumerate_window, DensityConstants, PrimeWindow};

/// Slack allowed when comparing a computed sum with its bound.
pub const BOUND_SLACK: f64 = 1e-12;

/// Tolerance of the root-decomposition identity.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumKind {
    S,
    T,
    P1,
    P2,
}

impl std::str::FromStr for SumKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S" => Ok(SumKind::S),
            "T" => Ok(SumKind::T),
            "P1" => Ok(SumKind::P1),
            "P2" => Ok(SumKind::P2),
            other => domain(format!("unknown set kind {other:?}")),
        }
    }
}

impl SumKind {
    pub fn set_kind(self) -> SetKind {
        match self {
            SumKind::S | SumKind::P1 => SetKind::S,
            SumKind::T | SumKind::P2 => SetKind::T,
        }
    }

    pub fn is_union(self) -> bool {
        matches!(self, SumKind::P1 | SumKind::P2)
    }
}

/// A normalized exponential sum `(1/n)·Σ_x exp(2πi k·x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpSumResult {
    pub value: Complex64,
    pub n_terms: u64,
    pub set_kind: SumKind,
    /// `p` for a single set, `m` for a union.
    pub p_or_m: u64,
}

/// Outcome of comparing a computed quantity against a bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub slack: f64,
}

impl BoundReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        BoundReport {
            lhs,
            rhs,
            satisfied: lhs <= rhs + BOUND_SLACK,
            slack: rhs - lhs,
        }
    }
}

/// Unnormalized `Σ_x exp(2πi k·x)` over one set.
fn raw_set_sum(k: &Frequency, set: &KorobovSet, exec: Execution) -> ComplexSum {
    let q = set.denominator();
    let roots = set.roots();
    let d = set.dim();
    match set.flat() {
        Some(flat) if q < 1 << 32 => {
            let reduced: Vec<(usize, u64)> = k
                .entries()
                .iter()
                .map(|&(j, v)| (j as usize, reduce_signed(v, q)))
                .collect();
            chunked_sum(exec, set.len() as usize, |range| {
                let mut s = ComplexSum::new();
                for i in range {
                    let row = &flat[i * d..(i + 1) * d];
                    let mut r = 0u64;
                    for &(j, kv) in &reduced {
                        r = (r + kv * row[j] % q) % q;
                    }
                    s.add(roots.get(r));
                }
                s
            })
        }
        _ => chunked_sum(exec, set.len() as usize, |range| {
            let mut s = ComplexSum::new();
            for i in range {
                s.add(roots.get(set.phase(i as u64, k)));
            }
            s
        }),
    }
}

pub fn expsum_single(k: &Frequency, set: &KorobovSet) -> Result<ExpSumResult> {
    expsum_single_with(k, set, Execution::default())
}

pub fn expsum_single_with(k: &Frequency, set: &KorobovSet, exec: Execution) -> Result<ExpSumResult> {
    set.check_freq(k)?;
    let n = set.len();
    let value = raw_set_sum(k, set, exec).value() / n as f64;
    let set_kind = match set.kind() {
        SetKind::S => SumKind::S,
        SetKind::T => SumKind::T,
    };
    Ok(ExpSumResult {
        value,
        n_terms: n,
        set_kind,
        p_or_m: set.p(),
    })
}

pub fn expsum_union(k: &Frequency, uset: &UnionPointSet) -> Result<ExpSumResult> {
    expsum_union_with(k, uset, Execution::default())
}

/// Per-prime raw sums combined in window order, divided by `Σ p²`.
pub fn expsum_union_with(k: &Frequency, uset: &UnionPointSet, exec: Execution) -> Result<ExpSumResult> {
    crate::error::check_dim(uset.dim(), k.dim())?;
    let sets = uset.sets();
    let parts = map_indexed(exec, sets.len(), |i| raw_set_sum(k, &sets[i], exec));
    let mut total = ComplexSum::new();
    for part in &parts {
        total.merge(part);
    }
    let n = uset.len();
    let set_kind = match uset.kind() {
        SetKind::S => SumKind::P1,
        SetKind::T => SumKind::P2,
    };
    Ok(ExpSumResult {
        value: total.value() / n as f64,
        n_terms: n,
        set_kind,
        p_or_m: uset.m(),
    })
}

fn nonzero(k: &Frequency) -> Result<()> {
    if k.is_zero() {
        domain("frequency must be non-zero")
    } else {
        Ok(())
    }
}

/// `P'(h₀) = Σ_j k_j·j·h₀^(j−1) mod p` (1-based exponents).
fn derivative_residue(k: &Frequency, h0: u64, p: u64) -> u64 {
    k.entries().iter().fold(0u64, |acc, &(j, v)| {
        let e = j as u64 + 1;
        let coef = mul_mod(reduce_signed(v, p), e % p, p);
        (acc + mul_mod(coef, pow_mod(h0, e - 1, p), p)) % p
    })
}

/// Roots `h₀ ∈ [0, p)` of `P'(h₀) ≡ 0 (mod p)`, ascending.
pub fn congruence_roots(k: &Frequency, p: u64) -> Result<Vec<u64>> {
    nonzero(k)?;
    Ok((0..p).filter(|&h0| derivative_residue(k, h0, p) == 0).collect())
}

pub fn root_count(k: &Frequency, p: u64) -> Result<usize> {
    Ok(congruence_roots(k, p)?.len())
}

fn require_prime_above_dim(p: u64, d: usize) -> Result<()> {
    if !crate::arith::is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if p <= d as u64 {
        return Err(Error::Precondition(format!(
            "need p > d, got p={p}, d={d}; results at p <= d are unverified"
        )));
    }
    Ok(())
}

/// The S-type sum for prime `p` recomputed from the congruence roots alone.
pub fn root_reduced_sum(k: &Frequency, p: u64) -> Result<Complex64> {
    let q = p * p;
    let mut s = ComplexSum::new();
    for h0 in congruence_roots(k, p)? {
        let r = phase_residue_poly(k, h0, q);
        s.add(unit_root(r, q));
    }
    Ok(s.value() / p as f64)
}

fn phase_residue_poly(k: &Frequency, x: u64, q: u64) -> u64 {
    let numerators: Vec<u64> = (1..=k.dim() as u64).map(|e| pow_mod(x, e, q)).collect();
    phase_residue(&numerators, q, k)
}

/// Compares the S-type sum with its root-reduced form; `lhs` is the
/// absolute difference and `rhs` the tolerance.
pub fn decomposition_check(k: &Frequency, p: u64) -> Result<BoundReport> {
    nonzero(k)?;
    require_prime_above_dim(p, k.dim())?;
    let set = KorobovSet::new(SetKind::S, p, k.dim())?;
    decomposition_check_on(k, &set)
}

/// [`decomposition_check`] against a prebuilt S-set.
pub fn decomposition_check_on(k: &Frequency, set: &KorobovSet) -> Result<BoundReport> {
    nonzero(k)?;
    if set.kind() != SetKind::S {
        return domain("the root decomposition applies to S-sets");
    }
    require_prime_above_dim(set.p(), k.dim())?;
    let direct = expsum_single(k, set)?.value;
    let reduced = root_reduced_sum(k, set.p())?;
    Ok(BoundReport::new((direct - reduced).norm(), DECOMPOSITION_TOL))
}

/// `width(supp k)/p`, valid when `p > d` and `p ∤ k`.
pub fn lemma_bound(k: &Frequency, p: u64) -> Result<f64> {
    nonzero(k)?;
    require_prime_above_dim(p, k.dim())?;
    if k.divisible_by(p) {
        return Err(Error::Precondition(format!(
            "p={p} divides every entry of k={k}; only the trivial bound 1 applies"
        )));
    }
    Ok(k.width() as f64 / p as f64)
}

/// Which bound applies to a single-set sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum SingleBound {
    /// `width/p`.
    Lemma(f64),
    /// `p | k` or `k = 0`: only `|sum| ≤ 1` holds.
    Trivial,
    /// `p ≤ d`: no bound is claimed.
    Unverified,
}

pub fn single_bound(k: &Frequency, p: u64) -> SingleBound {
    if k.is_zero() || k.divisible_by(p) {
        SingleBound::Trivial
    } else if p <= k.dim() as u64 {
        SingleBound::Unverified
    } else {
        SingleBound::Lemma(k.width() as f64 / p as f64)
    }
}

/// Window primes dividing every entry of `k`.
pub fn divisor_count(k: &Frequency, window: &PrimeWindow) -> Result<usize> {
    nonzero(k)?;
    Ok(window.primes().iter().filter(|&&p| k.divisible_by(p)).count())
}

/// `(2/log m)·min_j log|k_j|`, the cap on [`divisor_count`].
pub fn divisor_count_bound(k: &Frequency, m: u64) -> Result<f64> {
    nonzero(k)?;
    Ok(2.0 / (m as f64).ln() * k.min_log_abs().unwrap_or(0.0))
}

/// `(4·width(supp k) + (8/c_P)·min_j log|k_j|)/m`.
pub fn corollary_bound(k: &Frequency, m: u64, consts: &DensityConstants) -> Result<f64> {
    nonzero(k)?;
    consts.validate()?;
    let window = enumerate_window(m)?;
    if window.min_prime() <= k.dim() as u64 {
        return Err(Error::Precondition(format!(
            "least window prime {} for m={m} does not exceed d={}",
            window.min_prime(),
            k.dim()
        )));
    }
    let minlog = k.min_log_abs().unwrap_or(0.0);
    Ok((4.0 * k.width() as f64 + 8.0 / consts.lower * minlog) / m as f64)
}
