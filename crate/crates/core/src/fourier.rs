//! Finite Fourier series on `[0,1)^d` and the three weighted ℓ¹ norms.
//!
//! A frequency `k ∈ ℤ^d` is stored sparsely as ascending `(index, value)`
//! pairs with zero entries omitted; indices are 0-based. All logarithms are
//! natural.
//!
//! The weight of `k` is `max(a(k), min_{j∈supp k} log|k_j|)` where `a(k)` is
//! `1` (F1), `|supp k|` (F3) or `width(supp k)` (F2). For `k = 0` the minimum
//! over the empty support is dropped and every scheme gives weight 1.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::unit_root;
use crate::error::{check_dim, domain, Error, Result};
use crate::korobov::RationalPoint;

/// A frequency vector `k ∈ ℤ^d` in canonical sparse form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frequency {
    d: usize,
    entries: Vec<(u32, i64)>,
}

impl Frequency {
    pub fn zero(d: usize) -> Self {
        Self { d, entries: Vec::new() }
    }

    pub fn from_dense(values: &[i64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(j, &v)| (j as u32, v))
            .collect();
        Self {
            d: values.len(),
            entries,
        }
    }

    /// Builds a frequency from `(index, value)` pairs in any order.
    /// Zero values are dropped; repeated or out-of-range indices are errors.
    pub fn from_sparse(d: usize, pairs: &[(u32, i64)]) -> Result<Self> {
        let mut entries: Vec<(u32, i64)> = pairs.iter().copied().filter(|&(_, v)| v != 0).collect();
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return domain(format!("index {} repeated in sparse frequency", w[0].0));
            }
        }
        if let Some(&(j, _)) = entries.iter().find(|&&(j, _)| j as usize >= d) {
            return domain(format!("frequency index {j} out of range for d={d}"));
        }
        Ok(Self { d, entries })
    }

    /// `value·e_index`.
    pub fn axis(d: usize, index: usize, value: i64) -> Self {
        assert!(index < d, "axis index out of range");
        let entries = if value == 0 {
            Vec::new()
        } else {
            vec![(index as u32, value)]
        };
        Self { d, entries }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[(u32, i64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, j: usize) -> i64 {
        self.entries
            .binary_search_by_key(&(j as u32), |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<i64> {
        let mut v = vec![0; self.d];
        for &(j, x) in &self.entries {
            v[j as usize] = x;
        }
        v
    }

    /// Support indices, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.0 as usize).collect()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn width(&self) -> usize {
        match (self.entries.first(), self.entries.last()) {
            (Some(a), Some(b)) => (b.0 - a.0) as usize + 1,
            _ => 1,
        }
    }

    /// `min_{j∈supp k} log|k_j|`, or `None` for the zero vector.
    pub fn min_log_abs(&self) -> Option<f64> {
        self.entries
            .iter()
            .map(|e| e.1.unsigned_abs())
            .min()
            .map(|a| (a as f64).ln())
    }

    /// Whether `q` divides every entry.
    pub fn divisible_by(&self, q: u64) -> bool {
        self.entries.iter().all(|&(_, v)| v.unsigned_abs() % q == 0)
    }

    pub fn neg(&self) -> Self {
        Self {
            d: self.d,
            entries: self.entries.iter().map(|&(j, v)| (j, -v)).collect(),
        }
    }

    pub fn sub(&self, other: &Frequency) -> Self {
        assert_eq!(self.d, other.d, "frequency dimensions differ");
        let mut dense = self.to_dense();
        for &(j, v) in &other.entries {
            dense[j as usize] -= v;
        }
        Self::from_dense(&dense)
    }

    /// Reverses variable order: index `j` moves to `d-1-j`.
    pub fn reversed(&self) -> Self {
        let mut entries: Vec<(u32, i64)> = self.entries.iter().map(|&(j, v)| (self.d as u32 - 1 - j, v)).collect();
        entries.reverse();
        Self { d: self.d, entries }
    }

    /// Moves entry `j` to index `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.d);
        let mut entries: Vec<(u32, i64)> = self
            .entries
            .iter()
            .map(|&(j, v)| (perm[j as usize] as u32, v))
            .collect();
        entries.sort_unstable();
        Self { d: self.d, entries }
    }

    pub fn weight(&self, scheme: WeightScheme) -> f64 {
        weight(self, scheme)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dense: Vec<String> = self.to_dense().iter().map(i64::to_string).collect();
        write!(f, "({})", dense.join(","))
    }
}

/// `max(u) − min(u) + 1` for non-empty `u`, 1 for the empty set.
pub fn width(u: &[usize]) -> usize {
    match (u.iter().min(), u.iter().max()) {
        (Some(lo), Some(hi)) => hi - lo + 1,
        _ => 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    F1,
    F2,
    F3,
}

impl std::str::FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(WeightScheme::F1),
            "f2" => Ok(WeightScheme::F2),
            "f3" => Ok(WeightScheme::F3),
            other => domain(format!("unknown weight scheme {other:?}")),
        }
    }
}

pub fn weight(k: &Frequency, scheme: WeightScheme) -> f64 {
    let base = match scheme {
        WeightScheme::F1 => 1.0,
        WeightScheme::F2 => k.width() as f64,
        WeightScheme::F3 => k.support_size().max(1) as f64,
    };
    match k.min_log_abs() {
        Some(l) => base.max(l),
        None => base,
    }
}

/// A finite Fourier series `f(x) = Σ_k c_k·exp(2πi k·x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction {
    d: usize,
    coeffs: BTreeMap<Frequency, Complex64>,
    real: bool,
}

/// Relative tolerance of the Hermitian check on parsed input.
const HERMITIAN_TOL: f64 = 1e-12;

impl SpectralFunction {
    /// Sums coefficients of repeated frequencies; drops exact zeros.
    /// With `real` set, the coefficients must be Hermitian.
    pub fn new<I>(d: usize, real: bool, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Frequency, Complex64)>,
    {
        let mut map: BTreeMap<Frequency, Complex64> = BTreeMap::new();
        for (k, c) in coeffs {
            check_dim(d, k.dim())?;
            if !(c.re.is_finite() && c.im.is_finite()) {
                return domain(format!("non-finite coefficient at {k}"));
            }
            *map.entry(k).or_default() += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        let f = SpectralFunction { d, coeffs: map, real };
        if real {
            f.check_hermitian()?;
        }
        Ok(f)
    }

    pub fn constant(d: usize, c: f64) -> Self {
        Self::new(d, true, [(Frequency::zero(d), Complex64::new(c, 0.0))]).expect("constant is Hermitian")
    }

    fn check_hermitian(&self) -> Result<()> {
        for (k, c) in &self.coeffs {
            let mirror = self.coeff(&k.neg());
            let tol = HERMITIAN_TOL * c.norm().max(1.0);
            if (mirror - c.conj()).norm() > tol {
                return domain(format!("coefficients are not Hermitian at {k}"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn coeffs(&self) -> &BTreeMap<Frequency, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: &Frequency) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn norm(&self, scheme: WeightScheme) -> f64 {
        norm(self, scheme)
    }

    /// `I(f) = f̂(0)`.
    pub fn integral(&self) -> Complex64 {
        self.coeff(&Frequency::zero(self.d))
    }

    /// Value at a rational point; each phase is reduced exactly before the
    /// single conversion to floating point.
    pub fn evaluate(&self, x: &RationalPoint) -> Result<Complex64> {
        check_dim(self.d, x.dim())?;
        let q = x.denominator();
        let mut s = crate::exec::ComplexSum::new();
        for (k, c) in &self.coeffs {
            let r = crate::korobov::phase_residue(x.numerators(), q, k);
            s.add(c * unit_root(r, q));
        }
        Ok(s.value())
    }

    /// Value at a floating-point point of `[0,1)^d`.
    pub fn evaluate_f64(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(self.d, x.len())?;
        let mut s = crate::exec::ComplexSum::new();
        for (k, c) in &self.coeffs {
            let t: f64 = k.entries().iter().map(|&(j, v)| v as f64 * x[j as usize]).sum();
            let frac = t - t.floor();
            let (sn, cs) = (std::f64::consts::TAU * frac).sin_cos();
            s.add(c * Complex64::new(cs, sn));
        }
        Ok(s.value())
    }

    /// `g(x) = f(x_{d-1}, …, x_0)`.
    pub fn reversed(&self) -> Self {
        SpectralFunction {
            d: self.d,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.reversed(), *c)).collect(),
            real: self.real,
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        SpectralFunction {
            d: self.d,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.permuted(perm), *c)).collect(),
            real: self.real,
        }
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        SpectralFunction {
            d: self.d,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c * s)).collect(),
            real: self.real,
        }
    }
}

/// `Σ_k |f̂(k)|·weight(k)` over the stored coefficients.
pub fn norm(f: &SpectralFunction, scheme: WeightScheme) -> f64 {
    let mut s = crate::exec::KahanSum::new();
    for (k, c) in &f.coeffs {
        s.add(c.norm() * weight(k, scheme));
    }
    s.value()
}

pub fn integral(f: &SpectralFunction) -> Complex64 {
    f.integral()
}

pub fn evaluate(f: &SpectralFunction, x: &RationalPoint) -> Result<Complex64> {
    f.evaluate(x)
}

/// Largest support drawn by [`random_function`].
pub const MAX_RANDOM_SUPPORT: usize = 4;

/// Number of `±k` pairs the generator can draw from.
fn available_pairs(d: usize, max_abs_freq: u64) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for s in 1..=d.min(MAX_RANDOM_SUPPORT) {
        binom = binom * (d - s + 1) as u128 / s as u128;
        total = total.saturating_add(binom.saturating_mul((2 * max_abs_freq as u128).pow(s as u32)));
    }
    total / 2
}

/// A seeded real-valued test function with `support_budget` Hermitian pairs,
/// each with support of at most [`MAX_RANDOM_SUPPORT`] coordinates and
/// entries in `[-max_abs_freq, max_abs_freq]`, scaled to unit norm under
/// `scheme`.
pub fn random_function(
    seed: u64,
    d: usize,
    support_budget: usize,
    max_abs_freq: u64,
    scheme: WeightScheme,
) -> Result<SpectralFunction> {
    if d == 0 || support_budget == 0 || max_abs_freq == 0 {
        return domain("random function needs d, budget and max frequency >= 1");
    }
    if support_budget as u128 > available_pairs(d, max_abs_freq) {
        return domain(format!(
            "budget {support_budget} exceeds the {} distinct frequency pairs available",
            available_pairs(d, max_abs_freq)
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reps: Vec<Frequency> = Vec::with_capacity(support_budget);
    let mut attempts = 0usize;
    while reps.len() < support_budget {
        attempts += 1;
        if attempts > 1000 * support_budget + 1000 {
            return domain("could not draw enough distinct frequencies");
        }
        let s = rng.random_range(1..=d.min(MAX_RANDOM_SUPPORT));
        let idx = rand::seq::index::sample(&mut rng, d, s);
        let mut pairs: Vec<(u32, i64)> = idx
            .iter()
            .map(|j| {
                let mag = rng.random_range(1..=max_abs_freq) as i64;
                (j as u32, if rng.random_bool(0.5) { mag } else { -mag })
            })
            .collect();
        pairs.sort_unstable();
        // canonical representative of ±k: first entry positive
        if pairs[0].1 < 0 {
            pairs.iter_mut().for_each(|e| e.1 = -e.1);
        }
        let k = Frequency { d, entries: pairs };
        if !reps.contains(&k) {
            reps.push(k);
        }
    }
    let mut coeffs = Vec::with_capacity(2 * support_budget);
    for k in reps {
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let c = if c.norm() < 1e-3 { Complex64::new(1.0, 0.0) } else { c };
        coeffs.push((k.neg(), c.conj()));
        coeffs.push((k, c));
    }
    let f = SpectralFunction::new(d, true, coeffs)?;
    let total = f.norm(scheme);
    Ok(f.scaled(1.0 / total))
}

/// JSON coefficient record: sparse `k` as `[index, value]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffRecord {
    pub k: Vec<(u32, i64)>,
    pub re: f64,
    pub im: f64,
}

/// JSON form of a [`SpectralFunction`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub d: usize,
    pub real: bool,
    pub coeffs: Vec<CoeffRecord>,
}

impl From<&SpectralFunction> for FunctionRecord {
    fn from(f: &SpectralFunction) -> Self {
        FunctionRecord {
            d: f.d,
            real: f.real,
            coeffs: f
                .coeffs
                .iter()
                .map(|(k, c)| CoeffRecord {
                    k: k.entries.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<FunctionRecord> for SpectralFunction {
    type Error = Error;

    fn try_from(r: FunctionRecord) -> Result<Self> {
        let coeffs = r
            .coeffs
            .iter()
            .map(|c| Ok((Frequency::from_sparse(r.d, &c.k)?, Complex64::new(c.re, c.im))))
            .collect::<Result<Vec<_>>>()?;
        SpectralFunction::new(r.d, r.real, coeffs)
    }
}

impl SpectralFunction {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&FunctionRecord::from(self)).expect("function record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: FunctionRecord = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        r.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cos_k(d: usize, k: &[i64]) -> SpectralFunction {
        let k = Frequency::from_dense(k);
        assert_eq!(k.dim(), d);
        SpectralFunction::new(d, true, [(k.neg(), c(0.5)), (k, c(0.5))]).unwrap()
    }

    #[test]
    fn width_examples() {
        assert_eq!(width(&[]), 1);
        assert_eq!(width(&[3]), 1);
        assert_eq!(width(&[2, 5]), 4);
        assert_eq!(Frequency::from_dense(&[0, 2, 0, -7]).width(), 3);
        assert_eq!(Frequency::zero(4).width(), 1);
    }

    #[test]
    fn weight_examples() {
        let k = Frequency::from_dense(&[0, 2, 0, -7]);
        assert_eq!(weight(&k, WeightScheme::F2), 3.0);
        assert_eq!(weight(&k, WeightScheme::F3), 2.0);
        assert_eq!(weight(&k, WeightScheme::F1), 1.0);
        let k = Frequency::from_dense(&[3]);
        assert!((weight(&k, WeightScheme::F1) - 1.0986).abs() < 1e-4);
        for s in [WeightScheme::F1, WeightScheme::F2, WeightScheme::F3] {
            assert_eq!(weight(&Frequency::zero(5), s), 1.0);
        }
    }

    #[test]
    fn norm_examples() {
        let f = cos_k(1, &[3]);
        assert!((f.norm(WeightScheme::F1) - 3f64.ln()).abs() < 1e-15);
        assert!((f.norm(WeightScheme::F1) - 1.0986).abs() < 1e-4);
        let f = SpectralFunction::constant(3, -2.5);
        assert_eq!(f.norm(WeightScheme::F2), 2.5);
        let f = SpectralFunction::new(
            2,
            false,
            [
                (Frequency::from_dense(&[1, 0]), c(1.0)),
                (Frequency::from_dense(&[0, 1]), c(1.0)),
            ],
        )
        .unwrap();
        assert_eq!(f.norm(WeightScheme::F2), 2.0);
        let zero = SpectralFunction::new(2, true, []).unwrap();
        assert_eq!(zero.norm(WeightScheme::F1), 0.0);
    }

    #[test]
    fn evaluate_examples() {
        let one = SpectralFunction::constant(2, 1.0);
        let x = RationalPoint::new(vec![3, 5], 7).unwrap();
        assert_eq!(one.evaluate(&x).unwrap(), c(1.0));

        let f = SpectralFunction::new(
            1,
            false,
            [(Frequency::zero(1), c(1.0)), (Frequency::from_dense(&[3]), c(-1.0))],
        )
        .unwrap();
        let v = f.evaluate(&RationalPoint::new(vec![1], 6).unwrap()).unwrap();
        assert!((v - c(2.0)).norm() < 1e-15);

        let v = cos_k(1, &[1])
            .evaluate(&RationalPoint::new(vec![1], 4).unwrap())
            .unwrap();
        assert!(v.norm() < 1e-15);

        let err = one.evaluate(&RationalPoint::new(vec![1], 4).unwrap());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn integral_examples() {
        assert_eq!(SpectralFunction::constant(1, 5.0).integral(), c(5.0));
        assert_eq!(cos_k(1, &[3]).integral(), c(0.0));
        let f = SpectralFunction::new(
            2,
            true,
            [
                (Frequency::zero(2), c(0.25)),
                (Frequency::from_dense(&[1, 1]), Complex64::new(0.1, 0.2)),
                (Frequency::from_dense(&[-1, -1]), Complex64::new(0.1, -0.2)),
            ],
        )
        .unwrap();
        assert_eq!(integral(&f), c(0.25));
    }

    #[test]
    fn random_function_examples() {
        let f = random_function(1, 1, 1, 1, WeightScheme::F2).unwrap();
        assert_eq!(f.coeffs().len(), 2);
        assert!(f.coeffs().keys().all(|k| k.get(0).abs() == 1));
        assert!((f.norm(WeightScheme::F2) - 1.0).abs() < 1e-12);
        assert!(f.is_real());

        let g = random_function(1, 1, 1, 1, WeightScheme::F2).unwrap();
        assert_eq!(f, g);

        for seed in 0..50 {
            for scheme in [WeightScheme::F1, WeightScheme::F2, WeightScheme::F3] {
                let f = random_function(seed, 6, 5, 40, scheme).unwrap();
                assert!((f.norm(scheme) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_function_rejects_impossible_budget() {
        assert!(random_function(0, 1, 2, 1, WeightScheme::F1).is_err());
        assert!(random_function(0, 1, 0, 1, WeightScheme::F1).is_err());
        assert!(random_function(0, 2, 12, 1, WeightScheme::F1).is_err());
        assert!(random_function(0, 2, 4, 1, WeightScheme::F1).is_ok());
    }

    #[test]
    fn hermitian_check_on_real_functions() {
        let k = Frequency::from_dense(&[2]);
        let bad = SpectralFunction::new(
            1,
            true,
            [
                (k.clone(), Complex64::new(0.0, 1.0)),
                (k.neg(), Complex64::new(0.0, 1.0)),
            ],
        );
        assert!(bad.is_err());
        let bad = SpectralFunction::new(1, true, [(Frequency::zero(1), Complex64::new(0.0, 1.0))]);
        assert!(bad.is_err());
    }

    #[test]
    fn sparse_frequency_validation() {
        assert!(Frequency::from_sparse(3, &[(0, 1), (0, 2)]).is_err());
        assert!(Frequency::from_sparse(3, &[(3, 1)]).is_err());
        let k = Frequency::from_sparse(3, &[(2, -1), (0, 4), (1, 0)]).unwrap();
        assert_eq!(k.to_dense(), vec![4, 0, -1]);
        assert_eq!(k.reversed().to_dense(), vec![-1, 0, 4]);
        assert_eq!(k.permuted(&[1, 2, 0]).to_dense(), vec![-1, 4, 0]);
    }

    #[test]
    fn json_round_trip() {
        let f = random_function(9, 3, 4, 10, WeightScheme::F2).unwrap();
        let g = SpectralFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn float_and_exact_evaluation_agree() {
        let f = random_function(3, 2, 6, 30, WeightScheme::F1).unwrap();
        let x = RationalPoint::new(vec![17, 123], 169).unwrap();
        let a = f.evaluate(&x).unwrap();
        let b = f.evaluate_f64(&x.to_f64()).unwrap();
        assert!((a - b).norm() < 1e-12);
        assert!(a.im.abs() < 1e-14);
    }
}
