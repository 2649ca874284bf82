//! Equal-weight rules over union point sets and the worst-case error
//! certificate.
//!
//! For `f` with absolutely convergent Fourier series,
//! `I(f) − Q(f) = −Σ_{k≠0} f̂(k)·S(k)` where `S(k)` is the normalized union
//! sum. Combining the union bound on `|S(k)|` with the F2 weights gives
//! `|I(f) − Q(f)| ≤ 16/(c_P·m)·‖f‖_{F2}` whenever every window prime exceeds
//! `d`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};
use crate::exec::{chunked_real_sum, chunked_sum, map_indexed, ComplexSum, Execution, KahanSum};
use crate::expsum::expsum_union_with;
use crate::fourier::{Frequency, SpectralFunction};
use crate::korobov::{KorobovSet, RationalPoint, UnionPointSet};
use crate::prime_window::{enumerate_window, smallest_admissible_m, DensityConstants};

/// A quadrature node, exact or floating point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Rational(RationalPoint),
    Real(Vec<f64>),
}

impl Node {
    pub fn dim(&self) -> usize {
        match self {
            Node::Rational(x) => x.dim(),
            Node::Real(x) => x.len(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Node::Rational(x) => x.to_f64(),
            Node::Real(x) => x.clone(),
        }
    }

    /// `exp(2πi k·x)`, exact-phase for rational nodes.
    pub fn character(&self, k: &Frequency) -> Complex64 {
        match self {
            Node::Rational(x) => {
                let r = crate::korobov::phase_residue(x.numerators(), x.denominator(), k);
                crate::arith::unit_root(r, x.denominator())
            }
            Node::Real(x) => {
                let t: f64 = k.entries().iter().map(|&(j, v)| v as f64 * x[j as usize]).sum();
                let (s, c) = (std::f64::consts::TAU * (t - t.floor())).sin_cos();
                Complex64::new(c, s)
            }
        }
    }

    pub fn evaluate(&self, f: &SpectralFunction) -> Result<Complex64> {
        match self {
            Node::Rational(x) => f.evaluate(x),
            Node::Real(x) => f.evaluate_f64(x),
        }
    }
}

/// `Q(f) = Σ_h w_h·f(x_h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearAlgorithm {
    nodes: Vec<Node>,
    weights: Vec<f64>,
}

impl LinearAlgorithm {
    pub fn new(nodes: Vec<Node>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return domain("a linear algorithm needs at least one node");
        }
        if nodes.len() != weights.len() {
            return domain(format!("{} nodes but {} weights", nodes.len(), weights.len()));
        }
        let d = nodes[0].dim();
        for x in &nodes {
            check_dim(d, x.dim())?;
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return domain(format!("non-finite weight {w}"));
        }
        Ok(Self { nodes, weights })
    }

    /// Equal weights `1/n`.
    pub fn qmc(nodes: Vec<Node>) -> Result<Self> {
        let n = nodes.len();
        Self::new(nodes, vec![1.0 / n as f64; n])
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.nodes[0].dim()
    }

    pub fn apply(&self, f: &SpectralFunction) -> Result<Complex64> {
        let mut s = ComplexSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s.add(x.evaluate(f)? * *w);
        }
        Ok(s.value())
    }
}

/// Unnormalized `Σ_x f(x)` over one set, phases reduced exactly.
fn spectral_set_sum(f: &SpectralFunction, set: &KorobovSet, exec: Execution) -> ComplexSum {
    let roots = set.roots();
    let coeffs: Vec<(&Frequency, &Complex64)> = f.coeffs().iter().collect();
    let q = set.denominator();
    chunked_sum(exec, set.len() as usize, |range| {
        let mut s = ComplexSum::new();
        let mut row = vec![0u64; set.dim()];
        for i in range {
            set.numerators_into(i as u64, &mut row);
            let mut v = ComplexSum::new();
            for &(k, c) in &coeffs {
                v.add(c * roots.get(crate::korobov::phase_residue(&row, q, k)));
            }
            s.add(v.value());
        }
        s
    })
}

/// `(1/n)·Σ f(x)` for a spectral integrand.
pub fn qmc_apply_spectral(f: &SpectralFunction, uset: &UnionPointSet) -> Result<Complex64> {
    qmc_apply_spectral_with(f, uset, Execution::default())
}

pub fn qmc_apply_spectral_with(f: &SpectralFunction, uset: &UnionPointSet, exec: Execution) -> Result<Complex64> {
    check_dim(uset.dim(), f.dim())?;
    let sets = uset.sets();
    let parts = map_indexed(exec, sets.len(), |i| spectral_set_sum(f, &sets[i], exec));
    let mut total = ComplexSum::new();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.value() / uset.len() as f64)
}

/// `(1/n)·Σ f(x)` for a black-box integrand on float coordinates.
pub fn qmc_apply<F>(f: F, uset: &UnionPointSet) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    qmc_apply_with(f, uset, Execution::default())
}

pub fn qmc_apply_with<F>(f: F, uset: &UnionPointSet, exec: Execution) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let mut total = KahanSum::new();
    let mut offset = 0usize;
    for set in uset.sets() {
        let q = set.denominator() as f64;
        let base = offset;
        let part = chunked_real_sum(exec, set.len() as usize, |range| {
            let mut s = KahanSum::new();
            let mut row = vec![0u64; set.dim()];
            let mut x = vec![0f64; set.dim()];
            for i in range {
                set.numerators_into(i as u64, &mut row);
                for (xj, &a) in x.iter_mut().zip(&row) {
                    *xj = a as f64 / q;
                }
                let v = f(&x);
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        index: base + i,
                        value: v,
                    });
                }
                s.add(v);
            }
            Ok(s)
        })?;
        total.add(part);
        offset += set.len() as usize;
    }
    Ok(total.value() / uset.len() as f64)
}

/// `|Σ_{k≠0} f̂(k)·S(k)|` from the union exponential sums.
pub fn exact_error(f: &SpectralFunction, uset: &UnionPointSet) -> Result<f64> {
    exact_error_with(f, uset, Execution::default())
}

pub fn exact_error_with(f: &SpectralFunction, uset: &UnionPointSet, exec: Execution) -> Result<f64> {
    check_dim(uset.dim(), f.dim())?;
    let mut s = ComplexSum::new();
    for (k, c) in f.coeffs() {
        if !k.is_zero() {
            s.add(c * expsum_union_with(k, uset, exec)?.value);
        }
    }
    Ok(s.value().norm())
}

/// `|I(f) − Q(f)|` by sampling.
pub fn sampling_error(f: &SpectralFunction, uset: &UnionPointSet) -> Result<f64> {
    Ok((f.integral() - qmc_apply_spectral(f, uset)?).norm())
}

/// Worst-case error bound `16/(c_P·m)` over the F2 unit ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCertificate {
    pub m: u64,
    pub c_p: f64,
    pub bound: f64,
    /// Largest dimension covered: least window prime minus one.
    pub d_max: u64,
    /// `Σ p²` over the window.
    pub n: u64,
}

impl ErrorCertificate {
    pub fn covers(&self, d: usize) -> bool {
        d as u64 <= self.d_max
    }

    /// The guaranteed error bound for a function of the given F2 norm.
    pub fn error_bound(&self, norm_f2: f64) -> f64 {
        self.bound * norm_f2
    }
}

pub fn wc_bound(m: u64, consts: &DensityConstants, d: usize) -> Result<ErrorCertificate> {
    consts.validate()?;
    let window = enumerate_window(m)?;
    let d_max = window.min_prime() - 1;
    if d as u64 > d_max {
        return Err(Error::Precondition(format!(
            "least window prime {} for m={m} does not exceed d={d}; smallest admissible m is {}",
            window.min_prime(),
            smallest_admissible_m(d as u64)
        )));
    }
    Ok(ErrorCertificate {
        m,
        c_p: consts.lower,
        bound: 16.0 / (consts.lower * m as f64),
        d_max,
        n: window.total_points(),
    })
}

/// Window size and point budget for a target worst-case error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub m: u64,
    pub n: u64,
    pub bound: f64,
    /// Whether `m` was raised to clear the dimension.
    pub dimension_bound: bool,
}

/// Smallest `m` with `16/(c_P·m) ≤ eps`, raised if needed so that every
/// window prime exceeds `d`.
pub fn plan(eps: f64, d: usize, consts: &DensityConstants) -> Result<Plan> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("eps must lie in (0,1), got {eps}"));
    }
    consts.validate()?;
    let c = consts.lower;
    let mut m_eps = (16.0 / (c * eps)).ceil() as u64;
    while m_eps > 2 && 16.0 / (c * (m_eps - 1) as f64) <= eps {
        m_eps -= 1;
    }
    while 16.0 / (c * m_eps as f64) > eps {
        m_eps += 1;
    }
    let m_dim = smallest_admissible_m(d as u64);
    let m = m_eps.max(m_dim).max(2);
    let window = enumerate_window(m)?;
    Ok(Plan {
        m,
        n: window.total_points(),
        bound: 16.0 / (c * m as f64),
        dimension_bound: m_dim > m_eps,
    })
}
