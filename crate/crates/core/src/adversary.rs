//! Fooling functions witnessing the `d/(2n²)` lower bound in F1.
//!
//! Given the nodes of any linear algorithm, take the index set
//! `A = {0} ∪ {k·e_j : 1 ≤ j ≤ d, 1 ≤ k ≤ ⌈n/d⌉}` (more than `n` elements)
//! and a non-zero `c` with `Σ_{k∈A} c_k·exp(2πi k·x_h) = 0` at every node.
//! After scaling so the largest coefficient is `c_ℓ = 1`, the real function
//!
//! `g★(x) = Re(C·Σ_{k∈A} c_k·exp(2πi (k−ℓ)·x))`
//!
//! vanishes at the nodes, has F1 norm at most 1 and integral `C`, where
//! `1/C = max_{ℓ'∈A} Σ_{k∈A} max(1, min_j log|k_j − ℓ'_j|)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};
use crate::expsum::BoundReport;
use crate::fourier::{CoeffRecord, Frequency, FunctionRecord, SpectralFunction, WeightScheme};
use crate::integrator::{LinearAlgorithm, Node};

/// Relative pivot threshold in the elimination.
pub const PIVOT_TOL: f64 = 1e-12;

/// Largest admissible `|g★(x_h)|`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Slack on `‖g★‖_{F1} ≤ 1`.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct FoolingIndexSet {
    d: usize,
    frequencies: Vec<Frequency>,
}

impl FoolingIndexSet {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn frequencies(&self) -> &[Frequency] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

/// Zero first, then `k·e_j` for `j` ascending and `k = 1..=⌈n/d⌉`.
pub fn build_index_set(n: usize, d: usize) -> Result<FoolingIndexSet> {
    if n == 0 || d == 0 {
        return domain("index set needs n >= 1 and d >= 1");
    }
    let top = n.div_ceil(d) as i64;
    let mut frequencies = vec![Frequency::zero(d)];
    for j in 0..d {
        frequencies.extend((1..=top).map(|k| Frequency::axis(d, j, k)));
    }
    Ok(FoolingIndexSet { d, frequencies })
}

/// `Σ_{k∈A} max(1, min_j log|k_j − ℓ_j|)`, the F1 weights of `A − ℓ`.
pub fn shifted_weight_sum(set: &FoolingIndexSet, pivot: &Frequency) -> f64 {
    let mut s = crate::exec::KahanSum::new();
    for k in &set.frequencies {
        s.add(k.sub(pivot).weight(WeightScheme::F1));
    }
    s.value()
}

/// `max_{ℓ∈A}` of [`shifted_weight_sum`].
pub fn max_shifted_weight_sum(set: &FoolingIndexSet) -> f64 {
    set.frequencies
        .iter()
        .map(|l| shifted_weight_sum(set, l))
        .fold(0.0, f64::max)
}

/// A non-zero solution of `Σ_i c_i·exp(2πi k_i·x_h) = 0` for every node.
///
/// Reduces the `n × |A|` phase matrix to row echelon form with scaled
/// partial pivoting; the first free column is set to one and every other
/// free column to zero.
pub fn nullspace_vector(nodes: &[Node], set: &FoolingIndexSet) -> Result<Vec<Complex64>> {
    let cols = set.len();
    if cols <= nodes.len() {
        return domain(format!(
            "index set of size {cols} does not exceed {} nodes",
            nodes.len()
        ));
    }
    for x in nodes {
        check_dim(set.d, x.dim())?;
        if x.to_f64().iter().any(|v| !v.is_finite()) {
            return domain("non-finite node coordinate");
        }
    }
    let mut a: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|x| set.frequencies.iter().map(|k| x.character(k)).collect())
        .collect();
    let scale: Vec<f64> = a
        .iter()
        .map(|r| r.iter().map(|z| z.norm()).fold(0.0, f64::max))
        .collect();
    let mut scale = scale;

    let rows = a.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, ratio) = (r..rows)
            .map(|i| (i, if scale[i] > 0.0 { a[i][c].norm() / scale[i] } else { 0.0 }))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if ratio <= PIVOT_TOL {
            continue;
        }
        a.swap(r, best);
        scale.swap(r, best);
        let inv = a[r][c].inv();
        for v in a[r].iter_mut() {
            *v *= inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != Complex64::new(0.0, 0.0) {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }

    let free = (0..cols)
        .find(|c| !pivot_cols.contains(c))
        .ok_or_else(|| Error::Domain("no free column".into()))?;
    let mut x = vec![Complex64::new(0.0, 0.0); cols];
    x[free] = Complex64::new(1.0, 0.0);
    for (i, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = -a[i][free];
    }
    Ok(x)
}

/// Maximum of `|Σ_i c_i·exp(2πi k_i·x_h)|` over the nodes.
pub fn nullspace_residual(nodes: &[Node], set: &FoolingIndexSet, c: &[Complex64]) -> f64 {
    nodes
        .iter()
        .map(|x| {
            let mut s = crate::exec::ComplexSum::new();
            for (k, ci) in set.frequencies.iter().zip(c) {
                s.add(ci * x.character(k));
            }
            s.value().norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoolingCertificate {
    /// Number of algorithm nodes.
    pub n: usize,
    pub index_set: FoolingIndexSet,
    /// Normalized coefficients over the index set, `coeffs[pivot] = 1`.
    pub coeffs: Vec<Complex64>,
    pub pivot_index: usize,
    pub pivot: Frequency,
    /// The normalizing constant, equal to `I(g★)`.
    pub c: f64,
    pub g_star: SpectralFunction,
    pub residual_max: f64,
    /// `Q(g★)` for the algorithm the certificate was built from.
    pub algorithm_output: f64,
    pub norm_f1: f64,
    pub integral: f64,
    /// `d/(2n²)`.
    pub lower_bound: f64,
    /// `n > 2d`, under which `C ≥ d/(2n²)` is guaranteed.
    pub guaranteed_bound: bool,
}

/// `g★` from normalized coefficients, pivot and constant.
pub fn build_g_star(
    set: &FoolingIndexSet,
    coeffs: &[Complex64],
    pivot: &Frequency,
    c: f64,
) -> Result<SpectralFunction> {
    let mut terms = Vec::with_capacity(2 * coeffs.len());
    for (k, ck) in set.frequencies.iter().zip(coeffs) {
        let q = k.sub(pivot);
        let half = ck * (c / 2.0);
        // q before -q keeps merged pairs bitwise conjugate
        let mirror = q.neg();
        terms.push((q, half));
        terms.push((mirror, half.conj()));
    }
    SpectralFunction::new(set.d, true, terms)
}

/// Index of the largest-modulus entry; ties go to the lowest index.
fn pivot_position(c: &[Complex64]) -> usize {
    let mut best = 0;
    for (i, z) in c.iter().enumerate() {
        if z.norm() > c[best].norm() {
            best = i;
        }
    }
    best
}

pub fn fooling_certificate(alg: &LinearAlgorithm, d: usize) -> Result<FoolingCertificate> {
    check_dim(d, alg.dim())?;
    let n = alg.len();
    let set = build_index_set(n, d)?;
    let raw = nullspace_vector(alg.nodes(), &set)?;
    let pivot_index = pivot_position(&raw);
    let cl = raw[pivot_index];
    let mut coeffs: Vec<Complex64> = raw.iter().map(|z| z / cl).collect();
    coeffs[pivot_index] = Complex64::new(1.0, 0.0);
    let pivot = set.frequencies[pivot_index].clone();

    let c = 1.0 / max_shifted_weight_sum(&set);
    let g_star = build_g_star(&set, &coeffs, &pivot, c)?;

    let mut residual_max = 0.0f64;
    let mut q = crate::exec::KahanSum::new();
    for (x, w) in alg.nodes().iter().zip(alg.weights()) {
        let v = x.evaluate(&g_star)?.re;
        residual_max = residual_max.max(v.abs());
        q.add(w * v);
    }
    let norm_f1 = g_star.norm(WeightScheme::F1);
    let integral = g_star.integral().re;
    Ok(FoolingCertificate {
        n,
        index_set: set,
        coeffs,
        pivot_index,
        pivot,
        c,
        g_star,
        residual_max,
        algorithm_output: q.value(),
        norm_f1,
        integral,
        lower_bound: d as f64 / (2.0 * (n * n) as f64),
        guaranteed_bound: n > 2 * d,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    #[serde(flatten)]
    pub report: BoundReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub passed: bool,
    pub checks: Vec<NamedCheck>,
}

impl CertificateReport {
    pub fn failures(&self) -> impl Iterator<Item = &NamedCheck> {
        self.checks.iter().filter(|c| !c.report.satisfied)
    }
}

/// Re-derives `g★` from the certificate's coefficients and re-checks every
/// claim against `alg`.
pub fn verify_certificate(cert: &FoolingCertificate, alg: &LinearAlgorithm) -> Result<CertificateReport> {
    let d = cert.index_set.d;
    check_dim(d, alg.dim())?;
    let n = alg.len();
    let mut checks = Vec::new();
    let mut push = |name: &str, report: BoundReport| {
        checks.push(NamedCheck {
            name: name.into(),
            report,
        })
    };

    let expected_set = build_index_set(n, d)?;
    let same_set = expected_set == cert.index_set && cert.coeffs.len() == expected_set.len();
    push("index_set", BoundReport::new(if same_set { 0.0 } else { 1.0 }, 0.0));
    if !same_set {
        return Ok(CertificateReport { passed: false, checks });
    }

    let pivot_ok = cert.index_set.frequencies.get(cert.pivot_index) == Some(&cert.pivot);
    let pivot_dev = if pivot_ok {
        (cert.coeffs[cert.pivot_index] - Complex64::new(1.0, 0.0)).norm()
    } else {
        f64::INFINITY
    };
    push("pivot_coefficient", BoundReport::new(pivot_dev, 0.0));
    let max_mod = cert.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    push("max_coefficient", BoundReport::new(max_mod, 1.0));

    let c = 1.0 / max_shifted_weight_sum(&cert.index_set);
    push("normalizing_constant", BoundReport::new((c - cert.c).abs(), 0.0));

    let rebuilt = build_g_star(&cert.index_set, &cert.coeffs, &cert.pivot, cert.c)?;
    let mut diff = 0.0f64;
    for (k, v) in rebuilt.coeffs() {
        diff = diff.max((v - cert.g_star.coeff(k)).norm());
    }
    for (k, v) in cert.g_star.coeffs() {
        diff = diff.max((v - rebuilt.coeff(k)).norm());
    }
    push("g_star_matches_coefficients", BoundReport::new(diff, 0.0));

    let mut residual = 0.0f64;
    let mut q = crate::exec::KahanSum::new();
    let mut imag = 0.0f64;
    for (x, w) in alg.nodes().iter().zip(alg.weights()) {
        let v = x.evaluate(&rebuilt)?;
        residual = residual.max(v.re.abs());
        imag = imag.max(v.im.abs());
        q.add(w * v.re);
    }
    push("residual", BoundReport::new(residual, RESIDUAL_TOL));
    push("imaginary_part", BoundReport::new(imag, 1e-12));
    push("algorithm_output", BoundReport::new(q.value().abs(), RESIDUAL_TOL));
    push(
        "norm_f1",
        BoundReport::new(rebuilt.norm(WeightScheme::F1), 1.0 + NORM_TOL),
    );
    push(
        "integral",
        BoundReport::new((rebuilt.integral().re - cert.c).abs(), 0.0),
    );
    if n > 2 * d {
        push(
            "lower_bound",
            BoundReport::new(d as f64 / (2.0 * (n * n) as f64), cert.c),
        );
    }
    let passed = checks.iter().all(|c| c.report.satisfied);
    Ok(CertificateReport { passed, checks })
}

/// JSON form of a [`FoolingCertificate`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub d: usize,
    pub n: usize,
    pub coeffs: Vec<CoeffRecord>,
    pub pivot: Vec<(u32, i64)>,
    #[serde(rename = "C")]
    pub c: f64,
    pub residual_max: f64,
    pub algorithm_output: f64,
    pub norm_f1: f64,
    pub integral: f64,
    pub lower_bound: f64,
    pub guaranteed_bound: bool,
    pub g_star: FunctionRecord,
}

impl FoolingCertificate {
    pub fn to_record(&self) -> CertificateRecord {
        CertificateRecord {
            d: self.index_set.d,
            n: self.n,
            coeffs: self
                .index_set
                .frequencies
                .iter()
                .zip(&self.coeffs)
                .map(|(k, c)| CoeffRecord {
                    k: k.entries().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
            pivot: self.pivot.entries().to_vec(),
            c: self.c,
            residual_max: self.residual_max,
            algorithm_output: self.algorithm_output,
            norm_f1: self.norm_f1,
            integral: self.integral,
            lower_bound: self.lower_bound,
            guaranteed_bound: self.guaranteed_bound,
            g_star: FunctionRecord::from(&self.g_star),
        }
    }

    pub fn from_record(r: CertificateRecord) -> Result<Self> {
        let index_set = build_index_set(r.n, r.d)?;
        if r.coeffs.len() != index_set.len() {
            return domain(format!(
                "certificate lists {} coefficients, index set has {}",
                r.coeffs.len(),
                index_set.len()
            ));
        }
        let mut coeffs = Vec::with_capacity(r.coeffs.len());
        for (rec, k) in r.coeffs.iter().zip(&index_set.frequencies) {
            if &Frequency::from_sparse(r.d, &rec.k)? != k {
                return domain("certificate coefficients are not in index-set order");
            }
            coeffs.push(Complex64::new(rec.re, rec.im));
        }
        let pivot = Frequency::from_sparse(r.d, &r.pivot)?;
        let pivot_index = index_set
            .frequencies
            .iter()
            .position(|k| *k == pivot)
            .ok_or_else(|| Error::Domain("pivot is not in the index set".into()))?;
        Ok(FoolingCertificate {
            n: r.n,
            index_set,
            coeffs,
            pivot_index,
            pivot,
            c: r.c,
            g_star: r.g_star.try_into()?,
            residual_max: r.residual_max,
            algorithm_output: r.algorithm_output,
            norm_f1: r.norm_f1,
            integral: r.integral,
            lower_bound: r.lower_bound,
            guaranteed_bound: r.guaranteed_bound,
        })
    }
}
