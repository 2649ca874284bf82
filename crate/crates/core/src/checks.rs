//! Verification sweeps over the bounds the library relies on.
//!
//! Each sweep returns a [`CheckSummary`]; a non-zero violation count means a
//! stated inequality failed on a concrete input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adversary::{build_index_set, fooling_certificate, max_shifted_weight_sum, verify_certificate};
use crate::error::Result;
use crate::exec::{map_indexed, Execution};
use crate::expsum::{decomposition_check_on, expsum_single_with, expsum_union_with, root_count, BoundReport};
use crate::fourier::{random_function, Frequency, WeightScheme};
use crate::integrator::{exact_error_with, qmc_apply_spectral_with, LinearAlgorithm, Node};
use crate::korobov::{union_set, KorobovSet, RationalPoint, SetKind};
use crate::prime_window::{window_counts, DensityConstants};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub cases: usize,
    pub violations: usize,
    /// Smallest `rhs − lhs` seen.
    pub min_slack: f64,
    pub worst_case: String,
}

impl CheckSummary {
    fn new(name: &str) -> Self {
        CheckSummary {
            name: name.into(),
            cases: 0,
            violations: 0,
            min_slack: f64::INFINITY,
            worst_case: String::new(),
        }
    }

    fn record(&mut self, report: &BoundReport, case: impl FnOnce() -> String) {
        self.cases += 1;
        if !report.satisfied {
            self.violations += 1;
        }
        if report.slack < self.min_slack || report.slack.is_nan() {
            self.min_slack = report.slack;
            self.worst_case = case();
        }
    }

    fn absorb(&mut self, other: CheckSummary) {
        self.cases += other.cases;
        self.violations += other.violations;
        if other.min_slack < self.min_slack {
            self.min_slack = other.min_slack;
            self.worst_case = other.worst_case;
        }
    }

    pub fn passed(&self) -> bool {
        self.cases > 0 && self.violations == 0
    }
}

/// Every non-zero `k ∈ {−r,…,r}^d`, in lexicographic order.
pub fn frequency_grid(d: usize, r: i64) -> Vec<Frequency> {
    let side = (2 * r + 1) as usize;
    let total = side.pow(d as u32);
    (0..total)
        .map(|mut code| {
            let dense: Vec<i64> = (0..d)
                .map(|_| {
                    let v = (code % side) as i64 - r;
                    code /= side;
                    v
                })
                .collect();
            Frequency::from_dense(&dense)
        })
        .filter(|k| !k.is_zero())
        .collect()
}

/// Runs `per_k` over the grid for each `(d, p)` with `p > d`, in parallel over `k`.
fn grid_sweep<F>(name: &str, dims: &[usize], primes: &[u64], r: i64, exec: Execution, per_k: F) -> Result<CheckSummary>
where
    F: Fn(&Frequency, &KorobovSet, &KorobovSet, &mut CheckSummary) -> Result<()> + Sync + Send,
{
    let mut summary = CheckSummary::new(name);
    for &d in dims {
        let grid = frequency_grid(d, r);
        for &p in primes.iter().filter(|&&p| p > d as u64) {
            let s = KorobovSet::new(SetKind::S, p, d)?;
            let t = KorobovSet::new(SetKind::T, p, d)?;
            let parts = map_indexed(exec, grid.len(), |i| {
                let mut part = CheckSummary::new(name);
                per_k(&grid[i], &s, &t, &mut part).map(|_| part)
            });
            for part in parts {
                summary.absorb(part?);
            }
        }
    }
    Ok(summary)
}

/// `|S-sum|, |T-sum| ≤ width(supp k)/p` for every grid `k` with `p ∤ k`.
pub fn lemma_grid(dims: &[usize], primes: &[u64], r: i64, exec: Execution) -> Result<CheckSummary> {
    grid_sweep("lemma_bound", dims, primes, r, exec, |k, s, t, out| {
        let p = s.p();
        if k.divisible_by(p) {
            return Ok(());
        }
        let bound = k.width() as f64 / p as f64;
        for set in [s, t] {
            let v = expsum_single_with(k, set, Execution::Sequential)?.value.norm();
            out.record(&BoundReport::new(v, bound), || {
                format!("{} p={p} k={k} |sum|={v:e} bound={bound:e}", set.kind())
            });
        }
        Ok(())
    })
}

/// S-sum equals its root-reduced form within the decomposition tolerance.
pub fn decomposition_grid(dims: &[usize], primes: &[u64], r: i64, exec: Execution) -> Result<CheckSummary> {
    grid_sweep("decomposition", dims, primes, r, exec, |k, s, _t, out| {
        if k.divisible_by(s.p()) {
            return Ok(());
        }
        let rep = decomposition_check_on(k, s)?;
        out.record(&rep, || format!("p={} k={k} diff={:e}", s.p(), rep.lhs));
        Ok(())
    })
}

/// Congruence root count at most `width(supp k)`.
pub fn root_count_grid(dims: &[usize], primes: &[u64], r: i64, exec: Execution) -> Result<CheckSummary> {
    grid_sweep("root_count", dims, primes, r, exec, |k, s, _t, out| {
        if k.divisible_by(s.p()) {
            return Ok(());
        }
        let roots = root_count(k, s.p())? as f64;
        out.record(&BoundReport::new(roots, k.width() as f64), || {
            format!("p={} k={k} roots={roots}", s.p())
        });
        Ok(())
    })
}

/// Union sums against the union bound for `samples` random `k` per `m`.
pub fn corollary_sample(
    ms: &[u64],
    d_max: usize,
    samples: usize,
    max_entry: i64,
    seed: u64,
    consts: &DensityConstants,
    exec: Execution,
) -> Result<CheckSummary> {
    let mut summary = CheckSummary::new("corollary_bound");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &m in ms {
        let mut unions = Vec::new();
        for d in 1..=d_max {
            let window = crate::prime_window::enumerate_window(m)?;
            if window.min_prime() > d as u64 {
                unions.push((union_set(SetKind::S, m, d)?, union_set(SetKind::T, m, d)?));
            }
        }
        if unions.is_empty() {
            continue;
        }
        let draws: Vec<(usize, Frequency)> = (0..samples)
            .map(|_| {
                let which = rng.random_range(0..unions.len());
                let d = unions[which].0.dim();
                loop {
                    let dense: Vec<i64> = (0..d).map(|_| rng.random_range(-max_entry..=max_entry)).collect();
                    let k = Frequency::from_dense(&dense);
                    if !k.is_zero() {
                        break (which, k);
                    }
                }
            })
            .collect();
        let parts = map_indexed(exec, draws.len(), |i| -> Result<CheckSummary> {
            let (which, k) = &draws[i];
            let mut part = CheckSummary::new("corollary_bound");
            let bound = crate::expsum::corollary_bound(k, m, consts)?;
            let (s, t) = &unions[*which];
            for u in [s, t] {
                let v = expsum_union_with(k, u, Execution::Sequential)?.value.norm();
                part.record(&BoundReport::new(v, bound), || {
                    format!("{} m={m} k={k} |sum|={v:e} bound={bound:e}", u.kind().union_name())
                });
            }
            Ok(part)
        });
        for part in parts {
            summary.absorb(part?);
        }
    }
    Ok(summary)
}

/// Both density inequalities for every `2 ≤ m ≤ m_max`.
pub fn density_sweep(consts: &DensityConstants, m_max: u64) -> CheckSummary {
    let mut summary = CheckSummary::new("prime_density");
    let counts = window_counts(m_max);
    for m in 2..=m_max {
        let count = counts[m as usize] as f64;
        let scale = m as f64 / (m as f64).ln();
        let lower = BoundReport::new(consts.lower * scale, count);
        let upper = BoundReport::new(count, consts.upper * scale);
        summary.record(&lower, || format!("m={m} lower: {} > {count}", consts.lower * scale));
        summary.record(&upper, || format!("m={m} upper: {count} > {}", consts.upper * scale));
    }
    summary
}

/// `max_{ℓ∈A} Σ_{k∈A} max(1, min log|k_j − ℓ_j|) ≤ 2n²/d` for `2d < n ≤ n_max`.
pub fn counting_chain(d_max: usize, n_max: usize) -> Result<CheckSummary> {
    let mut summary = CheckSummary::new("counting_chain");
    for d in 1..=d_max {
        for n in (2 * d + 1)..=n_max {
            let a = build_index_set(n, d)?;
            let lhs = max_shifted_weight_sum(&a);
            let rhs = 2.0 * (n * n) as f64 / d as f64;
            summary.record(&BoundReport::new(lhs, rhs), || {
                format!("d={d} n={n} sum={lhs} cap={rhs}")
            });
        }
    }
    Ok(summary)
}

/// Error certificate and error identity on random F2-normalized functions.
pub struct SoundnessReport {
    pub bound: CheckSummary,
    pub identity: CheckSummary,
}

#[allow(clippy::too_many_arguments)]
pub fn certificate_soundness(
    seed: u64,
    functions: usize,
    d_max: usize,
    ms: &[u64],
    max_abs_freq: u64,
    consts: &DensityConstants,
    identity_tol: f64,
    exec: Execution,
) -> Result<SoundnessReport> {
    let mut bound = CheckSummary::new("certificate_soundness");
    let mut identity = CheckSummary::new("error_identity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<(u64, usize, usize)> = (0..functions)
        .map(|_| {
            (
                rng.random::<u64>(),
                rng.random_range(1..=d_max),
                rng.random_range(1..=6),
            )
        })
        .collect();
    for &m in ms {
        for kind in [SetKind::S, SetKind::T] {
            let mut unions = Vec::new();
            for d in 1..=d_max {
                unions.push(union_set(kind, m, d)?);
            }
            for &(fseed, d, budget) in &specs {
                let cert = crate::integrator::wc_bound(m, consts, d)?;
                let f = random_function(fseed, d, budget, max_abs_freq, WeightScheme::F2)?;
                let u = &unions[d - 1];
                let exact = exact_error_with(&f, u, exec)?;
                let sampled = (f.integral() - qmc_apply_spectral_with(&f, u, exec)?).norm();
                let rhs = cert.error_bound(f.norm(WeightScheme::F2));
                let case = || format!("{} m={m} d={d} seed={fseed}", kind.union_name());
                bound.record(&BoundReport::new(exact, rhs), || {
                    format!("{} error={exact:e} bound={rhs:e}", case())
                });
                let diff = (exact - sampled).abs();
                identity.record(&BoundReport::new(diff, identity_tol), || {
                    format!("{} diff={diff:e}", case())
                });
            }
        }
    }
    Ok(SoundnessReport { bound, identity })
}

/// Random rational node sets with `denominator` grid resolution.
pub fn random_nodes(rng: &mut impl Rng, n: usize, d: usize, denominator: u64) -> Vec<Node> {
    (0..n)
        .map(|_| {
            let nums = (0..d).map(|_| rng.random_range(0..denominator)).collect();
            Node::Rational(RationalPoint::new(nums, denominator).expect("numerators below denominator"))
        })
        .collect()
}

/// Builds and re-verifies fooling certificates on random node sets.
pub fn fooling_sweep(dims: &[usize], sets_per_case: usize, seed: u64) -> Result<CheckSummary> {
    let mut summary = CheckSummary::new("fooling_certificate");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &d in dims {
        for n in [2 * d + 1, 4 * d, 8 * d] {
            for rep in 0..sets_per_case {
                let nodes = random_nodes(&mut rng, n, d, 1_000_003);
                let alg = LinearAlgorithm::qmc(nodes)?;
                let cert = fooling_certificate(&alg, d)?;
                let report = verify_certificate(&cert, &alg)?;
                for check in &report.checks {
                    summary.record(&check.report, || format!("d={d} n={n} set={rep} check={}", check.name));
                }
            }
        }
    }
    Ok(summary)
}
