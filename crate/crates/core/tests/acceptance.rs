//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p korobov-qmc --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use korobov_qmc::adversary::{fooling_certificate, verify_certificate};
use korobov_qmc::checks::{
    certificate_soundness, corollary_sample, counting_chain, decomposition_grid, density_sweep, fooling_sweep,
    frequency_grid, lemma_grid, CheckSummary,
};
use korobov_qmc::expsum::{divisor_count, divisor_count_bound, expsum_single};
use korobov_qmc::fourier::{random_function, weight, Frequency, WeightScheme};
use korobov_qmc::integrator::{plan, LinearAlgorithm, Node};
use korobov_qmc::oracles::{oracle_expsum, OracleReport};
use korobov_qmc::prime_window::{calibrate_constants, enumerate_window, DensityConstants};
use korobov_qmc::{Execution, KorobovSet, RationalPoint, SetKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEMMA_PRIMES: [u64; 8] = [7, 11, 13, 17, 19, 23, 29, 31];
const SEED: u64 = 20_240_611;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_summaries(summaries: &[CheckSummary]) -> Outcome {
    let passed = summaries.iter().all(CheckSummary::passed);
    let detail = summaries
        .iter()
        .map(|s| {
            format!(
                "{}: {} cases, {} violations, min slack {:.3e} ({})",
                s.name, s.cases, s.violations, s.min_slack, s.worst_case
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { passed, detail }
}

fn lemma_exhaustive() -> Outcome {
    let exec = Execution::default();
    let dims = [1, 2, 3, 4, 5];
    let main = lemma_grid(&dims, &LEMMA_PRIMES, 3, exec).expect("lemma sweep");
    // independent float-phase re-summation on the d ≤ 2 part of the grid
    let mut oracle = OracleReport::new("expsum vs oracle");
    for d in 1..=2 {
        for &p in &LEMMA_PRIMES {
            for kind in [SetKind::S, SetKind::T] {
                let set = KorobovSet::new(kind, p, d).unwrap();
                for k in frequency_grid(d, 3) {
                    let a = expsum_single(&k, &set).unwrap().value;
                    let b = oracle_expsum(&k, &set);
                    oracle.record((a - b).norm(), || format!("{kind} p={p} k={k}"));
                }
            }
        }
    }
    let mut out = from_summaries(&[main]);
    out.passed &= oracle.max_abs_diff <= 1e-9;
    out.detail += &format!(
        "; oracle: {} cases, max diff {:.2e} ({})",
        oracle.cases_run, oracle.max_abs_diff, oracle.worst_case
    );
    out
}

fn decomposition() -> Outcome {
    let s = decomposition_grid(&[1, 2, 3, 4, 5], &LEMMA_PRIMES, 3, Execution::default()).expect("decomposition sweep");
    from_summaries(&[s])
}

fn corollary() -> Outcome {
    let consts = DensityConstants::DEFAULT;
    assert_eq!(consts.lower, 0.230);
    let s = corollary_sample(&[10, 20, 50], 4, 500, 50, SEED, &consts, Execution::default()).expect("corollary sweep");
    // divisor-count cap used inside the union bound
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut div = CheckSummary {
        name: "divisor_count".into(),
        cases: 0,
        violations: 0,
        min_slack: f64::INFINITY,
        worst_case: String::new(),
    };
    for &m in &[10u64, 20, 50] {
        let w = enumerate_window(m).unwrap();
        for _ in 0..500 {
            let d = rng.random_range(1..=4);
            let dense: Vec<i64> = (0..d).map(|_| rng.random_range(-50..=50)).collect();
            let k = Frequency::from_dense(&dense);
            if k.is_zero() {
                continue;
            }
            let count = divisor_count(&k, &w).unwrap() as f64;
            let cap = divisor_count_bound(&k, m).unwrap();
            div.cases += 1;
            if count > cap + 1e-12 {
                div.violations += 1;
            }
            if cap - count < div.min_slack {
                div.min_slack = cap - count;
                div.worst_case = format!("m={m} k={k}");
            }
        }
    }
    from_summaries(&[s, div])
}

fn certificate() -> Outcome {
    let r = certificate_soundness(
        SEED,
        200,
        4,
        &[10, 20, 50],
        60,
        &DensityConstants::DEFAULT,
        1e-9,
        Execution::default(),
    )
    .expect("soundness sweep");
    from_summaries(&[r.bound, r.identity])
}

fn fooling() -> Outcome {
    let sweep = fooling_sweep(&[1, 2, 3], 20, SEED).expect("fooling sweep");
    let nodes: Vec<Node> = (0..3)
        .map(|a| Node::Rational(RationalPoint::new(vec![a], 3).unwrap()))
        .collect();
    let alg = LinearAlgorithm::qmc(nodes).unwrap();
    let cert = fooling_certificate(&alg, 1).unwrap();
    let report = verify_certificate(&cert, &alg).unwrap();
    let expect = 1.0 / (3.0 + 3f64.ln());
    let worked = report.passed && (cert.c - expect).abs() < 1e-15 && (cert.c - 0.2440).abs() < 5e-5;
    let mut out = from_summaries(&[sweep]);
    out.passed &= worked;
    out.detail += &format!("; worked set {{0,1/3,2/3}}: C={:.6} ok={worked}", cert.c);
    out
}

fn counting() -> Outcome {
    from_summaries(&[counting_chain(4, 64).expect("counting sweep")])
}

fn density() -> Outcome {
    let shipped = DensityConstants::DEFAULT;
    let calibrated = calibrate_constants(100_000).unwrap();
    let sweep = density_sweep(&shipped, 100_000);
    let mut out = from_summaries(&[sweep]);
    out.passed &= calibrated == shipped;
    out.detail += &format!(
        "; shipped (c_P, C_P) = ({}, {}), calibrated ({}, {})",
        shipped.lower, shipped.upper, calibrated.lower, calibrated.upper
    );
    out
}

fn budget() -> Outcome {
    let consts = DensityConstants::DEFAULT;
    let values: Vec<(f64, u64, f64)> = [0.5, 0.2, 0.1, 0.05]
        .iter()
        .map(|&eps| {
            let p = plan(eps, 1, &consts).unwrap();
            (eps, p.n, p.n as f64 * eps.powi(3) * (1.0 / eps).ln())
        })
        .collect();
    let hi = values.iter().map(|v| v.2).fold(f64::MIN, f64::max);
    let lo = values.iter().map(|v| v.2).fold(f64::MAX, f64::min);
    let ratio = hi / lo;
    let detail = values
        .iter()
        .map(|(e, n, s)| format!("eps={e}: n={n} scaled={s:.1}"))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome {
        passed: ratio < 8.0,
        detail: format!("{detail}; max/min = {ratio:.3} (< 8)"),
    }
}

fn norm_ordering() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut weight_violations = 0;
    let mut equality_cases = 0;
    for _ in 0..1000 {
        let d = rng.random_range(1..=8);
        let dense: Vec<i64> = (0..d)
            .map(|_| {
                if rng.random_bool(0.5) {
                    0
                } else {
                    rng.random_range(-40..=40)
                }
            })
            .collect();
        let k = Frequency::from_dense(&dense);
        let (w1, w2, w3) = (
            weight(&k, WeightScheme::F1),
            weight(&k, WeightScheme::F2),
            weight(&k, WeightScheme::F3),
        );
        if !(w1 <= w3 && w3 <= w2) {
            weight_violations += 1;
        }
        if k.width() == 1 {
            equality_cases += 1;
            if w1 != w2 {
                weight_violations += 1;
            }
        }
    }
    let mut norm_violations = 0;
    for seed in 0..100 {
        let d = 1 + (seed as usize % 6);
        let f = random_function(seed, d, 1 + (seed as usize % 5), 30, WeightScheme::F1).unwrap();
        let (n1, n2, n3) = (
            f.norm(WeightScheme::F1),
            f.norm(WeightScheme::F2),
            f.norm(WeightScheme::F3),
        );
        if !(n1 <= n3 && n3 <= n2) {
            norm_violations += 1;
        }
    }
    Outcome {
        passed: weight_violations == 0 && norm_violations == 0,
        detail: format!(
            "1000 frequencies ({equality_cases} with width 1): {weight_violations} violations; 100 functions: {norm_violations} violations"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exponential-sum bound width/p, exhaustive grid", lemma_exhaustive),
        ("root decomposition identity", decomposition),
        ("union exponential-sum bound", corollary),
        ("worst-case error certificate soundness", certificate),
        ("fooling-function certificates", fooling),
        ("counting-chain bound 2n^2/d", counting),
        ("prime-window density constants", density),
        ("point-budget shape", budget),
        ("weight and norm ordering", norm_ordering),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let tag = if out.passed { "PASS" } else { "FAIL" };
        if !out.passed {
            failed += 1;
        }
        println!(
            "[{tag}] {}. {name} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
