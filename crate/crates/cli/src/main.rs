//! Command-line front end for the `korobov_qmc` library.
//!
//! Exit status: 0 on success, 1 on a domain or input error, 2 when a
//! mathematical check fails, 64 on a usage error.

mod args;

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use korobov_qmc::adversary::{fooling_certificate, verify_certificate, CertificateRecord, FoolingCertificate};
use korobov_qmc::checks::{decomposition_grid, density_sweep, lemma_grid, CheckSummary};
use korobov_qmc::expsum::{
    corollary_bound, decomposition_check_on, expsum_single, expsum_union, single_bound, SingleBound,
};
use korobov_qmc::fourier::{random_function, WeightScheme};
use korobov_qmc::integrator::{exact_error, plan, qmc_apply_spectral, wc_bound, LinearAlgorithm};
use korobov_qmc::io::{read_nodes, read_weights, write_union};
use korobov_qmc::korobov::union_set;
use korobov_qmc::prime_window::{calibrate_constants, density_ratio, enumerate_window};
use korobov_qmc::{DensityConstants, Execution, Frequency, KorobovSet, SetKind, SpectralFunction, UnionPointSet};
use serde_json::{json, Value};

use args::{AnyKind, Builtin, Cli, Command, PointKind, PrimesAction, Scheme, UnionKind, VerifyCheck};

const EXIT_DOMAIN: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

enum Failure {
    /// Bad input or an argument outside the domain.
    Domain(String),
    /// A mathematical check failed; the document is still printed.
    Violation(Value),
}

impl From<korobov_qmc::Error> for Failure {
    fn from(e: korobov_qmc::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<Output, Failure>;

enum Output {
    Json(Value),
    Text(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(out) => {
            emit(out);
            ExitCode::SUCCESS
        }
        Err(Failure::Violation(doc)) => {
            emit(Output::Json(doc));
            ExitCode::from(EXIT_VIOLATION)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}

fn emit(out: Output) {
    let mut stdout = io::stdout().lock();
    let text = match out {
        Output::Json(v) => serde_json::to_string_pretty(&v).expect("json value serializes") + "\n",
        Output::Text(s) => s,
    };
    let _ = stdout.write_all(text.as_bytes());
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn constants(cli: &Cli) -> Result<DensityConstants, Failure> {
    let mut c = match &cli.constants {
        Some(path) => serde_json::from_str::<DensityConstants>(&read(path)?)
            .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?,
        None => DensityConstants::DEFAULT,
    };
    if let Some(lower) = cli.c_p {
        c.lower = lower;
    }
    c.validate()?;
    Ok(c)
}

fn run(cli: Cli) -> Outcome {
    let consts = constants(&cli)?;
    match cli.command {
        Command::Primes(a) => match a.action {
            Some(PrimesAction::Calibrate { max }) => {
                Ok(Output::Json(serde_json::to_value(calibrate_constants(max)?).unwrap()))
            }
            None => {
                let m = a.m.ok_or_else(|| Failure::Domain("primes needs --m".into()))?;
                primes(m, a.json)
            }
        },
        Command::Points(a) => {
            let kind = match a.kind {
                PointKind::S => SetKind::S,
                PointKind::T => SetKind::T,
            };
            let u = union_set(kind, a.m, a.d)?;
            match a.out {
                Some(path) => {
                    let mut w = io::BufWriter::new(fs::File::create(&path)?);
                    write_union(&mut w, &u)?;
                    w.flush()?;
                    Ok(Output::Json(
                        json!({ "path": path.display().to_string(), "n": u.len(), "sets": u.sets().len() }),
                    ))
                }
                None => {
                    let mut buf = Vec::new();
                    write_union(&mut buf, &u)?;
                    Ok(Output::Text(String::from_utf8(buf).expect("ascii output")))
                }
            }
        }
        Command::Norm(a) => {
            let f = SpectralFunction::from_json(&read(&a.function)?)?;
            let scheme = match a.scheme {
                Scheme::F1 => WeightScheme::F1,
                Scheme::F2 => WeightScheme::F2,
                Scheme::F3 => WeightScheme::F3,
            };
            Ok(Output::Json(
                json!({ "scheme": scheme, "norm": f.norm(scheme), "d": f.dim() }),
            ))
        }
        Command::Expsum(a) => expsum(a, &consts),
        Command::Integrate(a) => integrate(a, &consts),
        Command::Certify(a) => {
            let cert = wc_bound(a.m, &consts, a.d)?;
            Ok(Output::Json(serde_json::to_value(cert).unwrap()))
        }
        Command::Plan(a) => {
            let p = plan(a.eps, a.d, &consts)?;
            Ok(Output::Json(json!({
                "eps": a.eps,
                "d": a.d,
                "c_p": consts.lower,
                "m": p.m,
                "n": p.n,
                "bound": p.bound,
                "dimension_bound": p.dimension_bound,
            })))
        }
        Command::Fool(a) => fool(a),
        Command::Verify(a) => verify(a.check, &consts),
    }
}

fn primes(m: u64, as_json: bool) -> Outcome {
    let w = enumerate_window(m)?;
    if as_json {
        return Ok(Output::Json(json!({
            "m": m,
            "count": w.len(),
            "primes": w.primes(),
            "density_ratio": density_ratio(m)?,
            "total_points": w.total_points(),
        })));
    }
    let mut s = String::new();
    for p in w.primes() {
        s.push_str(&format!("{p}\n"));
    }
    Ok(Output::Text(s))
}

fn parse_k(text: &str) -> Result<Frequency, Failure> {
    let values = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Failure::Domain(format!("bad frequency entry {t:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(Failure::Domain("empty frequency".into()));
    }
    Ok(Frequency::from_dense(&values))
}

fn expsum(a: args::ExpsumArgs, consts: &DensityConstants) -> Outcome {
    let k = parse_k(&a.k)?;
    let d = k.dim();
    let kind_name = match a.kind {
        AnyKind::S => "S",
        AnyKind::T => "T",
        AnyKind::P1 => "P1",
        AnyKind::P2 => "P2",
    };
    let set_kind = match a.kind {
        AnyKind::S | AnyKind::P1 => SetKind::S,
        AnyKind::T | AnyKind::P2 => SetKind::T,
    };
    let union = matches!(a.kind, AnyKind::P1 | AnyKind::P2);
    let mut checks = Vec::new();
    let (value, n, size, bound, bound_type) = if union {
        let m = a.m.ok_or_else(|| Failure::Domain(format!("{kind_name} needs --m")))?;
        let u = union_set(set_kind, m, d)?;
        let r = expsum_union(&k, &u)?;
        let (bound, bound_type) = if k.is_zero() {
            (1.0, "trivial")
        } else {
            match corollary_bound(&k, m, consts) {
                Ok(b) => (b, "corollary"),
                Err(korobov_qmc::Error::Precondition(_)) => (1.0, "trivial"),
                Err(e) => return Err(e.into()),
            }
        };
        (r.value, r.n_terms, m, bound, bound_type)
    } else {
        let p = a.p.ok_or_else(|| Failure::Domain(format!("{kind_name} needs --p")))?;
        let set = KorobovSet::new(set_kind, p, d)?;
        let r = expsum_single(&k, &set)?;
        if a.report && set_kind == SetKind::S && p > d as u64 {
            let dc = decomposition_check_on(&k, &set)?;
            checks.push(json!({ "name": "decomposition", "diff": dc.lhs, "tol": dc.rhs, "satisfied": dc.satisfied }));
        }
        let (bound, bound_type) = match single_bound(&k, p) {
            SingleBound::Lemma(b) => (b, "width_over_p"),
            SingleBound::Trivial => (1.0, "trivial"),
            SingleBound::Unverified => (1.0, "unverified"),
        };
        (r.value, r.n_terms, p, bound, bound_type)
    };
    let abs = value.norm();
    let report = korobov_qmc::expsum::BoundReport::new(abs, bound);
    let mut doc = json!({
        "kind": kind_name,
        if union { "m" } else { "p" }: size,
        "k": k.to_dense(),
        "n_terms": n,
        "re": value.re,
        "im": value.im,
        "abs": abs,
        "bound": bound,
        "bound_type": bound_type,
        "slack": report.slack,
        "satisfied": report.satisfied,
    });
    if !a.report {
        return Ok(Output::Json(doc));
    }
    let failed = !report.satisfied || checks.iter().any(|c| c["satisfied"] == false);
    doc["checks"] = Value::Array(checks);
    if failed {
        Err(Failure::Violation(doc))
    } else {
        Ok(Output::Json(doc))
    }
}

fn builtin(b: Builtin, d: usize, seed: u64) -> Result<SpectralFunction, Failure> {
    if d == 0 {
        return Err(Failure::Domain("--d must be at least 1".into()));
    }
    let f = match b {
        Builtin::Cosine => {
            let half = 0.5 / d as f64;
            let terms = (0..d).flat_map(|j| {
                [
                    (Frequency::axis(d, j, 1), half.into()),
                    (Frequency::axis(d, j, -1), half.into()),
                ]
            });
            SpectralFunction::new(d, true, terms)?
        }
        Builtin::Mixed => {
            if d < 2 {
                return Err(Failure::Domain("the mixed builtin needs d >= 2".into()));
            }
            let k = Frequency::from_sparse(d, &[(0, 3), (d as u32 - 1, -2)])?;
            SpectralFunction::new(d, true, [(k.neg(), 0.5.into()), (k, 0.5.into())])?
        }
        Builtin::Random => return Ok(random_function(seed, d, 4, 20, WeightScheme::F2)?),
    };
    let norm = f.norm(WeightScheme::F2);
    Ok(f.scaled(1.0 / norm))
}

struct IntegrationRow {
    m: u64,
    n: u64,
    estimate: f64,
    integral: f64,
    error: f64,
    bound: f64,
}

fn integrate_one(
    f: &SpectralFunction,
    kind: SetKind,
    m: u64,
    consts: &DensityConstants,
) -> Result<IntegrationRow, Failure> {
    let cert = wc_bound(m, consts, f.dim())?;
    let u: UnionPointSet = union_set(kind, m, f.dim())?;
    let estimate = qmc_apply_spectral(f, &u)?;
    Ok(IntegrationRow {
        m,
        n: u.len(),
        estimate: estimate.re,
        integral: f.integral().re,
        error: exact_error(f, &u)?,
        bound: cert.error_bound(f.norm(WeightScheme::F2)),
    })
}

fn integrate(a: args::IntegrateArgs, consts: &DensityConstants) -> Outcome {
    let f = match (&a.function, a.builtin) {
        (Some(path), _) => SpectralFunction::from_json(&read(path)?)?,
        (None, Some(b)) => builtin(b, a.d, a.seed)?,
        (None, None) => unreachable!("clap requires a source"),
    };
    let kind = match a.kind {
        UnionKind::P1 => SetKind::S,
        UnionKind::P2 => SetKind::T,
    };
    let ms: Vec<u64> = match (&a.ms, a.m) {
        (Some(ms), _) => ms.clone(),
        (None, Some(m)) => vec![m],
        (None, None) => unreachable!("clap requires --m or --ms"),
    };
    let rows = ms
        .iter()
        .map(|&m| integrate_one(&f, kind, m, consts))
        .collect::<Result<Vec<_>, _>>()?;
    let violated = rows.iter().any(|r| r.error > r.bound + 1e-9);
    if a.csv {
        let mut s = String::from("m,n,estimate,integral,error,bound\n");
        for r in &rows {
            s.push_str(&format!(
                "{},{},{:e},{:e},{:e},{:e}\n",
                r.m, r.n, r.estimate, r.integral, r.error, r.bound
            ));
        }
        if violated {
            eprintln!("error: an integration error exceeds its certified bound");
            return Err(Failure::Violation(Value::String(s)));
        }
        return Ok(Output::Text(s));
    }
    let kind_name = kind.union_name();
    let docs: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "kind": kind_name,
                "m": r.m,
                "d": f.dim(),
                "n": r.n,
                "estimate": r.estimate,
                "integral": r.integral,
                "error": r.error,
                "norm_f2": f.norm(WeightScheme::F2),
                "bound": r.bound,
                "within_bound": r.error <= r.bound + 1e-9,
            })
        })
        .collect();
    let doc = if docs.len() == 1 {
        docs.into_iter().next().unwrap()
    } else {
        Value::Array(docs)
    };
    if violated {
        Err(Failure::Violation(doc))
    } else {
        Ok(Output::Json(doc))
    }
}

fn algorithm(nodes: &Path, weights: Option<&Path>) -> Result<LinearAlgorithm, Failure> {
    let nodes = read_nodes(&read(nodes)?)?;
    Ok(match weights {
        Some(w) => LinearAlgorithm::new(nodes, read_weights(&read(w)?)?)?,
        None => LinearAlgorithm::qmc(nodes)?,
    })
}

fn fool(a: args::FoolArgs) -> Outcome {
    let alg = algorithm(&a.nodes, a.weights.as_deref())?;
    let cert = fooling_certificate(&alg, a.d)?;
    if let Some(path) = &a.g_out {
        fs::write(path, cert.g_star.to_json() + "\n")?;
    }
    let report = verify_certificate(&cert, &alg)?;
    let mut doc = serde_json::to_value(cert.to_record()).unwrap();
    doc["verified"] = json!(report.passed);
    if report.passed {
        Ok(Output::Json(doc))
    } else {
        doc["failures"] = serde_json::to_value(report.failures().collect::<Vec<_>>()).unwrap();
        Err(Failure::Violation(doc))
    }
}

fn summary_outcome(summary: CheckSummary) -> Outcome {
    let doc = serde_json::to_value(&summary).unwrap();
    if summary.passed() {
        Ok(Output::Json(doc))
    } else {
        Err(Failure::Violation(doc))
    }
}

fn verify(check: VerifyCheck, consts: &DensityConstants) -> Outcome {
    let exec = Execution::default();
    match check {
        VerifyCheck::Certificate { cert, nodes, weights } => {
            let record: CertificateRecord =
                serde_json::from_str(&read(&cert)?).map_err(|e| Failure::Domain(format!("{}: {e}", cert.display())))?;
            let cert = FoolingCertificate::from_record(record)?;
            let alg = algorithm(&nodes, weights.as_deref())?;
            let report = verify_certificate(&cert, &alg)?;
            let doc = serde_json::to_value(&report).unwrap();
            if report.passed {
                Ok(Output::Json(doc))
            } else {
                Err(Failure::Violation(doc))
            }
        }
        VerifyCheck::Lemma(g) => summary_outcome(lemma_grid(&g.dims, &g.primes, g.r, exec)?),
        VerifyCheck::Decomposition(g) => summary_outcome(decomposition_grid(&g.dims, &g.primes, g.r, exec)?),
        VerifyCheck::Density { max } => summary_outcome(density_sweep(consts, max)),
    }
}
