use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_korobov-qmc"))
        .args(args)
        .env_remove("KOROBOV_QMC_CONSTANTS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn close(v: &Value, expect: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - expect).abs() <= tol
}

#[test]
fn certify_default_constants() {
    let v = json(&["certify", "--m", "100", "--d", "3"]);
    assert!(close(&v["bound"], 0.6957, 1e-4));
    assert!(close(&v["bound"], 16.0 / 23.0, 1e-12));
}

#[test]
fn certify_rejects_small_window() {
    let out = run(&["certify", "--m", "10", "--d", "7"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("smallest admissible m is 13"));
}

#[test]
fn plan_matches_constant() {
    let v = json(&["plan", "--eps", "0.8", "--d", "1"]);
    assert_eq!(v["m"], 87);
    let v = json(&["--c-p", "0.2", "plan", "--eps", "0.8", "--d", "1"]);
    assert_eq!(v["m"], 100);
    // window (50,100] has 10 primes
    let primes = json(&["primes", "--m", "100", "--json"]);
    let n: u64 = primes["primes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_u64().unwrap().pow(2))
        .sum();
    assert_eq!(v["n"], n);
}

#[test]
fn constants_file_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    fs::write(&path, r#"{"c_p":0.2,"C_p":0.62,"m_max":100000}"#).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(json(&["--constants", p, "plan", "--eps", "0.8", "--d", "1"])["m"], 100);
    let out = Command::new(env!("CARGO_BIN_EXE_korobov-qmc"))
        .args(["plan", "--eps", "0.8", "--d", "1"])
        .env("KOROBOV_QMC_CONSTANTS", p)
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["m"], 100);
    assert_eq!(
        run(&["--c-p", "1.5", "plan", "--eps", "0.5", "--d", "1"]).status.code(),
        Some(1)
    );
}

#[test]
fn expsum_small_t_set() {
    let v = json(&["expsum", "--kind", "T", "--p", "3", "--k", "1"]);
    assert!(close(&v["re"], 1.0 / 3.0, 1e-12));
    assert!(close(&v["im"], 0.0, 1e-12));
    assert!(close(&v["bound"], 1.0 / 3.0, 1e-12));
    assert_eq!(v["satisfied"], true);
}

#[test]
fn expsum_union_report() {
    let v = json(&["expsum", "--kind", "P1", "--m", "50", "--k", "0,3", "--report"]);
    assert_eq!(v["bound_type"], "corollary");
    assert!(close(&v["bound"], 0.84425, 1e-5));
    let v = json(&["expsum", "--kind", "S", "--p", "11", "--k", "2,-1,3", "--report"]);
    assert_eq!(v["checks"][0]["satisfied"], true);
}

#[test]
fn points_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.txt");
    let p = path.to_str().unwrap();
    let v = json(&["points", "--kind", "S", "--m", "20", "--d", "2", "--out", p]);
    assert_eq!(v["n"], 940);
    let text = fs::read_to_string(&path).unwrap();
    let stdout = run(&["points", "--kind", "S", "--m", "20", "--d", "2"]).stdout;
    assert_eq!(text.as_bytes(), &stdout[..]);
    let blocks = korobov_qmc::io::read_points(&text).unwrap();
    let u = korobov_qmc::korobov::union_set(korobov_qmc::SetKind::S, 20, 2).unwrap();
    let read: Vec<_> = blocks.into_iter().flat_map(|b| b.points).collect();
    let direct: Vec<_> = u.points().collect();
    assert_eq!(read, direct);
}

#[test]
fn norm_of_function_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    fs::write(
        &path,
        r#"{"d":2,"real":true,"coeffs":[{"k":[[0,2],[1,-3]],"re":0.5,"im":0},{"k":[[0,-2],[1,3]],"re":0.5,"im":0}]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let f1 = json(&["norm", "--scheme", "f1", "--fn", p])["norm"].as_f64().unwrap();
    let f2 = json(&["norm", "--scheme", "f2", "--fn", p])["norm"].as_f64().unwrap();
    let f3 = json(&["norm", "--scheme", "f3", "--fn", p])["norm"].as_f64().unwrap();
    // width 2 dominates log 2 for F2 and F3; F1 keeps weight 1
    assert_eq!((f1, f2, f3), (1.0, 2.0, 2.0));
    let v = json(&["integrate", "--kind", "P2", "--m", "20", "--fn", p]);
    assert_eq!(v["within_bound"], true);
}

#[test]
fn integrate_csv_table() {
    let out = run(&[
        "integrate",
        "--kind",
        "P1",
        "--builtin",
        "cosine",
        "--d",
        "3",
        "--csv",
        "--ms",
        "10,20",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,n,estimate,integral,error,bound");
    assert_eq!(lines.len(), 3);
}

#[test]
fn fool_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let nodes = dir.path().join("nodes.txt");
    fs::write(&nodes, "# denom=3\n0\n1\n2\n").unwrap();
    let g = dir.path().join("g.json");
    let cert = json(&[
        "fool",
        "--nodes",
        nodes.to_str().unwrap(),
        "--d",
        "1",
        "--g-out",
        g.to_str().unwrap(),
    ]);
    assert!(close(&cert["C"], 1.0 / (3.0 + 3f64.ln()), 1e-12));
    assert_eq!(cert["verified"], true);
    let f1 = json(&["norm", "--scheme", "f1", "--fn", g.to_str().unwrap()]);
    assert!(f1["norm"].as_f64().unwrap() <= 1.0 + 1e-9);

    let cert_path = dir.path().join("cert.json");
    fs::write(&cert_path, serde_json::to_string(&cert).unwrap()).unwrap();
    let v = json(&[
        "verify",
        "certificate",
        "--cert",
        cert_path.to_str().unwrap(),
        "--nodes",
        nodes.to_str().unwrap(),
    ]);
    assert_eq!(v["passed"], true);

    // the same certificate does not annihilate a different node set
    let other = dir.path().join("other.txt");
    fs::write(&other, "0.1\n0.5\n0.9\n").unwrap();
    let out = run(&[
        "verify",
        "certificate",
        "--cert",
        cert_path.to_str().unwrap(),
        "--nodes",
        other.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_sweeps() {
    assert_eq!(
        json(&["verify", "lemma", "--dims", "1,2", "--primes", "7,11"])["violations"],
        0
    );
    assert_eq!(
        json(&["verify", "decomposition", "--dims", "2", "--primes", "7"])["violations"],
        0
    );
    assert_eq!(json(&["verify", "density", "--max", "2000"])["violations"], 0);
    let out = run(&["--c-p", "0.35", "verify", "density", "--max", "2000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(64));
    assert_eq!(run(&["plan", "--eps", "0.5"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["plan", "--eps", "1.5", "--d", "1"]).status.code(), Some(1));
    assert_eq!(run(&["primes", "--m", "1"]).status.code(), Some(1));
    assert_eq!(
        run(&["expsum", "--kind", "S", "--p", "9", "--k", "1"]).status.code(),
        Some(1)
    );
}

#[test]
fn output_is_deterministic() {
    let args = [
        "integrate",
        "--kind",
        "P2",
        "--m",
        "30",
        "--builtin",
        "random",
        "--d",
        "3",
        "--seed",
        "11",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
