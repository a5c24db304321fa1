use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ffcert(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffcert"))
        .current_dir(dir)
        .env_remove("FFCERT_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = ffcert(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json_file(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

/// GHZ stabilizer Hamiltonian, its ground state, and a plan.
fn ghz_fixture() -> TempDir {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["ham", "build", "--kind", "ghz", "--n", "3", "--out", "h.json"]);
    ok(d, &["ham", "analyze", "--ham", "h.json", "--ground-out", "g.json"]);
    ok(d, &["certify", "plan", "--ft", "0.8", "--alpha", "0.05", "--eps", "0.05", "--ham", "h.json", "--out", "plan.json"]);
    let g = fs::read_to_string(d.join("g.json")).unwrap();
    let noisy = format!(r#"{{"kind":"noisy_pure","base":{g},"channel":{{"type":"depolarizing","p":0.3}},"label":"noisy"}}"#);
    fs::write(d.join("noisy.json"), noisy).unwrap();
    tmp
}

#[test]
fn usage_errors_exit_two() {
    let tmp = ghz_fixture();
    for args in [
        vec!["certify", "plan", "--ft", "1.5", "--alpha", "0.05", "--eps", "0.05", "--ham", "h.json"],
        vec!["certify", "plan", "--ft", "0.9", "--alpha", "0", "--eps", "0.05", "--ham", "h.json"],
        vec!["sample", "--ham", "h.json", "--state", "g.json", "--shots", "0", "--seed", "1"],
        vec!["bogus"],
    ] {
        assert_eq!(ffcert(tmp.path(), &args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_one_with_json() {
    let tmp = ghz_fixture();
    let out = ffcert(tmp.path(), &["certify", "plan", "--ft", "0.9", "--alpha", "0.05", "--eps", "0.07", "--ham", "h.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "InvalidParameter");
    assert!(err["message"].as_str().unwrap().contains("epsilon"));

    let out = ffcert(tmp.path(), &["--budget", "4", "ham", "analyze", "--ham", "h.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "BudgetExceeded");

    let out = ffcert(tmp.path(), &["ham", "analyze", "--ham", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eps_at_boundary_is_accepted() {
    let tmp = ghz_fixture();
    ok(tmp.path(), &["certify", "plan", "--ft", "0.9", "--alpha", "0.05", "--eps", "0.05", "--ham", "h.json"]);
}

#[test]
fn plan_matches_closed_form() {
    let tmp = ghz_fixture();
    let plan = &json_file(tmp.path(), "plan.json")["plan"];
    let (n, j, gap, eps, alpha) = (3.0f64, 1.0f64, 1.0f64, 0.05f64, 0.05f64);
    let m_real = j * j * n * n / (2.0 * gap * gap * eps * eps) * (-(n + 1.0) / (1.0 - alpha).ln()).ln();
    assert!((plan["m_real"].as_f64().unwrap() - m_real).abs() < 1e-6 * m_real);
    assert_eq!(plan["m"].as_u64().unwrap(), m_real.ceil() as u64);
    let norm = plan["inputs_summary"]["norm"].as_f64().unwrap();
    let delta = 0.2 * (1.0 - gap / norm) + 2.0 * eps * gap / norm;
    assert!((plan["delta"].as_f64().unwrap() - delta).abs() < 1e-12);
    assert_eq!(json_file(tmp.path(), "plan.json")["config"]["command"], "certify plan");
}

#[test]
fn ground_state_accepted_noisy_rejected() {
    let tmp = ghz_fixture();
    let d = tmp.path();
    let good: Value = serde_json::from_str(&ok(d, &["certify", "run", "--ham", "h.json", "--state", "g.json", "--plan", "plan.json", "--seed", "7"])).unwrap();
    assert_eq!(good["verdict"], "accept");
    assert_eq!(good["config"]["args"]["seed"], 7);
    let bad: Value = serde_json::from_str(&ok(d, &["certify", "run", "--ham", "h.json", "--state", "noisy.json", "--plan", "plan.json", "--seed", "7"])).unwrap();
    assert_eq!(bad["verdict"], "reject");
    assert!((bad["true_fidelity"].as_f64().unwrap() - (0.7 + 0.3 / 8.0)).abs() < 1e-12);
}

#[test]
fn plan_for_other_hamiltonian_is_refused() {
    let tmp = ghz_fixture();
    let d = tmp.path();
    ok(d, &["ham", "build", "--kind", "ghz", "--n", "4", "--out", "p.json"]);
    ok(d, &["ham", "analyze", "--ham", "p.json", "--ground-out", "g4.json"]);
    let out = ffcert(d, &["certify", "run", "--ham", "p.json", "--state", "g4.json", "--plan", "plan.json", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical_on_rerun() {
    let tmp = ghz_fixture();
    let d = tmp.path();
    let args = ["certify", "run", "--ham", "h.json", "--state", "noisy.json", "--plan", "plan.json", "--seed", "11"];
    assert_eq!(ok(d, &args), ok(d, &args));

    let mc = ["certify", "montecarlo", "--ham", "h.json", "--state", "noisy.json", "--plan", "plan.json", "--seed", "3", "--reps", "8"];
    let single = Command::new(env!("CARGO_BIN_EXE_ffcert")).current_dir(d).env("FFCERT_THREADS", "1").args(mc).output().unwrap();
    assert!(single.status.success());
    assert_eq!(ok(d, &mc).as_bytes(), &single.stdout[..]);

    let s = ["sample", "--ham", "h.json", "--state", "noisy.json", "--shots", "50", "--seed", "2", "--csv", "s.csv"];
    let first = ok(d, &s);
    let csv = fs::read(d.join("s.csv")).unwrap();
    assert_eq!(first, ok(d, &s));
    assert_eq!(csv, fs::read(d.join("s.csv")).unwrap());
}

#[test]
fn montecarlo_writes_json_and_csv() {
    let tmp = ghz_fixture();
    let d = tmp.path();
    ok(d, &["certify", "montecarlo", "--ham", "h.json", "--state", "g.json", "--plan", "plan.json", "--seed", "1", "--reps", "5", "--out-dir", "mc"]);
    let rep = json_file(d, "mc/montecarlo.json");
    assert_eq!(rep["montecarlo"]["accepts"], 5);
    assert_eq!(rep["montecarlo"]["region"], "must_accept");
    let csv = fs::read_to_string(d.join("mc/montecarlo.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn iqp_gap_of_zero_polynomial_is_one() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("zero.txt"), "n 4\n").unwrap();
    assert_eq!(ok(tmp.path(), &["iqp", "gap", "--poly", "zero.txt"]).trim(), "1.0");
}

#[test]
fn iqp_pipeline_and_supremacy_report() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["iqp", "gen", "--n", "2", "--seed", "5", "--out", "p.txt"]);
    let gap: f64 = ok(d, &["iqp", "gap", "--poly", "p.txt"]).trim().parse().unwrap();
    assert!((-1.0..=1.0).contains(&gap));
    ok(d, &["iqp", "encode", "--poly", "p.txt", "--decompose", "--out", "c.json"]);
    let meta: Value = serde_json::from_str(&ok(d, &["circuit", "compile", "--circuit", "c.json", "--encoding", "unary", "--out", "fk.json"])).unwrap();
    assert_eq!(meta["metadata"]["work_qubits"], 2);
    assert_eq!(meta["metadata"]["locality"], 5);

    let args = ["iqp", "supremacy", "--poly", "p.txt", "--ft", "0.9", "--alpha", "0.05", "--eps", "0.05", "--seed", "4", "--shots", "20"];
    let a = ok(d, &args);
    assert_eq!(a, ok(d, &args));
    let rep: Value = serde_json::from_str(&a).unwrap();
    let ledger = &rep["outcome"]["budget"];
    assert_eq!(ledger["pass"], false);
    assert_eq!(rep["instance"]["padding"], rep["instance"]["l_comp"]);
}
