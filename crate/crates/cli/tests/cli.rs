use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qdlc_core::families;
use qdlc_core::io::vector_to_json;
use qdlc_core::{PlanReport, TargetVector};
use serde_json::Value;

fn qdlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdlc")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_vector(dir: &Path, name: &str, t: &TargetVector) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, vector_to_json(t).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_report(p: &Path) -> PlanReport {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn gaussian_plan_selects_fsl_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_vector(dir.path(), "gauss.json", &families::gaussian(11, 0.5).unwrap());
    let out = dir.path().join("plan.json");
    let o = qdlc(&["plan", "--input", s(&input), "--task", "state-prep", "--epsilon", "1e-3", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_report(&out);
    assert_eq!(report.selected.unwrap().method.name(), "fsl");
    assert!(String::from_utf8_lossy(&o.stdout).contains("fsl"));
    assert!(dir.path().join("plan.txt").exists());
    let m: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("plan.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["schema_version"], 1);
    assert_eq!(m["inputs"][0]["file"], "gauss.json");
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn missing_input_leaves_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res").join("plan.json");
    let o = qdlc(&["plan", "--input", s(&dir.path().join("absent.json")), "--epsilon", "1e-3", "--out", s(&out)]);
    assert_ne!(code(&o), 0);
    assert!(!dir.path().join("res").exists());
}

#[test]
fn malformed_json_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(&input, "{\n  \"n_qubits\": 1,\n  \"amplitudes\": [[1.0, 0.0] [0.0, 0.0]]\n}\n").unwrap();
    let o = qdlc(&["plan", "--input", s(&input), "--epsilon", "1e-3", "--out", s(&dir.path().join("p.json"))]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn single_method_gives_one_row_per_omega() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_vector(dir.path(), "r.json", &families::random_state(6, true, 3).unwrap());
    let out = dir.path().join("plan.json");
    let o = qdlc(&["plan", "--input", s(&input), "--epsilon", "1e-2", "--methods", "mottonen", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let r = read_report(&out);
    assert_eq!(r.per_method_per_omega.len(), r.omega_grid.len());
    assert!(r.per_method_per_omega.iter().all(|p| p.method.name() == "mottonen"));
    let omegas: Vec<f64> = r.per_method_per_omega.iter().map(|p| p.budget.omega).collect();
    assert_eq!(omegas, r.omega_grid);
}

#[test]
fn infeasible_plan_exits_2_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_vector(dir.path(), "d.json", &families::parabolic_diagonal(5).unwrap());
    let out = dir.path().join("plan.json");
    let o = qdlc(&["plan", "--input", s(&input), "--epsilon", "1e-6", "--methods", "diag-qsp", "--out", s(&out)]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
    let r = read_report(&out);
    assert!(r.selected.is_none());
    assert_eq!(r.infeasibility.len(), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("diag-qsp"));
}

#[test]
fn mottonen_round_trip_passes_verification() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_vector(dir.path(), "r.json", &families::random_state(6, false, 8).unwrap());
    let plan = dir.path().join("plan.json");
    let circuit = dir.path().join("circuit.json");
    let verify = dir.path().join("verify.json");
    assert_eq!(code(&qdlc(&["plan", "--input", s(&input), "--epsilon", "1e-3", "--methods", "mottonen", "--out", s(&plan)])), 0);
    assert_eq!(code(&qdlc(&["synthesize", "--plan", s(&plan), "--input", s(&input), "--out", s(&circuit)])), 0);
    let o = qdlc(&["verify", "--circuit", s(&circuit), "--input", s(&input), "--out", s(&verify)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&verify).unwrap()).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["norm"], "l2");
    assert!(v["achieved_error"].as_f64().unwrap() < 1e-12);

    // a bound below the realized error fails with exit 4
    let tight = dir.path().join("tight.json");
    let fsl_plan = dir.path().join("fsl.json");
    let fsl_circuit = dir.path().join("fsl-circuit.json");
    let smooth = write_vector(dir.path(), "g.json", &families::gaussian(6, 0.2).unwrap());
    assert_eq!(code(&qdlc(&["plan", "--input", s(&smooth), "--epsilon", "1e-1", "--methods", "fsl", "--out", s(&fsl_plan)])), 0);
    assert_eq!(code(&qdlc(&["synthesize", "--plan", s(&fsl_plan), "--input", s(&smooth), "--out", s(&fsl_circuit)])), 0);
    let o = qdlc(&["verify", "--circuit", s(&fsl_circuit), "--input", s(&smooth), "--bound", "1e-9", "--out", s(&tight)]);
    assert_eq!(code(&o), 4);
}

#[test]
fn corrupted_circuit_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_vector(dir.path(), "r.json", &families::random_state(3, false, 2).unwrap());
    let plan = dir.path().join("plan.json");
    let circuit = dir.path().join("circuit.json");
    qdlc(&["plan", "--input", s(&input), "--epsilon", "1e-2", "--methods", "mottonen", "--out", s(&plan)]);
    qdlc(&["synthesize", "--plan", s(&plan), "--input", s(&input), "--out", s(&circuit)]);
    let mut c: Value = serde_json::from_str(&fs::read_to_string(&circuit).unwrap()).unwrap();
    c["gates"][0]["targets"] = serde_json::json!([99]);
    fs::write(&circuit, serde_json::to_string(&c).unwrap()).unwrap();
    let o = qdlc(&["verify", "--circuit", s(&circuit), "--input", s(&input), "--out", s(&dir.path().join("v.json"))]);
    assert_eq!(code(&o), 1);
    assert!(!dir.path().join("v.json").exists());
}

#[test]
fn twenty_qubit_plan_is_unverified_at_scale() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_vector(dir.path(), "s.json", &families::sparse_random(20, 16, 5).unwrap());
    let plan = dir.path().join("plan.json");
    let circuit = dir.path().join("circuit.json");
    let verify = dir.path().join("verify.json");
    assert_eq!(code(&qdlc(&["plan", "--input", s(&input), "--epsilon", "1e-3", "--methods", "sparse", "--out", s(&plan)])), 0);
    assert_eq!(code(&qdlc(&["synthesize", "--plan", s(&plan), "--input", s(&input), "--out", s(&circuit)])), 0);
    let o = qdlc(&["verify", "--circuit", s(&circuit), "--input", s(&input), "--out", s(&verify)]);
    assert_eq!(code(&o), 3);
    let v: Value = serde_json::from_str(&fs::read_to_string(&verify).unwrap()).unwrap();
    assert_eq!(v["status"], "unverified-at-scale");
    assert!(v["achieved_error"].is_null());
}

#[test]
fn manifests_are_byte_stable_across_directories() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let t = families::gaussian(8, 0.3).unwrap();
    let mut bytes = Vec::new();
    for dir in [&a, &b] {
        let input = write_vector(dir.path(), "v.json", &t);
        let out = dir.path().join("plan.json");
        assert_eq!(code(&qdlc(&["plan", "--input", s(&input), "--epsilon", "1e-3", "--out", s(&out)])), 0);
        bytes.push((fs::read(&out).unwrap(), fs::read(dir.path().join("plan.manifest.json")).unwrap()));
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn walsh_kappa_on_a_constant_diagonal_is_exact_at_one_term() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_vector(dir.path(), "c.json", &TargetVector::diagonal(&[0.3; 16]).unwrap());
    let out = dir.path().join("bench");
    let o = qdlc(&["bench", "walsh-kappa", "--input", s(&input), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let mut rd = csv::Reader::from_path(out.join("walsh_kappa.csv")).unwrap();
    let first = rd.records().next().unwrap().unwrap();
    assert_eq!(&first[0], "1");
    assert!(first[1].parse::<f64>().unwrap() < 1e-12);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn mps_chi_bench_error_falls_with_chi() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let o = qdlc(&["bench", "mps-chi", "--min-qubits", "6", "--max-qubits", "7", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let mut rd = csv::Reader::from_path(out.join("mps_chi.csv")).unwrap();
    assert_eq!(rd.headers().unwrap(), vec!["n_qubits", "chi", "error"]);
    let rows: Vec<(usize, f64)> = rd.records().map(|r| r.unwrap()).map(|r| (r[0].parse().unwrap(), r[2].parse().unwrap())).collect();
    for w in rows.windows(2).filter(|w| w[0].0 == w[1].0) {
        assert!(w[1].1 <= w[0].1 + 1e-15);
    }
}

#[test]
fn kl_bench_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = qdlc(&["bench", "kl-shots", "--qubits", "6", "--trials", "10", "--max-shots-exp", "3", "--out", s(&out)]);
        assert_eq!(code(&o), 0);
        runs.push(fs::read(out.join("kl_shots.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let text = String::from_utf8(runs[0].clone()).unwrap();
    assert!(text.starts_with("transform,shots,trial,kl,seed\n"));
}

#[test]
fn cost_ledger_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("COST_LEDGER.md");
    assert_eq!(code(&qdlc(&["cost-ledger", "--out", s(&out)])), 0);
    assert!(fs::read_to_string(&out).unwrap().starts_with("# Cost ledger"));
    assert_eq!(code(&qdlc(&["--help"])), 0);
    assert_eq!(code(&qdlc(&["frobnicate"])), 1);
    assert_eq!(code(&qdlc(&["plan", "--epsilon", "1e-3"])), 1);
}
