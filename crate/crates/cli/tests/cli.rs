use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mismatch_qpt::circuit::TauParams;
use mismatch_qpt::tomography::{model_matrix, MeasMatrix};
use serde_json::Value;

const REFERENCE: &str = "-0.30,0.50,-0.55,0.10,-0.45";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mismatch-qpt"))
        .args(args)
        .env_remove("MISMATCH_QPT_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// outcome → (conditional, joint), plus the success probability.
fn parse_simulation(csv: &str) -> (Vec<(String, f64)>, f64) {
    let mut rows = Vec::new();
    let mut success = f64::NAN;
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0] == "success" {
            success = fields[2].parse().unwrap();
        } else {
            rows.push((fields[0].to_string(), fields[1].parse().unwrap()));
        }
    }
    (rows, success)
}

fn probability(rows: &[(String, f64)], outcome: &str) -> f64 {
    rows.iter().find(|(o, _)| o == outcome).unwrap().1
}

#[test]
fn simulate_flips_the_target_of_10() {
    let out = ok(&["simulate", "--builtin", "cnot", "--tau", "0,0,0,0,0", "--input", "10", "--basis", "z", "--format", "csv"]);
    let (rows, success) = parse_simulation(&out);
    assert!((probability(&rows, "11") - 1.0).abs() < 1e-12);
    assert!((success - 1.0 / 9.0).abs() < 1e-12);
}

#[test]
fn simulate_minus_minus_in_the_x_basis() {
    let out = ok(&["simulate", "--builtin", "cnot", "--input", "--", "--basis", "x", "--format", "csv"]);
    let (rows, _) = parse_simulation(&out);
    assert!((probability(&rows, "+-") - 1.0).abs() < 1e-12, "{out}");
}

#[test]
fn simulate_text_output_mentions_success() {
    let out = ok(&["simulate", "--builtin", "cnot", "--input", "11"]);
    assert!(out.contains("success  0.111111"), "{out}");
}

#[test]
fn simulate_reads_circuit_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("swap.circ");
    std::fs::write(
        &file,
        "mode c0\nmode c1\nmode t0\nmode t1\ncontrol c0 c1\ntarget t0 t1\nbs c0 c1 0 gray=c1\n",
    )
    .unwrap();
    let out = ok(&["simulate", "--circuit", path_str(&file), "--input", "01", "--format", "csv"]);
    let (rows, success) = parse_simulation(&out);
    assert!((success - 1.0).abs() < 1e-12);
    assert!((probability(&rows, "11") - 1.0).abs() < 1e-12, "{out}");
}

#[test]
fn wrong_tau_arity_is_a_usage_error() {
    let out = run(&["simulate", "--builtin", "cnot", "--tau", "0,0,0", "--input", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected 5 values"));
}

#[test]
fn missing_files_are_io_errors() {
    let out = run(&["fit", "/nonexistent/data.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

fn write_model(dir: &Path, tau: &str) -> PathBuf {
    let m = model_matrix(&tau.parse().unwrap()).unwrap();
    let file = dir.join("model.csv");
    std::fs::write(&file, m.to_csv()).unwrap();
    file
}

#[test]
fn fit_recovers_noiseless_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_model(dir.path(), "0.2,-0.4,0.3,-0.1,0.25");
    let out = ok(&["fit", path_str(&data), "--restarts", "8"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["achieved_e_max"].as_f64().unwrap() < 1e-5, "{out}");
}

#[test]
fn fit_is_deterministic_and_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_model(dir.path(), REFERENCE);
    let outputs: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("fit{i}.json"))).collect();
    for o in &outputs {
        ok(&["fit", path_str(&data), "--restarts", "4", "--seed", "9", "--output", path_str(o)]);
    }
    let a = std::fs::read(&outputs[0]).unwrap();
    assert_eq!(a, std::fs::read(&outputs[1]).unwrap());

    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit0.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "fit");
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["config"]["restarts"], 4);
    assert_eq!(manifest["inputs"][0], path_str(&data));
}

#[test]
fn fit_seed_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_model(dir.path(), REFERENCE);
    let output = dir.path().join("fit.json");
    let status = Command::new(env!("CARGO_BIN_EXE_mismatch-qpt"))
        .args(["fit", path_str(&data), "--restarts", "2", "--output", path_str(&output)])
        .env("MISMATCH_QPT_SEED", "77")
        .status()
        .unwrap();
    assert!(status.success());
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 77);
}

#[test]
fn fit_rejects_unnormalized_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let m = model_matrix(&TauParams::zero()).unwrap();
    let mut entries = *m.entries();
    // first row is |00⟩: Z block (1, 0, 0, 0) becomes (0.9, 0, 0, 0)
    entries[0][0] = 0.9;
    let file = dir.path().join("bad.csv");
    std::fs::write(&file, MeasMatrix::new(entries).unwrap().to_csv()).unwrap();
    let out = run(&["fit", path_str(&file)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sums to 0.9"));
}

#[test]
fn qpt_of_the_ideal_gate() {
    let v: Value = serde_json::from_str(&ok(&["qpt", "--tau", "0,0,0,0,0"])).unwrap();
    assert!((v["process_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(v["physical"].as_bool().unwrap());
    assert_eq!(v["chi"]["real"].as_array().unwrap().len(), 16);
}

#[test]
fn qpt_of_the_reference_mismatch() {
    let v: Value = serde_json::from_str(&ok(&["qpt", "--tau", REFERENCE])).unwrap();
    let f = v["process_fidelity"].as_f64().unwrap();
    // the anchor is 0.88; this model gives 0.685 (see README)
    assert!((f - 0.6854).abs() < 1e-3, "{f}");
    assert!(v["min_eigenvalue"].as_f64().unwrap() >= -1e-9);
    assert_eq!(v["eigenvalue_floor"].as_f64(), Some(-1e-9));
}

#[test]
fn qpt_from_a_fit_result_and_fidelity_between_files() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_model(dir.path(), "0.2,-0.4,0.3,-0.1,0.25");
    let fit = dir.path().join("fit.json");
    ok(&["fit", path_str(&data), "--restarts", "4", "--output", path_str(&fit)]);
    let from_fit = dir.path().join("chi_fit.json");
    ok(&["qpt", "--fit-result", path_str(&fit), "--output", path_str(&from_fit)]);
    let direct = dir.path().join("chi_direct.json");
    ok(&["qpt", "--tau", "0.2,-0.4,0.3,-0.1,0.25", "--output", path_str(&direct)]);

    // the fit may land on −τ, which describes the same gate
    let v: Value = serde_json::from_str(&ok(&["fidelity", path_str(&from_fit), path_str(&direct)])).unwrap();
    assert!(v["process_fidelity"].as_f64().unwrap() > 1.0 - 1e-6, "{v}");

    // bare χ files are accepted too
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&direct).unwrap()).unwrap();
    let bare = dir.path().join("bare.json");
    std::fs::write(&bare, report["chi"].to_string()).unwrap();
    let v: Value = serde_json::from_str(&ok(&["fidelity", path_str(&bare), path_str(&direct)])).unwrap();
    assert!((v["process_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn fidelity_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.json");
    std::fs::write(&file, "{\"hello\": 1}").unwrap();
    let out = run(&["fidelity", path_str(&file), path_str(&file)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn synth_converges_to_the_model() {
    let out = ok(&["synth", "--tau", REFERENCE, "--counts", "1e9", "--seed", "5"]);
    let data = MeasMatrix::from_csv(&out).unwrap();
    let model = model_matrix(&REFERENCE.parse().unwrap()).unwrap();
    for r in 0..8 {
        for c in 0..8 {
            assert!((data.get(r, c) - model.get(r, c)).abs() < 1e-4);
        }
    }
}

#[test]
fn synth_is_seed_deterministic() {
    let a = ok(&["synth", "--tau", REFERENCE, "--seed", "3"]);
    assert_eq!(a, ok(&["synth", "--tau", REFERENCE, "--seed", "3"]));
    assert_ne!(a, ok(&["synth", "--tau", REFERENCE, "--seed", "4"]));
}

#[test]
fn synth_rejects_zero_counts() {
    assert_eq!(run(&["synth", "--tau", REFERENCE, "--counts", "0"]).status.code(), Some(2));
}

#[test]
fn synth_noise_matches_binomial_spread() {
    let c = 4600.0;
    let model = model_matrix(&REFERENCE.parse().unwrap()).unwrap();
    let samples: Vec<MeasMatrix> = (0..100)
        .map(|seed| MeasMatrix::from_csv(&ok(&["synth", "--tau", REFERENCE, "--seed", &seed.to_string()])).unwrap())
        .collect();
    let n = samples.len() as f64;
    let mut largest = 0.0f64;
    for r in 0..8 {
        for col in 0..8 {
            let p = model.get(r, col);
            let mean = samples.iter().map(|m| m.get(r, col)).sum::<f64>() / n;
            let var = samples.iter().map(|m| (m.get(r, col) - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let expected = (p * (1.0 - p) / c).sqrt();
            largest = largest.max(var.sqrt());
            if expected > 1e-3 {
                // 100 samples: relative error of a std estimate is about 7%
                assert!((var.sqrt() / expected - 1.0).abs() < 0.3, "({r},{col}) {} vs {expected}", var.sqrt());
            } else {
                assert!(var.sqrt() < 2e-3);
            }
        }
    }
    // a binomial entry never spreads more than 1/(2√c) ≈ 0.74%
    assert!(largest < 0.5 / c.sqrt() * 1.3, "{largest}");
}

#[test]
fn sweep_scales_the_reference_mismatch() {
    let out = ok(&["sweep", "--points", "5"]);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert!((rows[0][6] - 1.0).abs() < 1e-9);
    assert!((rows[4][6] - 0.6854).abs() < 1e-3);
    assert!(rows.windows(2).all(|w| w[1][6] <= w[0][6] + 1e-12));
}

#[test]
fn sweep_single_component() {
    let out = ok(&["sweep", "--tau", "0,0,0,0,0", "--component", "4", "--from", "-1", "--to", "1", "--points", "3"]);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows[0][4], -1.0);
    assert_eq!(rows[2][4], 1.0);
    assert!((rows[1][6] - 1.0).abs() < 1e-9);
    // τ4 alone is symmetric in sign
    assert!((rows[0][6] - rows[2][6]).abs() < 1e-9);
}

#[test]
fn replay_reproduces_outputs_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("synth.csv");
    ok(&["synth", "--tau", REFERENCE, "--seed", "21", "--output", path_str(&first)]);
    let manifest = dir.path().join("synth.csv.manifest.json");
    let second = dir.path().join("again.csv");
    ok(&["replay", path_str(&manifest), "--output", path_str(&second)]);
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());

    let data = first;
    let fit = dir.path().join("fit.json");
    ok(&["fit", path_str(&data), "--restarts", "3", "--mode", "per-input", "--output", path_str(&fit)]);
    let again = dir.path().join("fit_again.json");
    ok(&["replay", path_str(&dir.path().join("fit.json.manifest.json")), "--output", path_str(&again)]);
    assert_eq!(std::fs::read(&fit).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn manifest_goes_to_stderr_without_an_output_file() {
    let out = run(&["qpt", "--tau", "0,0,0,0,0"]);
    let manifest: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(manifest["command"], "qpt");
    assert_eq!(manifest["args"][2], "0,0,0,0,0");
}
