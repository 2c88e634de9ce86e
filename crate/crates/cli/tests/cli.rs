use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bubbletree"));
    c.env_remove("BUBBLETREE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_owned()
}

fn base_config() -> Value {
    json!({ "eps": 0.125, "points": [{"z": [0.0, 0.0], "rho": 0.0}, {"z": [0.125, 0.0], "rho": 0.0}] })
}

fn nested_config() -> Value {
    json!({ "eps": 0.125, "points": [
        {"z": [0.0, 0.0], "rho": 0.0}, {"z": [0.125, 0.0], "rho": 0.0}, {"z": [0.124999, 0.0], "rho": 0.0}
    ] })
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn pipeline_base_case_passes_with_seven_artifacts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.json", &base_config());
    let out = dir.path().join("run");
    let o = run(&["pipeline", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    let stages = report["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 7);
    assert!(stages.iter().all(|s| s["verdict"] == "pass"));
    for s in stages {
        let name = s["artifacts"][0].as_str().unwrap();
        let text = fs::read_to_string(out.join(name)).unwrap();
        serde_json::from_str::<Value>(&text).unwrap();
    }
}

#[test]
fn pipeline_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = run(&["pipeline", "--random-size", "4", "--seed", "21", "--out", out.to_str().unwrap()]);
        assert!(code(&o) == 0 || code(&o) == 2);
    }
    assert_eq!(listing(&a), listing(&b));

    let c = dir.path().join("c");
    let o = bin()
        .env("BUBBLETREE_SEED", "21")
        .args(["pipeline", "--random-size", "4", "--seed", "99", "--out", c.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(code(&o) == 0 || code(&o) == 2);
    assert_eq!(listing(&a), listing(&c));
}

#[test]
fn corrupted_gamma_fails_verification() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.json", &nested_config());
    let out = dir.path().join("run");
    let o = run(&["pipeline", "--config", &cfg, "--out", out.to_str().unwrap(), "--corrupt-gamma"]);
    assert_eq!(code(&o), 2);
    let report: Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    let stages = report["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 2);
    assert_eq!(stages[1]["name"], "verify_association");
    assert_eq!(stages[1]["verdict"], "fail");
    assert!(stages[1]["diagnostic"].as_str().unwrap().contains("(iii)"));
}

#[test]
fn malformed_inputs_exit_3() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&run(&["associate", "--config", bad.to_str().unwrap()])), 3);
    let eps = write(dir.path(), "eps.json", &json!({ "eps": 0.5, "points": [{"z": [0.0, 0.0], "rho": 0.0}] }));
    assert_eq!(code(&run(&["associate", "--config", &eps])), 3);
    assert_eq!(code(&run(&["trees", "enumerate", "--n", "1"])), 3);
    assert_eq!(code(&run(&["no-such-command"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn associate_then_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.json", &nested_config());
    let assoc = dir.path().join("assoc.json");
    assert_eq!(code(&run(&["associate", "--config", &cfg, "--out", assoc.to_str().unwrap()])), 0);
    let o = run(&["verify-association", "--config", &cfg, "--assoc", assoc.to_str().unwrap()]);
    assert_eq!(code(&o), 0);

    let mut a: Value = serde_json::from_slice(&fs::read(&assoc).unwrap()).unwrap();
    let edge = a["point"]["gamma"].as_object().unwrap().keys().next().unwrap().clone();
    a["point"]["gamma"][&edge] = json!([0.0, 0.0]);
    let broken = write(dir.path(), "broken.json", &a);
    assert_eq!(code(&run(&["verify-association", "--config", &cfg, "--assoc", &broken])), 2);
}

#[test]
fn decompose_decorate_and_paths() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.json", &nested_config());
    let assoc = dir.path().join("assoc.json");
    assert_eq!(code(&run(&["associate", "--config", &cfg, "--out", assoc.to_str().unwrap()])), 0);
    let a: Value = serde_json::from_slice(&fs::read(&assoc).unwrap()).unwrap();
    let point = write(dir.path(), "p.json", &a["point"]);
    let params = write(dir.path(), "c.json", &json!({ "theta": 0.125, "tau": 0.5, "alpha": [5e-7, 5e-7] }));

    assert_eq!(code(&run(&["check-membership", "--point", &point, "--params", &params])), 0);
    let tight = write(dir.path(), "tight.json", &json!({ "theta": 0.125, "tau": 0.5, "alpha": [0.1, 0.1] }));
    assert_eq!(code(&run(&["check-membership", "--point", &point, "--params", &tight])), 2);

    let svg = dir.path().join("d.svg");
    let o = run(&["decompose", "--point", &point, "--params", &params, "--svg", svg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(&svg).unwrap().contains("<svg"));

    let o = run(&["decorate", "--point", &point, "--params", &params, "--m", "18"]);
    assert_eq!(code(&o), 0);
    let d: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(d["points"].as_array().unwrap().len(), 18);

    let edge = a["point"]["gamma"].as_object().unwrap().keys().next().unwrap().clone();
    let o = run(&["paths", "--point", &point, "--edge", &edge, "--count", "5", "--seed", "4"]);
    assert_eq!(code(&o), 0);
    let p: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(p["paths"].as_array().unwrap().iter().all(|x| x["within_bound"] == true));
    assert_eq!(o.stdout, run(&["paths", "--point", &point, "--edge", &edge, "--count", "5", "--seed", "4"]).stdout);
}

#[test]
fn bounds_n_reports_m_and_logs() {
    let dir = TempDir::new().unwrap();
    let consts = write(dir.path(), "consts.json", &json!({
        "lambda0": 1.0, "C": 1.0, "q": std::f64::consts::PI, "l": 1.0, "c_iso": 1.0, "M": 1.0, "sigma": 1.0, "k": 2, "c_abs": 12.0
    }));
    let o = run(&["bounds", "N", "--ell", "0", "--A", "1.0", "--delta", "0.5", "--consts", &consts]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let lambda = v["lambda"].as_f64().unwrap();
    assert!((lambda - 7.0 / 4608.0).abs() < 1e-15);
    assert_eq!(v["m"].as_u64().unwrap(), (12.0 / (lambda * lambda)).floor() as u64);
    assert!(v["log10log10N"].as_f64().unwrap() > 0.0);

    let o = run(&["bounds", "N", "--A", "1.0", "--lambda", "1.0", "--consts", &consts]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["m"], 12);
    assert_eq!(v["logLambda"], 12.0);
}

#[test]
fn nets_and_covers() {
    let o = run(&["net", "--space", "sphere", "--gamma", "1.0"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["size"].as_f64().unwrap() <= v["bound"].as_f64().unwrap());

    let dir = TempDir::new().unwrap();
    let two = json!({ "n": 2, "dist": [[0.0, 1.0], [1.0, 0.0]] });
    let one = json!({ "n": 1, "dist": [[0.0]] });
    let family: Vec<Value> = (0..4).map(|k| json!({ "t": 0, "fiber": [0, 1], "values": [k & 1, k >> 1] })).collect();
    let inst = write(dir.path(), "inst.json", &json!({ "t": one, "z": two, "w": two, "family": family }));
    let o = run(&["cover", "--instance", &inst, "--lambda", "1", "--delta", "0.4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["all_covered"], true);
    assert!(v["max_set_diameter"].as_f64().unwrap() < 1.6);

    // 25 isolated points of Z, each with two admissible targets: 2^25 index tuples.
    let n = 25;
    let z: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { 10.0 }).collect()).collect();
    let pos = [0.3, 0.9, 0.6, 0.0, 1.2];
    let w: Vec<Vec<f64>> = pos.iter().map(|a| pos.iter().map(|b| f64::abs(a - b)).collect()).collect();
    let member = json!({ "t": 0, "fiber": (0..n).collect::<Vec<_>>(), "values": vec![2; n] });
    let big = write(
        dir.path(),
        "big.json",
        &json!({ "t": one, "z": { "n": n, "dist": z }, "w": { "n": 5, "dist": w }, "family": [member] }),
    );
    assert_eq!(code(&run(&["cover", "--instance", &big, "--lambda", "1", "--delta", "0.4"])), 4);
}
