use serde_json::Value;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("nilspec").chain(args.iter().copied());
    let code = nilspec::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn spectrum_block_rows() {
    let (code, out, _) = run(&["spectrum", "--n", "1", "--p", "1", "--k", "1", "--gamma-max", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "gamma,eigenvalue,residual,catalog_family,catalog_g,catalog_r");
    let zero: Vec<f64> = lines
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|c| c[0] == "0")
        .map(|c| c[1].parse().unwrap())
        .collect();
    assert_eq!(zero.len(), 2);
    assert!((zero[0] - 2.0).abs() < 1e-12 && (zero[1] - 4.0).abs() < 1e-12);

    let v = json(&["spectrum", "--n", "2", "--p", "1", "--k", "0.5", "--gamma-max", "4"]);
    assert_eq!(v["clean"], Value::Bool(true));
}

#[test]
fn ns_reports_closed_exponent() {
    let v = json(&["ns", "--group", "heisenberg", "--n", "1", "--p", "0"]);
    assert_eq!(v["alpha_closed"].as_f64().unwrap(), 2.0);
    assert!((v["alpha_hat"].as_f64().unwrap() - 2.0).abs() < 0.1);
    for key in ["alpha_hat", "stderr", "alpha_closed", "config"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let (code, out, _) = run(&["ns", "--group", "dgroup", "--n", "1", "--p", "1", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("t,theta,local_slope\n"));
    assert_eq!(out.lines().count(), 26);
}

#[test]
fn verify_exit_codes() {
    let (code, _, err) = run(&["verify", "--suite", "appendixA", "--n", "2", "--p", "2", "--k", "1"]);
    assert_eq!(code, 0, "{err}");
    let v = json(&["verify", "--suite", "dgroup", "--n", "1"]);
    assert_eq!(v["passed"], Value::Bool(true));
    let (code, _, err) = run(&["verify", "--suite", "nonsense"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: kind=input "));
}

#[test]
fn argument_errors_are_one_line() {
    for args in [
        vec!["spectrum", "--n", "1", "--bogus"],
        vec!["spectrum", "--n", "0", "--p", "0", "--k", "1"],
        vec!["spectrum", "--p", "0", "--k", "1"],
        vec!["spectrum", "--n", "1", "--p", "4", "--k", "1"],
        vec!["ns", "--group", "dgroup", "--n", "1", "--p", "2"],
        vec!["ns", "--group", "heisenberg", "--n", "1", "--p", "0", "--tail-tol", "0.1"],
        vec!["dgroup", "--n", "1", "--lambda1", "0", "--lambda2", "0"],
        vec!["--workers", "0", "dgroup", "--n", "1"],
        vec!["--config", "/nonexistent/config.json", "dgroup", "--n", "1"],
    ] {
        let (code, out, err) = run(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with("error: kind="), "{err}");
    }
}

#[test]
fn computation_failure_exits_one() {
    // Far from the asymptotic regime the slope drifts and the fit refuses.
    let (code, _, err) = run(&["ns", "--group", "heisenberg", "--n", "1", "--p", "0", "--t-min", "0.001", "--t-max", "0.1", "--t-points", "12"]);
    assert_eq!(code, 1, "{err}");
    assert!(err.starts_with("error: kind=fit "), "{err}");
}

#[test]
fn config_precedence_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 1, "p": 1, "k": 2.0, "gamma-max": 1, "format": "csv"}"#).unwrap();
    let out = dir.path().join("out.csv");
    let cfg_s = cfg.to_str().unwrap();
    let (code, stdout, _) = run(&["--config", cfg_s, "--output", out.to_str().unwrap(), "spectrum", "--k", "1"]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    // k from the flag (1), everything else from the file.
    assert!(text.starts_with("gamma,"));
    assert!(text.contains("\n0,2.0000000000000000e0,"));
    assert!(!text.contains("\n2,"));
    let (_, j, _) = run(&["--config", cfg_s, "--format", "json", "spectrum"]);
    let v: Value = serde_json::from_str(&j).unwrap();
    assert_eq!(v["config"]["k"].as_f64().unwrap(), 2.0);
}

#[test]
fn identical_jobs_give_identical_bytes() {
    for args in [
        vec!["spectrum", "--n", "2", "--p", "2", "--k", "1", "--gamma-max", "3"],
        vec!["ns", "--group", "heisenberg", "--n", "2", "--p", "2"],
        vec!["dgroup", "--n", "1", "--format", "csv"],
    ] {
        let a = run(&args).1;
        let mut with_workers = vec!["--workers", "3"];
        with_workers.extend(&args);
        let b = run(&with_workers).1;
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }
}

#[test]
fn sweep_over_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(&cfg, r#"{"command": "ns", "group": "heisenberg", "grid": {"n": [1, 2], "p": [0, 1]}}"#).unwrap();
    let v = json(&["--config", cfg.to_str().unwrap(), "sweep"]);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 4);
    for r in runs {
        let closed = r["result"]["alpha_closed"].as_f64().unwrap();
        let hat = r["result"]["alpha_hat"].as_f64().unwrap();
        assert!((hat - closed).abs() / closed < 0.05);
    }
    std::fs::write(&cfg, r#"{"command": "spectrum", "grid": {"n": [1]}}"#).unwrap();
    let (code, _, err) = run(&["--config", cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_nilspec");
    let ok = Command::new(bin).args(["spectrum", "--n", "1", "--p", "0", "--k", "1", "--gamma-max", "1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["spectrum", "--n"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&bad.stderr).lines().count(), 1);
}
