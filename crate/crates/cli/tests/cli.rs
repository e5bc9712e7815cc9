use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dm-limits"));
    cmd.args(args).env_remove("DM_LIMITS_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dm-limits-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn num(v: &Value, path: &[&str]) -> f64 {
    path.iter().fold(v, |v, k| &v[k]).as_f64().unwrap_or_else(|| panic!("{path:?} in {v}"))
}

#[test]
fn bound_examples() {
    let v = json(&["bound", "baxendale", "--lambda", "0.5", "--K", "10", "--eps", "0.1", "--beta", "1"]);
    assert!((num(&v, &["outputs", "baxendale_bound", "value"]) - 0.97665).abs() < 5e-6);
    assert_eq!(v["command"], "bound baxendale");
    let v = json(&["bound", "pic1", "--lambda", "0", "--K", "7"]);
    assert_eq!(num(&v, &["outputs", "pic1_stationary_mass_lower"]), 1.0);
}

#[test]
fn coupling_threshold_violation_exits_two() {
    let out = run(&["bound", "rosenthal", "--eta", "0.5", "--L", "1", "--eps", "0.5", "--d", "3.9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("= 4"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_flags_exit_one() {
    for args in [
        &["bound", "baxendale", "--lambda", "x"][..],
        &["bound", "nope"],
        &["bound", "baxendale", "--lambda", "0.5"],
        &["mala", "simulate", "--h", "0.05"],
        &["chain", "rate"],
        &["chain", "verify-bivariate", "--builtin", "star", "--n", "3", "--theta", "0.5", "--v", "1,1,1,1",
          "--lambda-prime", "0.5", "--K-prime", "1", "--pairs", "0-1"],
    ] {
        assert_eq!(run(args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let out = run_env(&["bound", "pic1", "--lambda", "0", "--K", "7"], &[("DM_LIMITS_THREADS", "0")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn domain_violations_exit_two() {
    assert_eq!(run(&["bound", "baxendale", "--lambda", "1.5", "--K", "10", "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(run(&["mala", "floor-b", "--n", "1", "--gamma", "0.5", "--G", "0.4"]).status.code(), Some(2));
    assert_eq!(run(&["chain", "rate", "--builtin", "star", "--n", "4", "--theta", "1.2"]).status.code(), Some(2));
}

#[test]
fn malformed_matrix_names_the_row() {
    let bad_json = scratch("bad.json");
    std::fs::write(&bad_json, r#"{"labels":["a","b"],"P":[[0.5,0.5],[0.3,0.6]]}"#).unwrap();
    let bad_csv = scratch("bad.csv");
    std::fs::write(&bad_csv, "a,b\n0.5,0.5\n0.3,0.6\n").unwrap();
    for f in [&bad_json, &bad_csv] {
        let out = run(&["chain", "rate", "--file", f.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&out.stderr).contains("row 1"));
    }
}

#[test]
fn chain_examples() {
    let v = json(&["chain", "rate", "--builtin", "star", "--n", "4", "--theta", "0.6"]);
    assert!((num(&v, &["outputs", "true_rate", "rate"]) - 0.6).abs() < 1e-9);
    let v = json(&["chain", "epsc", "--builtin", "cycle", "--n", "5", "--set", "0,1,2"]);
    assert_eq!(num(&v, &["outputs", "epsilon_c", "epsilon"]), 0.0);
    let v = json(&["chain", "verify-a", "--builtin", "figure1", "--lambda", "0.5", "--K", "10", "--eps", "0.19"]);
    assert_eq!(v["outputs"]["verify_a"]["status"], "holds");
    let v = json(&["chain", "m0", "--builtin", "cycle", "--n", "7"]);
    assert_eq!(v["outputs"]["min_majority_cardinality"], 4);
    let v = json(&["chain", "m1", "--builtin", "cycle", "--n", "7"]);
    assert_eq!(v["outputs"]["max_degree"], 2);
}

#[test]
fn exported_chain_reloads_with_identical_results() {
    let builtin = ["--builtin", "star", "--n", "3", "--theta", "0.35"];
    for ext in ["json", "csv"] {
        let path = scratch(&format!("star.{ext}"));
        let p = path.to_str().unwrap();
        let mut load = vec!["chain", "load"];
        load.extend(builtin);
        load.extend(["--out", p]);
        json(&load);
        for action in [&["stationary"][..], &["rate"], &["epsc", "--set", "0,2"], &["m0"], &["m1"], &["floor-a"], &["floor-b"]] {
            let mut a = vec!["chain"];
            a.extend(action);
            let mut b = a.clone();
            a.extend(builtin);
            b.extend(["--file", p]);
            assert_eq!(json(&a)["outputs"], json(&b)["outputs"], "{ext} {action:?}");
        }
    }
}

#[test]
fn reports_are_deterministic_and_sorted() {
    let args = ["mala", "simulate", "--dim", "2", "--h", "0.1", "--steps", "20000", "--seed", "3"];
    assert_eq!(stdout(&args), stdout(&args));
    let table = ["mala", "table", "--gamma", "0.5", "--gamma-prime", "1", "--G", "0.4", "--n-list", "100,1000,10000"];
    let serial = run_env(&table, &[("DM_LIMITS_THREADS", "1")]);
    assert_eq!(serial.stdout, stdout(&table).into_bytes());
    let text = stdout(&["bound", "baxendale", "--lambda", "0.5", "--K", "10", "--eps", "0.1"]);
    let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("K") < pos("beta") && pos("beta") < pos("eps") && pos("eps") < pos("lambda"));
    assert!(pos("command") < pos("inputs") && pos("inputs") < pos("outputs") && pos("outputs") < pos("warnings"));
    assert!(text.contains("\"value\": 0.976650474338\n"), "{text}");
}

#[test]
fn gaussian_commands() {
    let v = json(&["gaussian", "floor", "--n", "10"]);
    assert!((num(&v, &["outputs", "rho_star_lower", "value"]) - 0.922).abs() < 0.003);
    let v = json(&["gaussian", "optimize", "--n", "10", "--k", "100"]);
    let b = num(&v, &["outputs", "optimize_baxendale", "bound", "value"]);
    assert!((0.999..=0.99993).contains(&b));
    let csv = stdout(&["gaussian", "curve", "--n-list", "5,10,20,50,100", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,rho_n_star,rosenthal_side_lower,baxendale_optimum"));
    let floors: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(floors.len(), 5);
    assert!(floors.windows(2).all(|w| w[1] >= w[0]), "{floors:?}");
}

#[test]
fn mala_commands() {
    let csv = stdout(&[
        "mala", "table", "--gamma", "0.5", "--gamma-prime", "1", "--G", "0.4", "--M", "1", "--n-list",
        "100,1000,10000,100000", "--format", "csv",
    ]);
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["n", "floor_a", "floor_b", "scaled_gap_a", "scaled_gap_b"]);
    assert!(rows.iter().all(|r| r.len() == 5));
    let last: Vec<f64> = rows[1..].iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(last[1..].windows(2).all(|w| w[1] < w[0]), "{last:?}");

    let v = json(&["mala", "floor-b", "--n", "10000", "--gamma", "0.5", "--G", "0.4", "--M", "1"]);
    let f = num(&v, &["outputs", "rho_opt_lower_b", "value"]);
    assert!(f > 0.99998 && f < 1.0, "{f}");

    let v = json(&["mala", "simulate", "--dim", "1", "--h", "0.05", "--steps", "1000000", "--seed", "7"]);
    let s = &v["outputs"]["simulate"];
    assert_eq!(s["n_steps"], 1_000_000);
    assert!(num(s, &["mean"]).abs() < 0.02);
    assert!((num(s, &["variance"]) - 1.0).abs() < 0.03);
    assert!(num(s, &["ks_stat"]) < 0.01);
    assert!(num(s, &["accept_rate"]) > 0.9);
}
