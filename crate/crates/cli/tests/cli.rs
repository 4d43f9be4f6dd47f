use std::fs;
use std::process::{Command, Output};

fn normwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normwalk")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn census_verify_csv() {
    let o = normwalk(&["census", "--norm", "l1", "--dim", "3", "--kmax", "15", "--verify", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("k,count,method"));
    assert_eq!(lines.nth(1), Some("1,6,recursive"));
    assert_eq!(s.lines().count(), 17);
}

#[test]
fn census_json_has_schema_version() {
    let o = normwalk(&["census", "--dim", "3", "--kmax", "2"]);
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["counts"], serde_json::json!([1, 26, 98]));
}

#[test]
fn transformed_census_shares_counts() {
    let o = normwalk(&["census", "--norm", "l1", "--dim", "3", "--kmax", "6", "--transform", "1,-1,0,0,1,-1,1,-1,1", "--verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["counts"][6], 146);
    let bad = normwalk(&["census", "--norm", "l1", "--dim", "2", "--transform", "2,0,0,1"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn recurrent_dimension_refused() {
    let o = normwalk(&["zero-one", "--beta", "3", "--dim", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("recurrent"));
}

#[test]
fn usage_errors() {
    assert_eq!(normwalk(&["census", "--norm", "l1"]).status.code(), Some(1));
    assert_eq!(normwalk(&["census", "--dim", "3", "--bogus"]).status.code(), Some(1));
    assert_eq!(normwalk(&["census", "--dim", "3", "--norm", "l7"]).status.code(), Some(1));
    assert_eq!(normwalk(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(normwalk(&["--help"]).status.code(), Some(0));
    assert_eq!(normwalk(&["census", "--help"]).status.code(), Some(0));
}

#[test]
fn degenerate_census_needs_override() {
    assert_eq!(normwalk(&["census", "--norm", "scaled_max:2", "--dim", "3", "--kmax", "4"]).status.code(), Some(1));
    let o = normwalk(&["census", "--norm", "scaled_max:2", "--dim", "3", "--kmax", "4", "--allow-degenerate"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["counts"][1], 0);
}

#[test]
fn resource_error_exit_code() {
    let o = normwalk(&["green", "--x", "1,0,0", "--box", "1000"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn green_json_fields() {
    let v = json(&normwalk(&["green", "--x", "0,0,0", "--nmax", "400", "--box", "40"]));
    assert!((v["value"].as_f64().unwrap() - 0.5164).abs() < 1e-3);
    assert_eq!(v["method"], "dp");
    assert!(v["error_bound"].as_f64().unwrap() > 0.0);
    assert_eq!(v["x"], serde_json::json!([0, 0, 0]));
    let mc = json(&normwalk(&["green", "--x", "1,0,0", "--method", "mc", "--replicas", "4000", "--kcut", "24"]));
    assert_eq!(mc["method"], "monte_carlo");
    assert!((mc["value"].as_f64().unwrap() - 0.5164).abs() < 0.06);
}

#[test]
fn out_dir_manifest_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let o = normwalk(&[
        "simulate", "--dim", "3", "--replicas", "20", "--horizon", "500", "--stop-radius", "12", "--seed", "9", "--format", "both",
        "--out", a.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 9);
    for art in manifest["artifacts"].as_array().unwrap() {
        let bytes = fs::read(a.join(art["file"].as_str().unwrap())).unwrap();
        assert_eq!(art["bytes"].as_u64().unwrap() as usize, bytes.len());
        assert_eq!(art["sha256"].as_str().unwrap().len(), 64);
    }
    assert!(fs::read_to_string(a.join("simulate.csv")).unwrap().starts_with("replica,k,count\n"));

    // rerun from the recorded config with a different thread count
    let b = dir.path().join("b");
    let cfg = a.join("run.cfg");
    let o = normwalk(&["simulate", "--config", cfg.to_str().unwrap(), "--threads", "3", "--out", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["simulate.csv", "simulate.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "# census settings\ndim = 3\nkmax = 9\nnorm = l1\n").unwrap();
    let v = json(&normwalk(&["census", "--config", cfg.to_str().unwrap(), "--kmax", "4"]));
    assert_eq!(v["counts"].as_array().unwrap().len(), 5);
    assert_eq!(v["method"], "recursive");
    fs::write(&cfg, "dim = 3\nnot-a-flag = 1\n").unwrap();
    assert_eq!(normwalk(&["census", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn zero_one_small_run() {
    let o = normwalk(&["zero-one", "--dim", "3", "--beta", "4,1", "--replicas", "20", "--horizons", "1e3,1e4", "--format", "both"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("\"stabilized_fraction\""));
    assert!(s.contains("function,replica,horizon,sum"));
}

#[test]
fn invariance_small_run() {
    let o = normwalk(&["invariance", "--dim", "3", "--k-ladder", "4,8", "--replicas", "120", "--permutations", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["zero_fraction"], 0.0);
    assert_eq!(v["ks_sequence"].as_array().unwrap().len(), 1);
}

#[test]
fn jeulin_scenarios() {
    let v = json(&normwalk(&["jeulin", "--scenario", "bernoulli"]));
    assert_eq!(v["detail"]["main"]["prob_finite"], "1/2");
    assert_eq!(v["detail"]["main"]["sum_f_phi"], "diverges");

    let v = json(&normwalk(&["jeulin", "--scenario", "shiga3", "--K", "10,100", "--replicas", "50", "--laplace-replicas", "20000"]));
    assert!(v["z_scores"][0].as_f64().unwrap().abs() < 4.0);
    let bad = normwalk(&["jeulin", "--scenario", "shiga3", "--alpha", "0.7"]);
    assert_eq!(bad.status.code(), Some(1));

    let v = json(&normwalk(&["jeulin", "--scenario", "shiga5", "--K", "4,8", "--replicas", "500"]));
    assert_eq!(v["laplace_targets"].as_array().unwrap().len(), 2);
}
