use std::process::{Command, Output};

use serde_json::Value;

fn lrn(args: &[&str]) -> Output {
    lrn_env(args, &[])
}

fn lrn_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lrn"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run lrn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

const SMALL: [&str; 9] = ["--height", "2000", "--sexp", "1", "--yrange", "2000", "--value-max", "1000000", "--format"];

#[test]
fn oracle_csv_matches_fixture() {
    let o = lrn(&["oracle", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), include_str!("fixtures/solutions_1e10.csv"));
}

#[test]
fn oracle_json_shape() {
    let o = lrn(&["oracle", "--max", "100", "--nmax", "30"]);
    let v = json(&o);
    assert_eq!(v["solutions"].as_array().unwrap().len(), 1);
    assert_eq!(v["solutions"][0]["x"], 8);
    assert_eq!(v["solutions"][0]["aliases"], Value::Array(vec![]));
}

#[test]
fn solve_small_bounds_csv() {
    let mut args = vec!["solve"];
    args.extend(SMALL);
    args.push("csv");
    let o = lrn(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("x,y,delta,lambda,k,l,m,n\n"));
    assert!(out.contains("\n38,5,0,1,0,2,0,5\n"));
    assert!(out.contains("\n5220,307,0,1,1,2,1,3\n"));
}

#[test]
fn worker_count_does_not_change_output() {
    let mut args = vec!["solve", "--nmax", "8"];
    args.extend(SMALL);
    args.push("json");
    let one = lrn_env(&args, &[("LRN_WORKERS", "1")]);
    let four = lrn_env(&args, &[("LRN_WORKERS", "4")]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let mut seq = args.clone();
    seq.push("--sequential");
    assert_eq!(lrn(&seq).stdout, one.stdout);
    let v = json(&one);
    assert_eq!(v["oracle"]["agrees"], true);
}

#[test]
fn exit_codes() {
    // Budget exceeded.
    let o = lrn(&["solve", "--budget", "10", "--no-oracle"]);
    assert_eq!(o.status.code(), Some(1));
    // Invalid configurations.
    assert_eq!(lrn(&["solve", "--nmax", "2"]).status.code(), Some(2));
    assert_eq!(lrn(&["solve", "--fix", "k=1"]).status.code(), Some(2));
    assert_eq!(lrn(&["solve", "--basis", "7,17"]).status.code(), Some(2));
    assert_eq!(lrn(&["solve", "--basis", "15"]).status.code(), Some(2));
    assert_eq!(lrn(&["solve", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(lrn(&["classnum", "12"]).status.code(), Some(2));
    assert_eq!(lrn(&["lehmer", "seq", "4", "-4", "6"]).status.code(), Some(2));
    assert_eq!(lrn_env(&["classnum", "5"], &[("LRN_WORKERS", "zero")]).status.code(), Some(2));
}

#[test]
fn curves_counts() {
    for (case, count) in [("mod3", 648), ("mod4", 192), ("p5", 220), ("p7", 216)] {
        let v = json(&lrn(&["curves", "--case", case]));
        assert_eq!(v["count"], count, "{case}");
        assert_eq!(v["curves"].as_array().unwrap().len(), count);
    }
    let csv = stdout(&lrn(&["curves", "--case", "mod4", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 193);
}

#[test]
fn points_from_curve_json() {
    let curve = r#"{"kind":"quartic_ljunggren","coefficients":{"lambda":1,"c":1681},"denominator_primes":[]}"#;
    let o = lrn(&["points", "--curve", curve, "--height", "1000", "--yrange", "1000", "--sexp", "0"]);
    assert!(o.status.success());
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines.iter().any(|p| p["x_num"] == 840 && p["y_num"] == 29));
    let bad = lrn(&["points", "--curve", r#"{"kind":"cubic","coefficients":{"c2":0,"c1":0,"c0":0}}"#]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn lehmer_subcommands() {
    let seq = stdout(&lrn(&["lehmer", "seq", "1", "5", "6"]));
    let values: Vec<i64> = seq.lines().map(|l| serde_json::from_str::<Value>(l).unwrap()["value"].as_i64().unwrap()).collect();
    assert_eq!(values, vec![1, 1, 2, 3, 5, 8]);
    let prim = stdout(&lrn(&["lehmer", "primdiv", "5", "-7", "13"]));
    assert!(prim.lines().any(|l| {
        let v: Value = serde_json::from_str(l).unwrap();
        v["prime"] == 911 && v["is_primitive"] == true
    }));
}

#[test]
fn classnum_and_verify() {
    assert_eq!(json(&lrn(&["classnum", "1003"]))["h"], 4);
    assert_eq!(json(&lrn(&["classnum", "41123"]))["h"], 72);
    let ok = json(&lrn(&["verify", "38", "5", "0", "0", "2", "0", "5"]));
    assert_eq!(ok["valid"], true);
    let bad = json(&lrn(&["verify", "1", "1", "1", "0", "0", "0", "5"]));
    assert_eq!(bad["valid"], false);
    let big = json(&lrn(&["verify", "9", "5", "3", "0", "1", "1", "4"]));
    assert_eq!(big["valid"], false);
}
