use std::path::Path;
use std::process::{Command, Output};

fn oscint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscint")).args(args).output().expect("spawn oscint")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn integrate_csv_columns_and_methods_agree() {
    let o = oscint(&["integrate", "--f", "exp_i:1", "--a", "1", "--b", "1", "--method", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["method", "a", "b", "n", "alpha", "y0", "re", "im", "err_est", "panels", "seconds", "status"]);
    assert_eq!(rows.len(), 3);
    let methods: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(methods, ["representation", "oracle", "riemann"]);
    let vals: Vec<(f64, f64)> = rows.iter().map(|r| (r[6].parse().unwrap(), r[7].parse().unwrap())).collect();
    for v in &vals[1..] {
        assert!((v.0 - vals[0].0).abs() < 1e-9 && (v.1 - vals[0].1).abs() < 1e-9, "{vals:?}");
    }
    assert!(rows.iter().all(|r| r[10].is_empty() && r[11] == "ok"));
}

#[test]
fn negative_lists_parse() {
    let o = oscint(&["integrate", "--f", "gauss:0.5", "--a", "-1,2", "--b", "0.5", "--y0", "-1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&stdout(&o)).1.len(), 2);
}

#[test]
fn identical_flags_give_identical_bytes() {
    let args = ["integrate", "--f", "poly:1,0,2", "--a", "1,3", "--b", "0.5,2", "--format", "json"];
    let first = oscint(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, oscint(&args).stdout);

    let v = ["validate", "--suite", "coefficients,ibp", "--seed", "7"];
    let first = oscint(&v);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, oscint(&v).stdout);
}

#[test]
fn json_carries_schema() {
    let o = oscint(&["integrate", "--f", "zero", "--a", "1", "--b", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "integrate");
    assert_eq!(v["rows"][0]["report"]["value"], serde_json::json!([0.0, 0.0]));

    let o = oscint(&["solve-free", "--f", "mono:0", "--t", "0.3", "--x", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["instance"], "free_particle");

    let o = oscint(&["validate", "--suite", "spaces", "--seed", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
}

#[test]
fn solve_free_plane_wave_matches_closed_form() {
    let o = oscint(&["solve-free", "--f", "exp_i:1", "--t", "0.2,0.5,1", "--x", "-1,0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(
        header,
        ["method", "t", "x", "b", "re_psi", "im_psi", "err_est", "pde_residual", "closed_form_delta", "seconds", "status"]
    );
    assert_eq!(rows.len(), 9);
    for r in &rows {
        let delta: f64 = r[8].parse().unwrap();
        assert!(delta < 1e-6, "{r:?}");
        assert_eq!(r[10], "ok");
    }
}

#[test]
fn out_file_and_config_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", r#"{"integrate": {"f": "exp_i:1", "a": [1], "b": [2], "n": 2}}"#);
    let out = dir.path().join("out.csv");
    let o = oscint(&["--config", &cfg, "--out", out.to_str().unwrap(), "integrate", "--b", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let (_, rows) = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][1..4], ["1", "3", "2"]);
}

#[test]
fn usage_errors_exit_1() {
    let cases: [&[&str]; 5] = [
        &["integrate", "--f", "exp_i:1", "--a", "0", "--b", "1"],
        &["solve-free", "--f", "exp_i:1", "--t", "0,1", "--x", "0"],
        &["integrate", "--f", "nonsense:1", "--a", "1", "--b", "1"],
        &["integrate", "--bogus"],
        &["solve-free", "--instance", "harmonic", "--f", "mono:0", "--t", "1", "--x", "0"],
    ];
    for args in cases {
        let o = oscint(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = oscint(&["solve-free", "--f", "mono:0", "--t", "0", "--x", "0"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("t must be positive"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"bogus": 1}"#);
    assert_eq!(oscint(&["--config", &cfg, "integrate"]).status.code(), Some(1));
}

#[test]
fn budget_exhaustion_exits_2_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tight.json", r#"{"quadrature": {"max_panels": 3}}"#);
    let o = oscint(&["--config", &cfg, "integrate", "--f", "exp_i:1", "--a", "1", "--b", "1", "--method", "oracle"]);
    assert_eq!(o.status.code(), Some(2));
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][11].contains("budget"));
}

#[test]
fn coefficient_table_csv() {
    let o = oscint(&["validate", "--coefficients", "--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["k", "l", "value"]);
    assert_eq!(rows.len(), 16);
    let v: f64 = rows[0][2].parse().unwrap();
    assert_eq!(v, -0.5);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["integrate", "--f", "exp_i:2", "--a", "1,2,4", "--b", "0.5,1"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_oscint")).args(args).env("OSCINT_THREADS", threads).output().unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("4").stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}
