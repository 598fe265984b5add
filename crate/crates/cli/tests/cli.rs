use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minigraph")).current_dir(dir).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn usage_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["verify", "--suite", "nonsense"],
        vec!["catenoid", "--metric", "klein"],
        vec!["catenoid", "--grid", "4,4"],
        vec!["minimize", "--order", "3"],
        vec!["catenoid", "--workers", "0"],
    ] {
        let o = run(tmp.path(), &args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn build_errors_exit_2_and_name_the_module() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["catenoid", "--c", "0.25"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(tmp.path(), &["radial", "--metric", "euclidean", "--solve-c", "0.1,0.9"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("radialfamily"), "{}", stderr(&o));
    let o = run(tmp.path(), &["radial", "--metric", "hyperbolic", "--c", "-0.1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("radialfamily"), "{}", stderr(&o));
}

#[test]
fn nonconvergence_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["minimize", "--grid", "16,16", "--max-sweeps", "3"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(tmp.path().join("energy_trace.csv").exists());
}

#[test]
fn failing_report_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = r#"[{"name": "x", "lhs": 2.0, "rhs": 1.0, "margin": -1.0, "witness": "w"}]"#;
    let good = r#"[{"name": "x", "lhs": 1.0, "rhs": 2.0, "margin": 1.0, "witness": "w"}]"#;
    fs::write(tmp.path().join("bad.json"), bad).unwrap();
    fs::write(tmp.path().join("good.json"), good).unwrap();
    assert_eq!(run(tmp.path(), &["report", "good.json"]).status.code(), Some(0));
    assert_eq!(run(tmp.path(), &["report", "good.json", "bad.json"]).status.code(), Some(4));
}

#[test]
fn flags_override_config_keys() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("run.cfg"), "# solve only\nmetric = euclidean\nsolve-c = 0.5,0.7\n").unwrap();
    let o = run(tmp.path(), &["--config", "run.cfg", "radial"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let from_cfg = String::from_utf8_lossy(&o.stdout).into_owned();
    let o = run(tmp.path(), &["--config", "run.cfg", "radial", "--solve-c", "0.7,0.5"]);
    let from_flag = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(from_cfg.contains("c = -"), "{from_cfg}");
    assert!(from_flag.contains("c = ") && !from_flag.contains("c = -"), "{from_flag}");

    fs::write(tmp.path().join("bad.cfg"), "metric = sphere\ncolour = red\n").unwrap();
    let o = run(tmp.path(), &["--config", "bad.cfg", "radial"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--deterministic", "catenoid", "--metric", "sphere", "--c", "-0.05", "--s-range", "1,1.6", "--grid", "16,16", "--obj"];
    for d in [&a, &b] {
        let o = run(d.path(), &[&["--out", "o"][..], &args[..]].concat());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let mut names: Vec<_> = fs::read_dir(a.path().join("o")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 4, "{names:?}");
    for n in names {
        let x = fs::read(a.path().join("o").join(&n)).unwrap();
        let y = fs::read(b.path().join("o").join(&n)).unwrap();
        assert!(x == y, "{n:?} differs");
    }
}

#[test]
fn table_metric_matches_builtin() {
    let tmp = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,rho\n");
    for k in 0..=400 {
        let t = 0.5 + 2.0 * k as f64 / 400.0;
        csv.push_str(&format!("{t},{}\n", 2.0 / (1.0 + t * t)));
    }
    fs::write(tmp.path().join("sphere.csv"), csv).unwrap();
    let c = |spec: &str| -> f64 {
        let o = run(tmp.path(), &["radial", "--metric", spec, "--solve-c", "0.6,0.8"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let s = String::from_utf8_lossy(&o.stdout).into_owned();
        s.trim().trim_start_matches("c = ").parse().unwrap()
    };
    let (a, b) = (c("sphere"), c("table:sphere.csv"));
    assert!((a - b).abs() < 1e-6 * a.abs(), "{a} vs {b}");
}
