use std::path::{Path, PathBuf};
use std::process::Command;

use fracboussinesq::solver::{FixedPointReport, PicardOutcome};
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracboussinesq"))
}

fn solver(alpha: f64) -> Value {
    json!({
        "n": 3, "alpha": alpha, "horizon": 0.5, "modes": 8,
        "length": std::f64::consts::TAU, "time_steps": 8,
        "picard_tol": 1e-10, "picard_max_iters": 40, "mode": "finite_horizon"
    })
}

fn solve_config(alpha: f64, fraction: f64) -> Value {
    json!({
        "solver": solver(alpha),
        "constants": {"given": {"k1": 1.5, "k2": 0.004, "k3": 0.005}},
        "data": {"generate": {"band": [1.0, 2.0], "slope": 0.0, "seed": 3,
            "amplitude": {"threshold_fraction": {"fraction": fraction, "velocity_share": 0.5}}}},
        "etd_check": true
    })
}

fn corpus(seeds: &[u64]) -> Value {
    json!({
        "n": 3, "length": std::f64::consts::TAU,
        "bands": [{"name": "low", "range": [1.0, 2.0]}],
        "slope": 0.0, "seeds": seeds, "resolutions": [8]
    })
}

fn write_config(dir: &Path, value: &Value) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

/// Runs `command` and returns the exit code and stderr.
fn run(command: &str, config: &Path, out: &Path, extra: &[&str]) -> (i32, String) {
    let o = bin()
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--threads", "1"])
        .args(extra)
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn read(p: PathBuf) -> String {
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn small_solve_converges_and_matches_etd() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &solve_config(1.0, 0.5));
    let out = dir.path().join("out");
    let (code, err) = run("solve", &cfg, &out, &[]);
    assert_eq!(code, 0, "{err}");
    let report: FixedPointReport = serde_json::from_str(&read(out.join("report.json"))).unwrap();
    assert!(report.converged);
    assert!(report.contraction_factors.iter().all(|&q| q < 1.0));
    let etd: Value = serde_json::from_str(&read(out.join("etd.json"))).unwrap();
    assert_eq!(etd["cross_check"]["within"], Value::Bool(true));
    let series = read(out.join("series.csv"));
    assert_eq!(series.lines().count(), 1 + 9);
    assert!(out.join("final_velocity.snap").exists());
    let manifest: Value = serde_json::from_str(&read(out.join("manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["seeds"], json!([3]));
    assert_eq!(manifest["exit_code"], 0);
}

#[test]
fn report_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = solve_config(1.0, 0.5);
    c["etd_check"] = json!(false);
    let cfg = write_config(dir.path(), &c);
    let out = dir.path().join("out");
    assert_eq!(run("solve", &cfg, &out, &[]).0, 0);
    let text = read(out.join("report.json"));
    let report: FixedPointReport = serde_json::from_str(&text).unwrap();
    let again = fracboussinesq::output::to_json_string(&report).unwrap();
    assert_eq!(text.trim_end(), again.trim_end());
    let back: FixedPointReport = serde_json::from_str(&again).unwrap();
    assert_eq!(back, report);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &solve_config(1.0, 0.25));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("solve", &cfg, &a, &[]).0, 0);
    assert_eq!(run("solve", &cfg, &b, &[]).0, 0);
    let mut names: Vec<_> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 6);
    for n in names {
        let x = std::fs::read(a.join(&n)).unwrap();
        let y = std::fs::read(b.join(&n)).unwrap();
        assert!(x == y, "{n:?} differs");
    }
}

#[test]
fn large_data_exits_three_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = solve_config(1.0, 3000.0);
    c["solver"]["picard_max_iters"] = json!(15);
    let cfg = write_config(dir.path(), &c);
    let out = dir.path().join("out");
    let (code, err) = run("solve", &cfg, &out, &[]);
    assert_eq!(code, 3, "{err}");
    let report: FixedPointReport = serde_json::from_str(&read(out.join("report.json"))).unwrap();
    assert!(!report.converged);
    assert_ne!(report.outcome, PicardOutcome::Converged);
    assert!(out.join("manifest.json").exists());
    assert!(!out.join("series.csv").exists());
}

#[test]
fn inadmissible_alpha_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &solve_config(2.0, 0.5));
    let (code, err) = run("solve", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(code, 2);
    assert!(err.contains("(2+n)/4"), "{err}");
}

#[test]
fn bad_product_exponents_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let c = json!({
        "corpus": corpus(&[1, 2]),
        "audits": [{"kind": "product", "s": 0.5, "s1": 1.0, "s2": 0.75}]
    });
    let cfg = write_config(dir.path(), &c);
    let (code, err) = run("calculus-audit", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn unknown_field_exits_one_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = solve_config(1.0, 0.5);
    c["solver"]["viscosity"] = json!(1.0);
    let cfg = write_config(dir.path(), &c);
    let (code, err) = run("solve", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(code, 1);
    assert!(err.contains("viscosity") && err.contains("solver"), "{err}");

    let mut c = solve_config(1.0, 0.5);
    c["solver"]["modes"] = json!("sixteen");
    let cfg = write_config(dir.path(), &c);
    let (code, err) = run("solve", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(code, 1);
    assert!(err.contains("solver.modes"), "{err}");
}

#[test]
fn argument_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &solve_config(1.0, 0.5));
    let out = dir.path().join("out");
    assert_eq!(run("solve", &cfg, &out, &["--seeds", "1,x"]).0, 1);
    assert_eq!(run("solve", &cfg, &out, &["--seeds", "1,2"]).0, 1);
    assert_eq!(run("solve", &dir.path().join("missing.json"), &out, &[]).0, 1);
    let o = bin().arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn empty_audit_list_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &json!({"corpus": corpus(&[1]), "audits": []}));
    let out = dir.path().join("out");
    assert_eq!(run("calculus-audit", &cfg, &out, &[]).0, 0);
    assert_eq!(
        read(out.join("calculus_samples.csv")),
        "inequality_id,exponents,seed,band,modes,lhs,rhs,ratio\n"
    );
    assert_eq!(read(out.join("calculus_audit.json")).trim(), "[]");
}

#[test]
fn calculus_audit_with_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let c = json!({
        "corpus": corpus(&[1]),
        "audits": [{"kind": "embedding", "s": 0.5}, {"kind": "interpolation", "s_lo": 0.0, "s_mid": 0.5, "s_hi": 2.0}]
    });
    let cfg = write_config(dir.path(), &c);
    let out = dir.path().join("out");
    let (code, err) = run("calculus-audit", &cfg, &out, &["--seeds", "4,5,6"]);
    assert_eq!(code, 0, "{err}");
    let csv = read(out.join("calculus_samples.csv"));
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    let reports: Value = serde_json::from_str(&read(out.join("calculus_audit.json"))).unwrap();
    assert!(reports[1]["max_ratio"].as_f64().unwrap() <= 1.0 + 1e-12);
    let manifest: Value = serde_json::from_str(&read(out.join("manifest.json"))).unwrap();
    assert_eq!(manifest["seeds"], json!([4, 5, 6]));
}

#[test]
fn constants_command_writes_samples() {
    let dir = tempfile::tempdir().unwrap();
    let c = json!({
        "solver": solver(1.0),
        "corpus": {"band": [1.0, 2.0], "slope": 0.0, "seeds": [1, 2, 3], "modes": 8, "time_steps": 8}
    });
    let cfg = write_config(dir.path(), &c);
    let out = dir.path().join("out");
    let (code, err) = run("constants", &cfg, &out, &[]);
    assert_eq!(code, 0, "{err}");
    let report: Value = serde_json::from_str(&read(out.join("constants.json"))).unwrap();
    assert!(report["k1"]["max"].as_f64().unwrap() > 0.0);
    assert_eq!(read(out.join("constants_samples.csv")).lines().count(), 4);
}

#[test]
fn semigroup_audit_runs() {
    let dir = tempfile::tempdir().unwrap();
    let c = json!({
        "corpus": corpus(&[1, 2]),
        "alpha": 1.0, "s": 0.0, "smoothing_orders": [0.5, 1.0],
        "smoothing_window": [1e-3, 10.0], "smoothing_points": 50,
        "horizons": [0.1, 1.0], "time_steps": 16
    });
    let cfg = write_config(dir.path(), &c);
    let out = dir.path().join("out");
    let (code, err) = run("semigroup-audit", &cfg, &out, &[]);
    assert_eq!(code, 0, "{err}");
    let r: Value = serde_json::from_str(&read(out.join("semigroup_audit.json"))).unwrap();
    assert!(r["characterization_error"].as_f64().unwrap() < 1e-12);
    assert!(read(out.join("semigroup_samples.csv")).starts_with("check,seed,band,modes,param,value\n"));
}

#[test]
fn scaling_and_probe_commands() {
    let dir = tempfile::tempdir().unwrap();
    let mut base = solve_config(0.8, 0.5);
    base["solver"]["mode"] = json!("global_scaling");
    let obj = base.as_object_mut().unwrap();
    obj.remove("etd_check");
    let mut s = base.clone();
    s["lambdas"] = json!([2]);
    let cfg = write_config(dir.path(), &s);
    let out = dir.path().join("scaling");
    let (code, err) = run("scaling-check", &cfg, &out, &[]);
    assert_eq!(code, 0, "{err}");
    let r: Value = serde_json::from_str(&read(out.join("scaling.json"))).unwrap();
    let ratio = r[0]["u0_noncritical_ratio"].as_f64().unwrap();
    assert!((ratio - 2f64.sqrt()).abs() < 1e-10);

    let mut p = base;
    p["c_interp"] = json!(1.0);
    p["epsilon"] = json!(0.4);
    let cfg = write_config(dir.path(), &p);
    let out = dir.path().join("probe");
    let (code, err) = run("uniqueness-probe", &cfg, &out, &[]);
    assert_eq!(code, 0, "{err}");
    let r: Value = serde_json::from_str(&read(out.join("probe.json"))).unwrap();
    assert_eq!(r["report"]["window_found"], Value::Bool(true));
    assert_eq!(read(out.join("probe.csv")).lines().count(), 1 + 9);

    let mut bad = p.clone();
    bad["epsilon"] = json!(0.9);
    let cfg = write_config(dir.path(), &bad);
    assert_eq!(run("uniqueness-probe", &cfg, &dir.path().join("bad"), &[]).0, 2);
}

#[test]
fn snapshot_data_source() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = solve_config(1.0, 0.5);
    c["etd_check"] = json!(false);
    let cfg = write_config(dir.path(), &c);
    let first = dir.path().join("first");
    assert_eq!(run("solve", &cfg, &first, &[]).0, 0);
    // Restart from the final state of the first run.
    c["data"] = json!({"snapshots": {"velocity": "first/final_velocity.snap", "theta": "first/final_theta.snap"}});
    let cfg = write_config(dir.path(), &c);
    let (code, err) = run("solve", &cfg, &dir.path().join("second"), &[]);
    assert_eq!(code, 0, "{err}");
    let r: FixedPointReport = serde_json::from_str(&read(dir.path().join("second/report.json"))).unwrap();
    assert!(r.converged);
    assert_eq!(run("solve", &cfg, &dir.path().join("third"), &["--seeds", "1"]).0, 1);
}
