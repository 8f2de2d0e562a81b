use std::fs;

use semisd::cli::{main_with_args, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with_args(std::iter::once("semisd").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("stdout is JSON")
}

#[test]
fn certify_semistable_passes() {
    let (code, out, _) = run(&["certify", "--recipe", "semistable", "--alpha", "1", "--b", "0.5", "--eps", "0.03"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    let v = json(&out);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn invalid_log_periodic_exponent_exits_one() {
    let (code, out, _) = run(&[
        "certify", "--recipe", "semistable", "--alpha", "1.5", "--b", "0.5", "--eps", "0.03", "--check", "validity",
    ]);
    assert_eq!(code, EXIT_FAIL, "{out}");
    assert_eq!(json(&out)["verdict"], "fail");
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = run(&["certify", "--recipe", "no-such-thing"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown recipe"), "{err}");
    assert_eq!(run(&["certify", "--bogus-flag"]).0, EXIT_USAGE);
    assert_eq!(run(&["simulate-ar1", "--recipe", "gaussian"]).0, EXIT_USAGE, "missing --rho");
}

#[test]
fn list_recipes_json() {
    let (code, out, _) = run(&["list-recipes", "--format", "json"]);
    assert_eq!(code, EXIT_PASS);
    let v = json(&out);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert!(names.len() >= 10);
    for want in ["gaussian", "cauchy", "semistable", "pgf-poisson", "variance-gamma"] {
        assert!(names.contains(&want), "{want} missing");
    }
}

#[test]
fn ar1_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    let path = dir.path().join("run.csv");
    for _ in 0..2 {
        let p = path.to_str().unwrap().to_string();
        let (code, out, _) = run(&[
            "simulate-ar1", "--recipe", "gaussian", "--rho", "0.5", "--n", "10000", "--seed", "11", "--output", &p,
        ]);
        assert_eq!(code, EXIT_PASS, "{out}");
        files.push(fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files[0].clone()).unwrap();
    assert!(text.starts_with("# {"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 10_001);
}

#[test]
fn inar_poisson_reports_gof() {
    let (code, out, err) =
        run(&["simulate-inar1", "--recipe", "pgf-poisson", "--lambda", "3", "--rho", "0.4", "--n", "10000"]);
    assert_eq!(code, EXIT_PASS, "{out}{err}");
    let v = json(&out);
    assert!(v["result"]["replicates"][0]["gof"]["p_value"].as_f64().unwrap() > 0.0);
}

#[test]
fn ar1_refuses_marginal_that_fails_certificate() {
    let (code, out, _) = run(&[
        "simulate-ar1", "--recipe", "semistable", "--alpha", "1.5", "--b", "0.5", "--eps", "0.03", "--rho", "0.5",
    ]);
    assert_eq!(code, EXIT_FAIL, "{out}");
    let v = json(&out);
    assert!(v["result"]["error"].as_str().unwrap().starts_with("not-semi-SD-at-rho"));
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"recipe": "semistable", "params": {"alpha": 1.5, "b": 0.5, "eps": 0.03}, "check": "validity"}"#)
        .unwrap();
    let c = cfg.to_str().unwrap();
    let (code, out, _) = run(&["certify", "--config", c]);
    assert_eq!(code, EXIT_FAIL, "{out}");
    // the flag overrides the file's eps, leaving a stable exponent
    let (code, out, _) = run(&["certify", "--config", c, "--eps", "0"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    assert_eq!(json(&out)["config"]["params"]["eps"], 0.0);
    fs::write(&cfg, r#"{"recipe": "gaussian", "no-such-key": 1}"#).unwrap();
    assert_eq!(run(&["certify", "--config", c]).0, EXIT_USAGE);
}

#[test]
fn subordinated_pairing_runs() {
    let (code, out, _) = run(&["simulate-subordinated", "--recipe", "variance-gamma", "--paths", "20000", "--t-grid", "0.5,1"]);
    assert_eq!(code, EXIT_PASS, "{out}");
}

#[test]
fn invert_cauchy_csv() {
    let (code, out, _) = run(&["invert", "--recipe", "cauchy", "--x", "-1,0,1", "--format", "csv"]);
    assert_eq!(code, EXIT_PASS);
    let rows: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (r, want) in rows.iter().zip([0.25, 0.5, 0.75]) {
        assert!((r - want).abs() < 1e-8, "{r} vs {want}");
    }
}
