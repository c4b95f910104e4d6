use std::process::Command;

use plpoly_cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("plpoly").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> serde_json::Value {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn coeffs_json_and_csv() {
    let (code, out, _) = call(&["coeffs", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "{\"n\":3,\"coeffs\":[\"0\",\"3\",\"2\",\"1\"]}\n");
    let (_, csv, _) = call(&["coeffs", "--n", "2", "--format", "csv"]);
    assert_eq!(csv, "k,coefficient\n0,0\n1,2\n2,1\n");
}

#[test]
fn classify_r2() {
    assert_eq!(json(&["phase", "classify", "--x", "-0.9+0i"])["label"], "R2");
    assert_eq!(json(&["phase", "classify", "--x", "0.5+0.2i"])["label"], "R1");
}

#[test]
fn factorization_audit_passes() {
    let v = json(&["verify", "factorization", "--samples", "100", "--seed", "7"]);
    assert_eq!(v["samples"], 100);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn refusals_exit_one() {
    assert_eq!(call(&["asym", "--n", "200", "--x", "-0.9+0i", "--region", "r1"]).0, 1);
    assert_eq!(call(&["eval", "--n", "3", "--x", "1+2j"]).0, 1);
    assert_eq!(call(&["eval", "--n", "3", "--x", "nan+0i"]).0, 1);
    assert_eq!(call(&["asym", "--n", "10", "--x", "-0.5+0.1i", "--region", "osc"]).0, 1);
    assert_eq!(call(&["nonsense"]).0, 1);
    assert_eq!(call(&["zeros", "--n", "5", "predict", "--n", "5"]).0, 1);
}

#[test]
fn help_names_formulas() {
    let (code, out, _) = call(&["coeffs", "--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("a_j(x) = sum_{d | j} (j/d)^2 x^d"));
    let (_, out, _) = call(&["asym", "--help"]);
    assert!(out.contains("(2 Li3(x^m))^{1/3}"));
    assert_eq!(call(&["--version"]).0, 0);
}

#[test]
fn eval_precision_flag_wins() {
    let v = json(&["eval", "--n", "20", "--x", "-0.5+0.2i", "--precision", "64"]);
    assert_eq!(v["precision_bits"], 64);
    let w = json(&["eval", "--n", "20", "--x", "-0.5+0.2i"]);
    let re = |v: &serde_json::Value| v["value"][0].as_f64().unwrap();
    assert!((re(&v) - re(&w)).abs() <= 1e-12 * re(&w).abs().max(1.0));
}

#[test]
fn constants_match_reference() {
    let v = json(&["phase", "constants"]);
    assert!((v["x_star"].as_f64().unwrap() + 0.825_003_052_9).abs() < 1e-8);
    assert!((v["theta_star_over_pi"].as_f64().unwrap() - 0.951_703_125_1).abs() < 1e-6);
}

#[test]
fn zeros_csv_and_prediction() {
    let (code, out, _) = call(&["zeros", "--n", "6"]);
    assert_eq!(code, 0);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "re,im,residual");
    assert_eq!(lines.len(), 1 + 6);
    let v = json(&["zeros", "predict", "--n", "100"]);
    assert!(!v["predicted"].as_array().unwrap().is_empty());
    assert!(v.get("matching").is_none());
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("plpoly-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("q4.json");
    let (code, out, _) = call(&["coeffs", "--n", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("{\"n\":4,"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn output_is_independent_of_thread_count() {
    let grid = ["grid", "--n", "30", "--resolution", "9", "--radius", "0.9"];
    let one: Vec<_> = ["--jobs", "1"].iter().chain(grid.iter()).copied().collect();
    let four: Vec<_> = ["--jobs", "4"].iter().chain(grid.iter()).copied().collect();
    let a = call(&one);
    let b = call(&four);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let d1 = call(&["--jobs", "1", "verify", "dominance", "--samples", "200", "--seed", "3"]);
    let d4 = call(&["--jobs", "4", "verify", "dominance", "--samples", "200", "--seed", "3"]);
    assert_eq!(d1.1, d4.1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_plpoly");
    let ok = Command::new(bin).args(["phase", "classify", "--x", "-0.9+0i"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), "{\"label\":\"R2\"}");
    let bad = Command::new(bin).args(["eval", "--n", "3", "--x", "x"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
    let env = Command::new(bin)
        .env("PLPOLY_PRECISION_BITS", "80")
        .args(["eval", "--n", "5", "--x", "0.5"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(v["precision_bits"], 80);
}
