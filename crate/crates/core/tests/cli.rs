use std::io::Write;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::NamedTempFile;

fn chermite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chermite"))
        .args(args)
        .env_remove("HERMITE_MAX_ORDER")
        .output()
        .expect("binary runs")
}

fn json_file(v: &Value) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    write!(f, "{v}").unwrap();
    f
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn eval_prints_value() {
    let o = chermite(&[
        "eval", "--m", "2", "--n", "2", "--x", "1", "--y", "1", "--z", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o), json!({"value": {"re": 7.0, "im": 0.0}}));
}

#[test]
fn negative_and_complex_flags() {
    let o = chermite(&[
        "eval", "--m", "2", "--n", "0", "--x", "-1.5", "--y", "0", "--z", "2-1i",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o), json!({"value": {"re": 2.25, "im": 0.0}}));
}

#[test]
fn verify_pde_passes() {
    let o = chermite(&["verify", "pde", "--max-degree", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 169);
    for line in text.lines() {
        assert_eq!(
            serde_json::from_str::<Value>(line).unwrap()["status"],
            "pass"
        );
    }
}

#[test]
fn verify_output_is_deterministic() {
    let a = chermite(&[
        "verify",
        "scaling",
        "--max-degree",
        "6",
        "--seed",
        "42",
        "--samples",
        "4",
    ]);
    let b = chermite(&[
        "verify",
        "scaling",
        "--max-degree",
        "6",
        "--seed",
        "42",
        "--samples",
        "4",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = chermite(&[
        "verify",
        "addition",
        "--max-degree",
        "2",
        "--k",
        "2",
        "--samples",
        "2",
        "--seed",
        "7",
    ]);
    let d = chermite(&[
        "verify",
        "addition",
        "--max-degree",
        "2",
        "--k",
        "2",
        "--samples",
        "2",
        "--seed",
        "7",
    ]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn every_identity_subcommand_runs() {
    for args in [
        &["verify", "nielsen-lin", "--max-degree", "4"][..],
        &["verify", "nielsen-prod", "--max-degree", "4"],
        &["verify", "duality", "--max-degree", "4"],
        &["verify", "fourvar", "--max-degree", "3"],
        &["verify", "inversion", "--max-degree", "4"],
        &["verify", "operator", "--max-degree", "4"],
    ] {
        let o = chermite(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
    }
}

#[test]
fn kernel_reports_series_and_closed_form() {
    let f = json_file(
        &json!({"x1": 0.5, "y1": 0.5, "z1": 0.5, "x2": 0.5, "y2": 0.5, "z2": 0.5, "s": 0.4, "t": 0.4}),
    );
    let o = chermite(&["kernel", "mehler", "--params", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["kernel"], "mehler");
    assert_eq!(v["converged"], true);
    assert_eq!(v["within_tol"], true);
    assert!(v["value"]["re"].as_f64().is_some());
    assert!(v["order_used"].as_u64().unwrap() <= 60);
}

#[test]
fn kernel_accepts_string_and_object_complex_values() {
    let f = json_file(
        &json!({"k": 1, "x": "0.1+0.2i", "y": {"re": -0.3, "im": 0.1}, "z": 0.5,
                              "u": "0.4", "v": "-0.2i", "s": 0.3, "t": "0.25"}),
    );
    let o = chermite(&[
        "kernel",
        "mixed-shifted",
        "--params",
        f.path().to_str().unwrap(),
        "--tol",
        "1e-8",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn kernel_outside_domain_exits_3() {
    let f = json_file(
        &json!({"x1": 0.1, "y1": 0.1, "z1": 2.0, "x2": 0.1, "y2": 0.1, "z2": 2.0, "s": 0.5, "t": 0.5}),
    );
    let o = chermite(&["kernel", "mehler", "--params", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn kernel_not_converged_exits_2() {
    let f = json_file(&json!({"u": 0.5, "v": 0.5, "t": 0.2}));
    let o = chermite(&[
        "kernel",
        "classical-mehler",
        "--params",
        f.path().to_str().unwrap(),
        "--max-order",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout_json(&o)["converged"], false);
}

#[test]
fn max_order_env_caps_flag() {
    let f = json_file(&json!({"u": 0.5, "v": 0.5, "t": 0.2}));
    let path = f.path().to_str().unwrap();
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_chermite"))
            .args([
                "kernel",
                "classical-mehler",
                "--params",
                path,
                "--max-order",
                "500",
            ])
            .env("HERMITE_MAX_ORDER", cap)
            .output()
            .unwrap()
    };
    let capped = run("4");
    assert_eq!(capped.status.code(), Some(2));
    assert_eq!(stdout_json(&capped)["order_used"], 4);
    assert_eq!(run("200").status.code(), Some(0));
    assert_eq!(run("lots").status.code(), Some(1));
}

#[test]
fn kernel_malformed_params_exit_1() {
    let f = json_file(&json!({"u": 0.5, "t": 0.2}));
    let o = chermite(&["kernel", "weisner", "--params", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = chermite(&["kernel", "genfn", "--params", "/nonexistent/params.json"]);
    assert_eq!(o.status.code(), Some(1));
    let mut bad = NamedTempFile::new().unwrap();
    write!(bad, "{{not json").unwrap();
    let o = chermite(&["kernel", "genfn", "--params", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = chermite(&[
        "kernel",
        "genfn",
        "--params",
        f.path().to_str().unwrap(),
        "--tol",
        "-1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn expand_round_trip() {
    let f = json_file(&json!({"max_degree": 4, "entries": [
        {"m": 1, "n": 1, "p": 0, "coeff": "1"},
        {"m": 0, "n": 0, "p": 1, "coeff": "1"},
        {"m": 2, "n": 0, "p": 0, "coeff": "-3/2"}]}));
    let o = chermite(&["expand", "--input", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout_json(&o),
        json!({"max_degree": 4, "coeffs": [{"m": 1, "n": 1, "coeff": "1"}, {"m": 2, "n": 0, "coeff": "-3/2"}]})
    );
    let o = Command::new(env!("CARGO_BIN_EXE_chermite"))
        .args([
            "--format",
            "csv",
            "expand",
            "--input",
            f.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "m,n,coeff\n1,1,1\n2,0,-3/2\n"
    );
}

#[test]
fn expand_float_tensor() {
    let f = json_file(&json!({"max_degree": 2, "entries": [
        {"m": 1, "n": 1, "p": 0, "coeff": {"re": 0.5, "im": 1.0}},
        {"m": 0, "n": 0, "p": 1, "coeff": "0.5+1i"}]}));
    let o = chermite(&["expand", "--input", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout_json(&o)["coeffs"],
        json!([{"m": 1, "n": 1, "coeff": {"re": 0.5, "im": 1.0}}])
    );
}

#[test]
fn expand_rejects_non_solutions() {
    let f =
        json_file(&json!({"max_degree": 2, "entries": [{"m": 0, "n": 0, "p": 1, "coeff": "1"}]}));
    let o = chermite(&["expand", "--input", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("(0, 0, 1)"), "{err}");
    let f =
        json_file(&json!({"max_degree": 1, "entries": [{"m": 0, "n": 0, "p": 1, "coeff": "1"}]}));
    assert_eq!(
        chermite(&["expand", "--input", f.path().to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(chermite(&[]).status.code(), Some(1));
    assert_eq!(chermite(&["verify", "nonsense"]).status.code(), Some(1));
    assert_eq!(
        chermite(&["eval", "--m", "1", "--n", "1", "--x", "1", "--y", "1", "--z", "nan"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        chermite(&["--format", "xml", "coeffs", "--m", "0", "--n", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(chermite(&["--version"]).status.code(), Some(0));
}
