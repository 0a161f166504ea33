mod common;

use er_maxcorr::cli::{run, EXIT_OK, EXIT_PARSE, EXIT_VALIDATION};
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let full = std::iter::once("er-maxcorr").chain(args.iter().copied());
    let code = run(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn help_and_version_exit_cleanly() {
    for flag in ["--help", "--version"] {
        let (code, out, _) = invoke(&[flag]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("er-maxcorr"), "{out}");
    }
    assert_eq!(invoke(&[]).0, EXIT_PARSE);
}

#[test]
fn example_accepts_negative_and_complex_alpha() {
    let (code, out, _) = invoke(&[
        "example",
        "--x",
        "0.5",
        "--alpha-re",
        "-0.25",
        "--alpha-im",
        "0.0",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["lambda"].as_f64(), Some(0.75));

    let (code, out, _) = invoke(&[
        "example",
        "--x",
        "0.5",
        "--alpha-re",
        "0.0",
        "--alpha-im",
        "-0.5",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["er_closed_form"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn bits_rescale_entropies() {
    let (_, nats, _) = invoke(&["example", "--x", "0.3", "--alpha-re", "0.2"]);
    let (_, bits, _) = invoke(&["example", "--x", "0.3", "--alpha-re", "0.2", "--bits"]);
    let (nats, bits): (Value, Value) = (
        serde_json::from_str(&nats).unwrap(),
        serde_json::from_str(&bits).unwrap(),
    );
    assert_eq!(bits["units"], "bits");
    for key in ["er_closed_form", "diagonal_entropy", "sigma_entropy"] {
        let ratio = nats[key].as_f64().unwrap() / bits[key].as_f64().unwrap();
        assert!((ratio - 2f64.ln()).abs() < 1e-14, "{key}");
    }
    assert_eq!(nats["lambda"], bits["lambda"]);
}

#[test]
fn out_of_range_example_is_a_validation_error() {
    for args in [
        ["example", "--x", "1.5", "--alpha-re", "0.0"],
        ["example", "--x", "0.5", "--alpha-re", "0.6"],
    ] {
        let (code, out, err) = invoke(&args);
        assert_eq!(code, EXIT_VALIDATION, "{out}{err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn validation_failures_report_diagnostics() {
    let path = common::golden_dir().join("not_psd.json");
    let (code, out, err) = invoke(&["compute", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_VALIDATION, "{err}");
    assert!(out.is_empty());
    assert!(err.contains("pairwise bound violated at (0, 1)"), "{err}");
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("extra.json");
    std::fs::write(
        &path,
        r#"{"kind":"coefficients","n":1,"matrix":[[[1,0]]],"extra":1}"#,
    )
    .unwrap();
    assert_eq!(invoke(&["compute", path.to_str().unwrap()]).0, EXIT_PARSE);
}
