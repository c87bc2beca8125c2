use std::path::{Path, PathBuf};
use std::process::Command;

use chern_cli::{cmd_decompose, cmd_eval, cmd_verify, without_timing, CheckKind, CliError, EvalTarget, VerifyConfig};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn chern(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_chern")).args(args).output().unwrap()
}

/// Coefficient lines `basis monomial re im` of one section of the output.
fn section<'a>(out: &'a str, header: &str) -> Vec<Vec<&'a str>> {
    out.lines()
        .skip_while(|l| !l.starts_with(header))
        .skip(1)
        .take_while(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().collect())
        .collect()
}

fn value(line: &[&str]) -> (f64, f64) {
    let im = line[3].trim_end_matches('i');
    (line[2].parse().unwrap(), im.parse().unwrap())
}

#[test]
fn bc2_of_sigma_f_file() {
    // sigma = |z1|^2, f = z1: bc2 = ½(dσ∧∂̄σ + 2e^{−σ} dz1∧dz̄1) = (1 − ½|z1|² + ...) dz1∧dz̄1
    let out = cmd_eval(&data("sigma_f.metric"), EvalTarget::Bc(2), false).unwrap();
    let lines = section(&out, "# bc:2");
    assert_eq!(lines.len(), 2, "{out}");
    assert_eq!((lines[0][0], lines[0][1]), ("dz1^dzb1", "1"));
    assert_eq!(value(&lines[0]), (1.0, 0.0));
    assert_eq!(lines[1][1], "z1*zb1");
    assert!((value(&lines[1]).0 + 0.5).abs() < 1e-15);
    assert!(section(&out, "# omega_20").iter().all(|l| l == &["0"]));
}

#[test]
fn ch1_of_gaussian_line_bundle() {
    let out = cmd_eval(&data("gaussian.metric"), EvalTarget::Ch(1), false).unwrap();
    let lines = section(&out, "# ch:1");
    assert_eq!(lines.len(), 1, "{out}");
    assert_eq!(value(&lines[0]), (-1.0, 0.0));

    // physical units multiply by sqrt(-1)/2pi
    let out = cmd_eval(&data("gaussian.metric"), EvalTarget::Ch(1), true).unwrap();
    let (re, im) = value(&section(&out, "# ch:1")[0]);
    assert!(re.abs() < 1e-15 && (im + 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
}

#[test]
fn targets_parse() {
    for (s, t) in [("ch:3", EvalTarget::Ch(3)), ("bc:2", EvalTarget::Bc(2)), ("cs:4", EvalTarget::Cs(4)), ("cocycle", EvalTarget::Cocycle)] {
        assert_eq!(s.parse::<EvalTarget>().unwrap(), t);
        assert_eq!(t.to_string(), s);
    }
    for bad in ["ch:0", "bc:4", "cs:6", "ch", "foo:1"] {
        assert!(bad.parse::<EvalTarget>().is_err(), "{bad}");
    }
}

#[test]
fn low_order_file_is_rejected_with_the_needed_order() {
    let path = scratch("low_order.metric", "dim = 2\nrank = 1\norder = 1\nh[1][1] = exp(z1*conj(z1))\n");
    match cmd_eval(&path, EvalTarget::Ch(1), false) {
        Err(CliError::InsufficientOrder { required, available, .. }) => assert_eq!((required, available), (2, 1)),
        other => panic!("{other:?}"),
    }
    let err = cmd_eval(&path, EvalTarget::Bc(3), false).unwrap_err();
    assert!(err.to_string().contains("order >= 2"), "{err}");
}

#[test]
fn parse_errors_carry_positions() {
    let path = scratch("broken.metric", "dim = 1\nrank = 1\norder = 2\nh[1][1] = exp(z1 *)\n");
    let err = cmd_decompose(&path).unwrap_err();
    assert!(err.to_string().contains(":4:19:"), "{err}");
}

#[test]
fn decompose_diagonal_file() {
    let out = cmd_decompose(&data("diagonal.metric")).unwrap();
    assert!(out.contains("a[1]") && out.contains("a[2]"));
    // b is the identity for a diagonal metric
    let entry = |name: &str| -> Vec<&str> {
        out.lines().skip_while(|l| *l != name).skip(1).take_while(|l| l.starts_with(' ')).map(str::trim).collect()
    };
    assert_eq!(entry("b[1][2]"), ["0"], "{out}");
    assert_eq!(entry("b[2][1]"), ["0"], "{out}");
    assert_eq!(entry("b[1][1]").len(), 1);
    assert!(entry("b[1][1]")[0].starts_with("1 "), "{out}");
}

#[test]
fn gauge_file_evaluates_cocycle() {
    let out = cmd_eval(&data("gauge.metric"), EvalTarget::Cocycle, false).unwrap();
    assert!(out.starts_with("# cocycle"), "{out}");
}

#[test]
fn verify_selection_is_reproducible() {
    let mut config = VerifyConfig::default();
    config.checks = vec![CheckKind::Bc1, CheckKind::Positivity];
    config.samples = 3;
    let (code, a) = cmd_verify(&config).unwrap();
    let (_, b) = cmd_verify(&config).unwrap();
    assert_eq!(code, 0);
    assert_eq!(a.checks.len(), 6);
    assert_eq!(without_timing(&a.to_json()).unwrap(), without_timing(&b.to_json()).unwrap());

    config.seed = 43;
    let (_, c) = cmd_verify(&config).unwrap();
    assert_ne!(without_timing(&a.to_json()).unwrap(), without_timing(&c.to_json()).unwrap());
}

#[test]
fn binary_exit_codes() {
    let ok = chern(&["verify", "--checks", "bc1", "--samples", "2"]);
    assert_eq!(ok.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(json["summary"]["passed"], 2);

    // the literal cocycle statement does not hold, so this run reports failures
    let failing = chern(&["verify", "--checks", "cocycle", "--samples", "1"]);
    assert_eq!(failing.status.code(), Some(1));

    let tight = chern(&["verify", "--checks", "bc1", "--samples", "1", "--tol", "bc1=1e-300"]);
    assert_eq!(tight.status.code(), Some(1));

    for args in [&["verify", "--checks", "nope"][..], &["verify", "--tol", "bc1"], &["eval", "--metric", "/nonexistent", "--target", "ch:1"]] {
        let out = chern(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}
