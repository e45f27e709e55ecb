//! End-to-end tests of the command-line interface: exit codes, output
//! determinism, and the machine-readable error channel.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(format!(
        "{}/tests/fixtures/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
}

fn conley(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conley"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_json(output: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&output.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad JSON `{text}`: {e}"))
}

#[test]
fn compute_with_verify_succeeds_and_prints_delta() {
    let out = conley(&[
        "compute",
        fixture("triangle.flt").to_str().unwrap(),
        "--verify",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("boundary uvw : vw"));
    assert!(text.contains("generator u 0 0"));
    assert!(text.contains("# chain vw = uw + vu + vw"));
}

#[test]
fn compute_is_byte_deterministic_across_flags() {
    let file = fixture("triangle.flt");
    let file = file.to_str().unwrap();
    let base = conley(&["compute", file]);
    assert_eq!(base.status.code(), Some(0));
    for extra in [&["--no-prune"][..], &["--parallel-grades"][..]] {
        let mut args = vec!["compute", file];
        args.extend_from_slice(extra);
        let other = conley(&args);
        assert_eq!(other.status.code(), Some(0));
        assert_eq!(base.stdout, other.stdout, "flags {extra:?} changed bytes");
    }
    // And across repeated runs.
    let again = conley(&["compute", file]);
    assert_eq!(base.stdout, again.stdout);
}

#[test]
fn validate_reports_broken_complex_with_exit_2() {
    let out = conley(&["validate", fixture("broken.cplx").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let json = stderr_json(&out);
    assert_eq!(json["error"]["kind"], "validate");
    let violations = json["error"]["violations"].as_array().unwrap();
    assert!(violations
        .iter()
        .any(|v| v.as_str().unwrap().contains("d\u{b2}")));
}

#[test]
fn validate_accepts_good_files() {
    for name in ["triangle.flt", "pentagon.flt", "strict.cplx"] {
        let out = conley(&["validate", fixture(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok:"));
    }
}

#[test]
fn oracle_subcommand_prints_its_own_view() {
    let out = conley(&["oracle", fixture("triangle.flt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("boundary uvw : vw"));
    // The oracle's generators carry the uncorrected reduction chains.
    assert!(text.contains("# chain vw = vu + vw"));
}

#[test]
fn usage_error_exits_1() {
    let out = conley(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], "usage");
}

#[test]
fn missing_file_exits_2() {
    let out = conley(&["compute", "no-such-file.flt"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "file");
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("result.cplx");
    let out = conley(&[
        "compute",
        fixture("pentagon.flt").to_str().unwrap(),
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    assert!(written.contains("generator"));
}

#[test]
fn field_override_is_accepted() {
    let out = conley(&[
        "compute",
        fixture("strict.cplx").to_str().unwrap(),
        "--field",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("field 5"));
}

#[test]
fn bench_emits_csv_with_slope() {
    let out = conley(&["bench", "--sizes", "20,40", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("size,generators,seconds\n"));
    assert!(text.contains("# loglog_slope,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn help_prints_to_stdout_and_exits_0() {
    let out = conley(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("compute"));
}
