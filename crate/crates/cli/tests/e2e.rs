use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn spec(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bundlesec")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn temp(contents: &[u8]) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(contents).unwrap();
    f
}

const MISSING: &str = "/nonexistent/bundlesec/input.bundle";

#[test]
fn abelianize_exit_codes() {
    assert_eq!(code(&["abelianize", &spec("klein_bottle.pres")]), 0);
    assert_eq!(code(&["abelianize", MISSING]), 2);
    let bad = temp(b"<x, y | x y z>");
    assert_eq!(code(&["abelianize", bad.path().to_str().unwrap()]), 3);
    let syntax = temp(b"<x, y | x ^ >");
    assert_eq!(code(&["abelianize", syntax.path().to_str().unwrap()]), 3);
}

#[test]
fn abelianize_text() {
    let out = run(&["abelianize", &spec("klein_bottle.pres")]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Z + Z/2"));
    let out = run(&["abelianize", &spec("torus.pres")]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Z^2"));
}

#[test]
fn parse_errors_carry_a_location() {
    let bad = temp(b"<x, y |\n  x y z>");
    let out = run(&["abelianize", bad.path().to_str().unwrap()]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn split_check_exit_codes() {
    assert_eq!(code(&["split-check", &spec("flat_kb.bundle")]), 0);
    assert_eq!(code(&["split-check", &spec("product_torus.bundle")]), 0);
    assert_eq!(code(&["split-check", MISSING]), 2);
    let bad = temp(b"[base]\n<u, v | [u,v>\n[fibre]\ntorus 1\n[action]\nu: 1\nv: 1\n");
    assert_eq!(code(&["split-check", bad.path().to_str().unwrap()]), 3);
    let malformed = temp(b"[base]\n<u, v | [u,v]>\n[fibre]\ntorus 2\n[action]\nu: 1 0 ; 0 1\n");
    assert_eq!(code(&["split-check", malformed.path().to_str().unwrap()]), 4);
}

#[test]
fn cohomology_exit_codes() {
    assert_eq!(code(&["cohomology", &spec("flat_action.bundle")]), 0);
    assert_eq!(code(&["cohomology", MISSING]), 2);
    let bad = temp(b"[base]\n<u, v | [u,v]>\n[fibre]\ntorus 1\n[action]\nu: one\nv: 1\n");
    assert_eq!(code(&["cohomology", bad.path().to_str().unwrap()]), 3);
    let malformed = temp(b"[base]\n<u, v | [u,v]>\n[fibre]\ntorus 1\n");
    assert_eq!(code(&["cohomology", malformed.path().to_str().unwrap()]), 4);
}

#[test]
fn transgress_and_endo_exit_codes() {
    assert_eq!(code(&["transgress", "--k", "0"]), 0);
    assert_eq!(code(&["transgress", "--range", "-2..2"]), 0);
    assert_eq!(code(&["transgress", "--range", "two..three"]), 1);
    assert_eq!(code(&["transgress"]), 1);
    assert_eq!(code(&["endo"]), 0);
    assert_eq!(code(&["no-such-command"]), 1);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let cases: Vec<Vec<String>> = vec![
        vec!["--json".into(), "split-check".into(), spec("nil_kb.bundle")],
        vec!["split-check".into(), spec("heisenberg_torus.bundle")],
        vec!["--json".into(), "abelianize".into(), spec("flat_kb.bundle")],
        vec!["--json".into(), "cohomology".into(), spec("flat_action.bundle")],
        vec!["--json".into(), "transgress".into(), "--range".into(), "-3..3".into()],
        vec!["--json".into(), "endo".into()],
        vec!["endo".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (run(&args), run(&args));
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn parallel_batch_matches_sequential() {
    let files: Vec<String> = ["flat_kb.bundle", "nil_kb.bundle", "product_torus.bundle", "heisenberg_torus.bundle", "endo_jacobian.bundle"]
        .iter()
        .map(|f| spec(f))
        .collect();
    for fmt in ["--json", "--text"] {
        let mut seq = vec![fmt, "split-check", "--jobs", "1"];
        seq.extend(files.iter().map(String::as_str));
        let mut par = vec![fmt, "split-check", "--jobs", "4"];
        par.extend(files.iter().map(String::as_str));
        let (a, b) = (run(&seq), run(&par));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn json_reports_carry_schema_version() {
    let out = run(&["--json", "split-check", &spec("heisenberg_torus.bundle")]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "split-check");
    assert_eq!(v["verdict"], "NO_SECTION");
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let out = run(&["--json", "split-check", &spec("flat_kb.bundle"), &spec("product_torus.bundle")]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert_eq!(arr[1]["verdict"], "SPLITS");
}

#[test]
fn json_and_text_are_exclusive() {
    assert_eq!(code(&["--json", "--text", "endo"]), 1);
}

#[test]
fn non_utf8_input_is_a_parse_error() {
    let bad = temp(&[0xff, 0xfe, 0x00]);
    assert_eq!(code(&["abelianize", bad.path().to_str().unwrap()]), 3);
}
