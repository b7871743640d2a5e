use std::path::{Path, PathBuf};
use std::process::Command;

use cmc1face::export::AnalysisReport;
use cmc1face_cli::{run, EXIT_INVALID, EXIT_OK};

fn call(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cmc1face").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scene(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const CATENOID: &str = r#"{"data": {"example": "catenoid", "params": {"mu": 0.8}}, "grid": {"nu": 30, "nv": 30, "curve_resolution": 60}}"#;

#[test]
fn osserman_catenoid_equality_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = scene(dir.path(), "c.json", CATENOID);
    let (code, out, _) = call(&["osserman", s(&p)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim_end(), "2·1 ≥ 2 : EQUALITY (all ends regular, embedded)");
}

#[test]
fn monodromy_prints_eigenvalues_and_residual() {
    let dir = tempfile::tempdir().unwrap();
    let p = scene(dir.path(), "c.json", CATENOID);
    let (code, out, _) = call(&["monodromy", s(&p), "--end", "0"]);
    assert_eq!(code, EXIT_OK);
    // -e^{±0.8πi} = e^{1.8πi}, e^{0.2πi}
    assert!(out.contains("exp(0.200000000000 pi i)"), "{out}");
    assert!(out.contains("exp(1.800000000000 pi i)"), "{out}");
    assert!(out.contains("class: elliptic"));
    assert!(out.contains("su(1,1) residual"));
    assert!(out.contains("phi = [["));
}

#[test]
fn analyze_horosphere_marks_umbilic() {
    let dir = tempfile::tempdir().unwrap();
    let p = scene(dir.path(), "h.json", r#"{"data": {"example": "horosphere"}, "grid": {"nu": 5, "nv": 5}}"#);
    let report = dir.path().join("r.json");
    let (code, _, err) = call(&["analyze", s(&p), "--report", s(&report)]);
    assert_eq!(code, EXIT_OK, "{err}");
    let r = AnalysisReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(r.markers.iter().any(|m| m == "UmbilicSurface"));
    assert_eq!(r.osserman.per_end.len(), 1);
}

#[test]
fn analyze_to_stdout_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = scene(dir.path(), "c.json", CATENOID);
    let (code, out, _) = call(&["analyze", s(&p)]);
    assert_eq!(code, EXIT_OK);
    let r = AnalysisReport::from_json(&out).unwrap();
    assert_eq!(r.osserman.per_end.len(), 2);
    assert_eq!(r.osserman.equality, Some(true));
}

#[test]
fn generate_writes_identical_files_twice() {
    let dir = tempfile::tempdir().unwrap();
    let p = scene(dir.path(), "c.json", CATENOID);
    let files = |tag: &str| {
        let (m, c) = (dir.path().join(format!("m{tag}.obj")), dir.path().join(format!("c{tag}.obj")));
        let (code, _, err) = call(&["generate", s(&p), "--out-mesh", s(&m), "--out-curves", s(&c)]);
        assert_eq!(code, EXIT_OK, "{err}");
        (std::fs::read(m).unwrap(), std::fs::read(c).unwrap())
    };
    let a = files("a");
    let b = files("b");
    assert_eq!(a, b);
    let mesh = String::from_utf8(a.0).unwrap();
    assert_eq!(mesh.lines().filter(|l| l.starts_with("v ")).count(), 900);
    assert!(mesh.lines().any(|l| l.starts_with("# scene sha256 ")));
}

#[test]
fn generate_needs_an_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = scene(dir.path(), "c.json", CATENOID);
    assert_eq!(call(&["generate", s(&p)]).0, EXIT_INVALID);
}

#[test]
fn validation_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = scene(dir.path(), "b.json", r#"{"data": {"example": "catenoid"}, "grid": {"nu": 1}}"#);
    let (code, _, err) = call(&["osserman", s(&bad)]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("grid.nu"), "{err}");

    let unknown = scene(dir.path(), "u.json", "{\"data\": {\"example\": \"catenoid\"},\n \"colour\": 1}");
    let (code, _, err) = call(&["osserman", s(&unknown)]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("line 2"), "{err}");

    let p = scene(dir.path(), "c.json", CATENOID);
    assert_eq!(call(&["monodromy", s(&p), "--end", "2"]).0, EXIT_INVALID);
    assert_eq!(call(&["osserman", "/no/such/scene.json"]).0, EXIT_INVALID);
    assert_eq!(call(&["frobnicate"]).0, EXIT_INVALID);
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = scene(dir.path(), "c.json", CATENOID);
    let (code, _, _) = call(&["generate", s(&p), "--out-curves", "/no/such/dir/c.obj"]);
    assert_eq!(code, cmc1face_cli::EXIT_NUMERIC);
}

#[test]
fn examples_lists_catalogue() {
    let (code, out, _) = call(&["examples"]);
    assert_eq!(code, EXIT_OK);
    for name in ["horosphere", "enneper", "helicoid", "catenoid"] {
        assert!(out.lines().any(|l| l.starts_with(name)), "{out}");
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_cmc1face");
    let dir = tempfile::tempdir().unwrap();
    let p = scene(dir.path(), "c.json", CATENOID);
    let ok = Command::new(bin).args(["osserman", s(&p)]).env("CMC1FACE_THREADS", "2").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("EQUALITY"));
    let bad = Command::new(bin).args(["osserman", "/no/such.json"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
}
