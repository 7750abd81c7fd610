use std::path::Path;
use std::process::{Command, Output};

use lorentz_covers::report::Report;

fn cli(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lorentz-covers"))
        .env_remove("LORENTZ_COVERS_OUT_DIR")
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn report(path: &Path) -> Report {
    Report::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL_CONE: &[&str] = &["verify", "cone", "--samples", "200"];

#[test]
fn list_prints_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "cone-cover-closure"));
    assert!(text.lines().any(|l| l == "sphere-trapped"));
}

#[test]
fn builtins_pass_and_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["sphere-trapped", "criterion-lines", "criterion-punctured-plane"] {
        let out = cli(dir.path(), &["run", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(report(&dir.path().join(format!("{name}.json"))).passed());
    }
}

#[test]
fn failed_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["--expect", "inner_trapped=false", "verify", "sphere", "--grid", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL inner_trapped"));
    assert!(!report(&dir.path().join("sphere-trapped.json")).passed());
}

#[test]
fn diagram_request_for_sphere_exits_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["--svg", "verify", "sphere", "--grid", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_lorentz-covers"))
        .env("LORENTZ_COVERS_OUT_DIR", dir.path())
        .args(["--svg"])
        .args(SMALL_CONE)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("cone-cover-closure.json").exists());
    let svg = std::fs::read_to_string(dir.path().join("cone-cover-closure.svg")).unwrap();
    assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn reruns_agree_except_for_wall_clock() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert_eq!(cli(dir.path(), SMALL_CONE).status.code(), Some(0));
    }
    let path = |d: &tempfile::TempDir| d.path().join("cone-cover-closure.json");
    assert_eq!(report(&path(&a)).payload(), report(&path(&b)).payload());
}

#[test]
fn flags_override_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.toml");
    std::fs::write(&file, "name = \"mine\"\n[target.sphere]\nn = 3\nradius = 2.0\ngrid = 3\n").unwrap();
    let out = cli(dir.path(), &["verify", "sphere", "--scenario", file.to_str().unwrap(), "--radius", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&dir.path().join("mine.json"));
    // (n - 2) / R with n from the file and R from the flag.
    let k = r.value("closed_form_k_minus").unwrap().as_f64().unwrap();
    assert!((k - 0.25).abs() < 1e-12, "{k}");
}

#[test]
fn unknown_builtin_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(dir.path(), &["run", "no-such-scenario"]).status.code(), Some(2));
}
