//! Runs every example binary and checks a line of its output.

use std::path::PathBuf;
use std::process::Command;

/// `cargo test` builds examples next to `deps/`, where this binary lives.
fn example_path(name: &str) -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    profile_dir.join("examples").join(format!("{name}{}", std::env::consts::EXE_SUFFIX))
}

fn run(name: &str) -> String {
    let path = example_path(name);
    assert!(path.exists(), "{} not built; run `cargo build --examples` or the full `cargo test`", path.display());
    let out = Command::new(&path).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        out.status.success(),
        "{name} failed:\n{stdout}\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout
}

#[test]
fn geometry_basics() {
    assert!(run("geometry_basics").contains("width of a 2 x 1 rectangle: 1 "));
}

#[test]
fn check_conditions() {
    let out = run("check_conditions");
    assert!(out.contains("half-plane Width") && out.contains("segment    Width"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("segment    Width") && l.ends_with("holds = false")), "{out}");
}

#[test]
fn dual_basis() {
    assert_eq!(run("dual_basis").lines().filter(|l| l.starts_with("thickness")).count(), 4);
}

#[test]
fn extend_atom() {
    let out = run("extend_atom");
    assert_eq!(out.matches("vanish: true").count(), 3, "{out}");
    assert!(out.contains("segment at p = 2/3: width condition violated at atom"), "{out}");
}

#[test]
fn hp_norm() {
    assert!(run("hp_norm").contains("far-field slope -4.0"));
}

#[test]
fn necessity() {
    assert!(run("necessity").contains("lower bounds increasing: true"));
}

#[test]
fn lipschitz_witness() {
    assert!(run("lipschitz_witness").contains("on the segment: 0.000e0"));
}
