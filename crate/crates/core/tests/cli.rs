use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hardy_ext::counterexamples::{cantor_dust_domain, unit_cell};
use hardy_ext::extension::{patterns, PAtom, RationalP};
use hardy_ext::geometry::{whitney_decompose, DomainModel};
use serde_json::Value;
use tempfile::TempDir;

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy-ext"))
        .args(args)
        .env_remove("HARDY_EXT_THREADS")
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
    domain: DomainModel,
}

impl Fixture {
    fn cantor() -> Self {
        let dir = TempDir::new().unwrap();
        let domain = cantor_dust_domain(2, 3, &[unit_cell(2)]).unwrap();
        std::fs::write(dir.path().join("domain.json"), serde_json::to_string(&domain.to_spec()).unwrap()).unwrap();
        Fixture { dir, domain }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// A 2x2-cell atom on a mid-sized Whitney cube.
    fn write_atom(&self, p: RationalP, values: Vec<f64>) -> PathBuf {
        let dec = whitney_decompose(&self.domain, self.domain.bounding_box(), 5).unwrap();
        let w = dec.cubes.iter().find(|w| w.cube.side == 0.0625).unwrap();
        let atom = PAtom { p, support: w.cube.clone(), subdivisions: 2, values };
        let path = self.path("atom.json");
        std::fs::write(&path, serde_json::to_string(&atom).unwrap()).unwrap();
        path
    }
}

#[test]
fn distance_and_width() {
    let fx = Fixture::cantor();
    let out = hardy(&["distance", "--spec", s(&fx.path("domain.json")), "--point", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    let d = v["result"]["distance"].as_f64().unwrap();
    // the nearest dust points to the center are the corners (1/3 or 2/3, 1/3 or 2/3)
    assert!((d - 2f64.sqrt() / 6.0).abs() < 1e-12, "{d}");

    let pts = fx.path("pts.json");
    std::fs::write(&pts, "[[0,0],[2,0],[2,1],[0,1],[1,0.5]]").unwrap();
    let out = hardy(&["width", "--points", s(&pts)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!((stdout_json(&out)["result"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn whitney_report_lists_cubes() {
    let fx = Fixture::cantor();
    let report = fx.path("whitney.json");
    let out = hardy(&["whitney", "--spec", s(&fx.path("domain.json")), "--depth", "4", "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let cubes = v["result"]["cubes"].as_array().unwrap();
    assert!(!cubes.is_empty());
    for c in cubes {
        let side = c["cube"]["side"].as_f64().unwrap();
        let dist = c["dist_to_complement"].as_f64().unwrap();
        let diam = side * 2f64.sqrt();
        assert!(dist >= diam * (1.0 - 1e-9) && dist <= 4.0 * diam * (1.0 + 1e-9));
    }
}

#[test]
fn check_domain_dichotomy_and_exit_codes() {
    let fx = Fixture::cantor();
    let spec = fx.path("domain.json");
    let out = hardy(&["check-domain", "--spec", s(&spec), "--kind", "width", "--a", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert!(v["result"]["reports"][0]["inf_ratio"].as_f64().unwrap() > 0.05);

    let out = hardy(&["check-domain", "--spec", s(&spec), "--kind", "measure"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    let reports = v["result"]["reports"].as_array().unwrap();
    // default sweep over a = 2, 4, 8
    assert_eq!(reports.len(), 3);
    for r in reports {
        assert_eq!(r["inf_ratio"].as_f64().unwrap(), 0.0);
        assert!(r["caveats"].as_array().unwrap().iter().any(|c| c == "measure-zero representation"));
    }

    let out = hardy(&["check-domain", "--spec", s(&spec), "--kind", "markov", "--a", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn extend_verify_and_norm_pipeline() {
    let fx = Fixture::cantor();
    let atom = fx.write_atom(RationalP::new(2, 3).unwrap(), patterns::checkerboard(2, 2, 1.0));
    let dist = fx.path("dist.json");
    let out = hardy(&[
        "extend-atom", "--spec", s(&fx.path("domain.json")), "--atom", s(&atom), "--p", "2/3", "--a", "2", "--out", s(&dist),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["result"]["case"]["case"], "special");

    let out = hardy(&["verify-moments", "--dist", s(&dist), "--order", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["result"]["pass"], true);

    let norm = fx.path("norm.json");
    let out = hardy(&["hp-norm", "--dist", s(&dist), "--p", "2/3", "--grid-pitch", "0.125", "--R", "16", "--out", s(&norm)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&norm).unwrap()).unwrap();
    let est = v["result"]["estimate"]["estimate"].as_f64().unwrap();
    assert!(est.is_finite() && est > 0.0);
    let csv = std::fs::read_to_string(fx.path("norm.histogram.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("log2_t,count"));
    let total: usize = lines.map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total as u64, v["result"]["estimate"]["grid_points"].as_u64().unwrap());

    let out = hardy(&["hp-norm", "--dist", s(&dist), "--p", "1/2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn measure_violation_exits_two() {
    let fx = Fixture::cantor();
    let atom = fx.write_atom(RationalP::new(2, 3).unwrap(), patterns::checkerboard(2, 2, 1.0));
    let out = hardy(&["extend-atom", "--spec", s(&fx.path("domain.json")), "--atom", s(&atom), "--p", "1/1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("measure condition violated at atom"), "{}", stderr(&out));
}

#[test]
fn moment_failure_exits_two() {
    let fx = Fixture::cantor();
    let atom = fx.write_atom(RationalP::new(2, 3).unwrap(), vec![1.0, 0.5, 0.25, 1.0]);
    let dist = fx.path("dist.json");
    let out = hardy(&["extend-atom", "--spec", s(&fx.path("domain.json")), "--atom", s(&atom), "--out", s(&dist)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    // drop the Dirac masses: the function part alone has a nonzero mean
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&dist).unwrap()).unwrap();
    v["dirac_terms"] = Value::Array(Vec::new());
    std::fs::write(&dist, v.to_string()).unwrap();
    let out = hardy(&["verify-moments", "--dist", s(&dist)]);
    assert_eq!(out.status.code(), Some(2));
    let out = hardy(&["hp-norm", "--dist", s(&dist)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not an H^p candidate"));
}

#[test]
fn usage_and_input_errors_exit_one() {
    let fx = Fixture::cantor();
    assert_eq!(hardy(&["distance", "--spec", "/no/such/file.json", "--point", "0,0"]).status.code(), Some(1));
    assert_eq!(hardy(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(hardy(&["check-domain", "--spec", s(&fx.path("domain.json")), "--a", "0.5"]).status.code(), Some(1));
    assert_eq!(hardy(&["counterexample", "--which", "segment", "--p", "3/2"]).status.code(), Some(1));

    let bad = fx.path("bad.json");
    std::fs::write(&bad, "{\"ambient_dim\": 2,\n \"bounding_box\": {\"min\": [0, 0], \"side\": 1},\n \"complement\": {\"type\": \"cloud\", \"data\": 7}}").unwrap();
    let out = hardy(&["distance", "--spec", s(&bad), "--point", "0,0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("schema error") && err.contains("line 3"), "{err}");

    let out = hardy(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("demo-cantor"));
}

#[test]
fn counterexample_tables() {
    let fx = Fixture::cantor();
    let csv = fx.path("table.csv");
    let out = hardy(&["counterexample", "--which", "segment", "--p", "2/3", "--j-max", "4", "--out", s(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,a_j,eps_j,lip_seminorm,pairing,lower_bound"));
    let bounds: Vec<f64> = lines.map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert_eq!(bounds.len(), 4);
    assert!(bounds.windows(2).all(|w| w[1] > w[0]), "{bounds:?}");

    let out = hardy(&["counterexample", "--which", "cantor", "--p", "2/3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no failing scale found"));
}

#[test]
fn reports_are_deterministic_and_self_describing() {
    let fx = Fixture::cantor();
    let spec = fx.path("domain.json");
    let args = ["check-domain", "--spec", s(&spec), "--kind", "width", "--depth", "4"];
    let first = hardy(&args);
    let second = Command::new(env!("CARGO_BIN_EXE_hardy-ext"))
        .args(args)
        .env("HARDY_EXT_THREADS", "1")
        .output()
        .unwrap();
    let (mut a, mut b) = (stdout_json(&first), stdout_json(&second));
    assert_eq!(a["config"]["threads"], Value::Null);
    assert_eq!(b["config"]["threads"], 1);
    a["config"]["threads"] = Value::Null;
    b["config"]["threads"] = Value::Null;
    assert_eq!(a, b);
    assert_eq!(hardy(&args).stdout, first.stdout);

    assert_eq!(a["version"], hardy_ext::VERSION);
    let cfg = &a["config"]["command"];
    assert_eq!(cfg["name"], "check-domain");
    assert_eq!(cfg["kind"], "width");
    assert_eq!(cfg["delta"], 0.05);
    assert_eq!(cfg["depth"], 4);
}

#[test]
fn demo_cantor_passes() {
    let out = hardy(&["demo-cantor", "--n", "2", "--level", "4", "--p", "2/3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    let atoms = v["result"]["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 10);
    assert!(atoms.iter().all(|a| a["moments_pass"] == true));
    assert!(v["result"]["width_check"]["verdict"].as_bool().unwrap());
}
