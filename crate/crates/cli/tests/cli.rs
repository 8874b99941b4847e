use std::path::Path;
use std::process::{Command, Output};

use chainlet::harness::{gen_koch, gen_weierstrass_subgraph};
use chainlet::PolyChain;
use serde_json::Value;

fn chainlet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainlet")).args(args).env_remove("CHAINLET_JOBS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn verify_stokes_on_the_unit_square() {
    let dir = tempfile::tempdir().unwrap();
    let chain = path(&dir, "unit_square.json");
    std::fs::write(&chain, PolyChain::unit_cube(2, &[0, 1]).unwrap().to_json()).unwrap();
    let o = chainlet(&["verify", "stokes", "--chain", &chain, "--form", "x_dy", "--tol", "1e-8", "--levels", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = stdout_json(&o);
    assert_eq!(rep["pass"], true);
    let row = &rep["rows"][0];
    assert!((row["lhs"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(row["abs_err"].as_f64().unwrap() <= 2e-8);
}

#[test]
fn natural_norm_of_a_cube_difference() {
    let dir = tempfile::tempdir().unwrap();
    let q = path(&dir, "qdiff_3_5.json");
    assert_eq!(code(&chainlet(&["generate", "qcube", "--level", "3", "--minus-level", "5", "--out", &q])), 0);
    let o = chainlet(&["norm", "natural", "--chain", &q, "--r", "1"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let upper = v["upper"].as_f64().unwrap();
    assert!(upper <= 0.125, "{upper}");
    assert!(v["lower"].as_f64().unwrap() <= upper);
}

#[test]
fn koch_level_zero_is_a_triangle() {
    let o = chainlet(&["generate", "koch", "--level", "0", "--side", "2"]);
    assert_eq!(code(&o), 0);
    let p = PolyChain::from_json(&String::from_utf8_lossy(&o.stdout)).unwrap();
    assert_eq!(p.len(), 3);
    assert!((p.mass() - 6.0).abs() < 1e-15);
}

#[test]
fn generated_chains_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let k = path(&dir, "koch.json");
    let region = path(&dir, "region.json");
    assert_eq!(code(&chainlet(&["generate", "koch", "--level", "3", "--out", &k, "--region-out", &region])), 0);
    let koch = gen_koch::<f64>(3, 1.0).unwrap();
    assert_eq!(PolyChain::from_json(&std::fs::read_to_string(&k).unwrap()).unwrap(), koch.polygon);
    assert_eq!(PolyChain::from_json(&std::fs::read_to_string(&region).unwrap()).unwrap(), koch.region);

    let w = path(&dir, "w.json");
    assert_eq!(code(&chainlet(&["generate", "weierstrass", "--level", "5", "--terms", "3", "--out", &w])), 0);
    let ws = gen_weierstrass_subgraph::<f64>(0.5, 3.0, 3, 5).unwrap();
    assert_eq!(PolyChain::from_json(&std::fs::read_to_string(&w).unwrap()).unwrap(), ws.chain);

    let q = path(&dir, "q.json");
    assert_eq!(code(&chainlet(&["generate", "qcube", "--level", "4", "--n", "3", "--k", "2", "--out", &q])), 0);
    let loaded = PolyChain::from_json(&std::fs::read_to_string(&q).unwrap()).unwrap();
    assert!(loaded.is_dyadic());
    assert_eq!(loaded.to_json(), std::fs::read_to_string(&q).unwrap());
}

#[test]
fn unknown_names_exit_with_two() {
    let o = chainlet(&["verify", "star", "--chain", "no_such_chain", "--form", "dz"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown chain"));
    let o = chainlet(&["integrate", "--chain", "unit_square", "--form", "no_such_form"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown form"));
    assert_eq!(code(&chainlet(&["verify", "star", "--chain", "unit_square3", "--form", "dz", "--levels", "0"])), 2);
    assert_eq!(code(&chainlet(&["verify", "star", "--chain", "unit_square3", "--form", "dz", "--tol", "-1"])), 2);
}

#[test]
fn failed_verification_exits_with_one() {
    let o = chainlet(&["verify", "star", "--chain", "unit_square3", "--form", "x2_dz", "--levels", "3", "--tol", "1e-9"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["pass"], false);
}

#[test]
fn mismatched_certificate_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = chainlet(&["norm", "natural", "--chain", "qcube:2", "--r", "1"]);
    let cert = path(&dir, "cert.json");
    std::fs::write(&cert, stdout_json(&o)["certificate"].to_string()).unwrap();
    let o = chainlet(&["norm", "natural", "--chain", "qcube:3", "--r", "1", "--hint", &cert]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn flat_norm_with_a_koch_region_hint() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, region, diff) = (path(&dir, "a.json"), path(&dir, "b.json"), path(&dir, "c.json"), path(&dir, "d.json"));
    chainlet(&["generate", "koch", "--level", "2", "--out", &a, "--region-out", &region]);
    chainlet(&["generate", "koch", "--level", "3", "--out", &b]);
    let pa = PolyChain::from_json(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let pb = PolyChain::from_json(&std::fs::read_to_string(&b).unwrap()).unwrap();
    std::fs::write(&diff, pb.sub(&pa).unwrap().to_json()).unwrap();
    let o = chainlet(&["norm", "flat", "--chain", &diff, "--hint", &region]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let area = 3.0 * 16.0 * 3f64.sqrt() / 4.0 / 729.0;
    assert!((v["flat_upper"].as_f64().unwrap() - area).abs() < 1e-12);
}

#[test]
fn csv_reports_and_parallelism_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let one = path(&dir, "one.csv");
    let many = path(&dir, "many.csv");
    let args = |out: &str| vec!["verify", "gauss", "--chain", "disk", "--form", "radial1", "--levels", "5", "--out"].into_iter().chain([out]).map(String::from).collect::<Vec<_>>();
    let o1 = Command::new(env!("CARGO_BIN_EXE_chainlet")).args(args(&one)).env("CHAINLET_JOBS", "1").output().unwrap();
    let o2 = Command::new(env!("CARGO_BIN_EXE_chainlet")).args(args(&many)).arg("--jobs").arg("4").env("CHAINLET_JOBS", "bogus").output().unwrap();
    assert_eq!(code(&o1), 0);
    assert_eq!(code(&o2), 0, "the flag wins over the environment: {}", String::from_utf8_lossy(&o2.stderr));
    let (a, b) = (std::fs::read_to_string(&one).unwrap(), std::fs::read_to_string(&many).unwrap());
    assert_eq!(a, b);
    assert!(a.starts_with("level,lhs,rhs,abs_err,rate\n"));
    assert_eq!(a.lines().count(), 6);
    let bad = Command::new(env!("CARGO_BIN_EXE_chainlet")).args(args(&one)).env("CHAINLET_JOBS", "bogus").output().unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn integrate_a_json_form() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(&dir, "xy.json");
    std::fs::write(&f, r#"{"degree": 2, "components": {"1,2": [[1.0, [1, 1]]]}}"#).unwrap();
    assert!(Path::new(&f).is_file());
    let o = chainlet(&["integrate", "--chain", "unit_square", "--form", &f]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!((stdout_json(&o)["value"].as_f64().unwrap() - 0.25).abs() < 1e-14);
}
