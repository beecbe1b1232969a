use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_young-calculus"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let v: Value = serde_json::from_str(&stdout(args)).unwrap();
    assert_eq!(v["schema"], "1");
    v
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn transition_of_two_one() {
    let v = json(&["transition", "--partition", "2,1"]);
    let atoms: Vec<[String; 2]> = serde_json::from_value(v["atoms"].clone()).unwrap();
    let expected = [["-2", "3/8"], ["0", "1/4"], ["2", "3/8"]];
    assert_eq!(atoms.len(), 3);
    for (a, e) in atoms.iter().zip(expected) {
        assert_eq!([a[0].as_str(), a[1].as_str()], e);
    }
    assert_eq!(v["moments"][1], "3");
    assert_eq!(stdout(&["transition", "--partition", "2,1", "--format", "csv"]), "x,mass\n-2,3/8\n0,1/4\n2,3/8\n");
}

#[test]
fn limit_shape_contains_four_over_pi() {
    let csv = stdout(&["limit-shape", "--c", "0", "--grid", "5"]);
    let row = csv.lines().find(|l| l.starts_with("0,")).expect("u = 0 on the grid");
    let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 4.0 / std::f64::consts::PI).abs() < 1e-11);
}

#[test]
fn limit_shape_goldens_are_byte_identical() {
    for c in ["0", "0.5", "1", "2"] {
        let expected = std::fs::read_to_string(golden(&format!("limit_shape_c{c}.csv"))).unwrap();
        assert_eq!(expected.lines().count(), 2049);
        assert_eq!(stdout(&["limit-shape", "--c", c]), expected, "c = {c}");
    }
}

#[test]
fn factorization_of_tensor_trace() {
    let v = json(&["factorization", "--q", "6", "--N", "3", "--order", "3"]);
    assert_eq!(v["delta"], 0.0);
    assert_eq!(v["delta_is_zero"], true);
}

#[test]
fn weights_and_decomposition_agree() {
    let a = stdout(&["weights", "--q", "5", "--N", "3"]);
    let b = stdout(&["decompose", "--q", "5", "--state", "tensor:3"]);
    assert_eq!(a, b);
    assert!(stdout(&["weights", "--q", "2", "--N", "2"]).contains("\"2\",3/4"));
}

#[test]
fn character_is_exact() {
    let v = json(&["character", "--partition", "2,1", "--cycle-type", "3"]);
    assert_eq!(v["normalized"], "-1/2");
    assert_eq!(v["character"], "-1");
}

#[test]
fn samples_are_reproducible() {
    let args = ["sample", "--q", "30", "--N", "4", "--count", "20", "--seed", "7"];
    assert_eq!(stdout(&args), stdout(&args));
    let default_seed = stdout(&["sample", "--q", "30", "--N", "4", "--count", "20"]);
    assert_eq!(default_seed, stdout(&["sample", "--q", "30", "--N", "4", "--count", "20", "--seed", "42"]));
    assert_ne!(default_seed, stdout(&args));
}

#[test]
fn concentration_outputs() {
    let args = ["concentration", "--q", "12", "--N", "3", "--l", "2", "--count", "50"];
    let v = json(&args);
    assert_eq!(v["variance"], 0.0);
    assert_eq!(v["seed"], 42);
    let csv = stdout(&[&args[..], &["--format", "csv"]].concat());
    assert!(csv.starts_with("source,q,N,c,order"));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn gamma_check_agrees() {
    let v = json(&["gamma-check", "--q", "3", "--rep", "regular"]);
    assert_eq!(v["agree"], true);
    assert_eq!(v["dimension"], 6);
}

#[test]
fn from_cumulants_free_poisson() {
    let v = json(&["from-cumulants", "--w", "0,1,0.5,0.25,0.125", "--grid", "9", "--format", "json"]);
    let w = v["window"].as_array().unwrap();
    assert!(w[0].as_f64().unwrap() < -1.5 && w[1].as_f64().unwrap() > 2.5);
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("young-calculus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tau.json");
    let out = run(&["tau", "--c", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&["tau", "--c", "2"]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["transition", "--partition", "2,3"]).status.code(), Some(2));
    assert_eq!(run(&["weights", "--q", "3"]).status.code(), Some(2));
    assert_eq!(run(&["limit-shape", "--c", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["character", "--partition", "2,1", "--cycle-type", "2,2"]).status.code(), Some(2));
    assert_eq!(run(&["factorization", "--q", "4", "--N", "2", "--order", "4"]).status.code(), Some(2));
    assert_eq!(run(&["decompose", "--q", "2", "--state", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--bogus-flag"]).status.code(), Some(2));
    let out = run(&["from-cumulants", "--w", "0,1,0,-5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stieltjes"));
}

#[test]
fn single_criterion_runs() {
    let out = stdout(&["check", "--criterion", "5"]);
    assert!(out.starts_with("criterion 5: PASS"), "{out}");
    assert_eq!(run(&["check", "--criterion", "11"]).status.code(), Some(2));
}
