use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use ln_deform::deformation::{extend_deformation, unflatten_one, Extension};
use ln_deform::doc::write_json;
use ln_deform::s_algebra::{canonical_instance, trivial_instance};
use ln_deform::{BaseRing, Convention, Deformation, FComplex, FiniteRing, StructureTable};
use num_bigint::BigInt;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ln-deform"));
    c.env_remove("LN_DEFORM_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Writes the demo fixtures into a fresh directory.
fn fixtures() -> TempDir {
    let dir = TempDir::new().unwrap();
    let o = run(&["demo", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn complex(bound: usize, table: ln_deform::ActionTable) -> FComplex {
    FComplex::new(table, Arc::new(StructureTable::build(bound, Convention::default()))).unwrap()
}

#[test]
fn constants_of_the_first_operation_squared() {
    let o = run(&["constants", "--alpha", "[1]", "--beta", "[1]"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "gamma [2] coeff 2\ngamma [0,1] coeff 2\n");
}

#[test]
fn constants_dump_revalidates() {
    let dir = TempDir::new().unwrap();
    let dump = path(&dir, "table.json");
    assert_eq!(code(&run(&["constants", "--alpha", "[]", "--beta", "[2]", "--bound", "3", "--dump", &dump])), 0);
    let o = run(&["validate", &dump]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("associativity: PASS"));
}

#[test]
fn constants_beyond_the_bound_are_a_degree_overflow() {
    let o = run(&["constants", "--alpha", "[0,2]", "--beta", "[1]", "--bound", "4"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn first_cohomology_of_the_integers_vanishes() {
    let dir = fixtures();
    let o = run(&["cohomology", "--action", &path(&dir, "action-integers-trivial.json"), "--n", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "H^1 rank=0 torsion=[]\n");
}

#[test]
fn hochschild_cohomology_over_a_prime_field() {
    let dir = fixtures();
    let ring = path(&dir, "ring-dual-numbers.json");
    let o = run(&["cohomology", "--complex", "hochschild", "--ring", &ring, "--n", "2", "--base", "Zmod:2"]);
    assert_eq!(stdout(&o), "HH^2 rank=2 torsion=[]\n");
    let o = run(&["cohomology", "--complex", "hochschild", "--ring", &ring, "--n", "2"]);
    assert_eq!(stdout(&o), "HH^2 rank=1 torsion=[2]\n");
}

#[test]
fn cohomology_bound_cannot_exceed_the_document() {
    let dir = fixtures();
    let action = path(&dir, "action-integers-trivial.json");
    assert_eq!(code(&run(&["cohomology", "--action", &action, "--n", "1", "--bound", "9"])), 5);
    assert_eq!(code(&run(&["cohomology", "--action", &action, "--n", "1", "--bound", "1"])), 0);
}

#[test]
fn validation_exit_codes() {
    let dir = fixtures();
    let good = path(&dir, "action-dual-numbers-trivial.json");
    assert_eq!(code(&run(&["validate", &good])), 0);

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    doc["action"][1]["matrix"] = serde_json::json!([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
    let bad_rank = path(&dir, "bad-rank.json");
    std::fs::write(&bad_rank, doc.to_string()).unwrap();
    assert_eq!(code(&run(&["validate", &bad_rank])), 4);

    // s_(2) = 1 and s_(0,1) = -1 satisfy the product formula but not Cartan
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    doc["action"][2]["matrix"] = serde_json::json!([[1, 0], [0, 1]]);
    doc["action"][3]["matrix"] = serde_json::json!([[-1, 0], [0, -1]]);
    let bad_cartan = path(&dir, "bad-cartan.json");
    std::fs::write(&bad_cartan, doc.to_string()).unwrap();
    let o = run(&["validate", &bad_cartan]);
    assert_eq!(code(&o), 6);
    assert!(stdout(&o).contains("Cartan formula violated at alpha=[2] a=1 b=1"), "{}", stdout(&o));

    assert_eq!(code(&run(&["validate", &path(&dir, "absent.json")])), 3);
    assert_eq!(code(&run(&["validate"])), 2);
}

#[test]
fn extending_the_trivial_deformation_revalidates() {
    let dir = fixtures();
    let (_, table) = canonical_instance(2);
    let trivial = path(&dir, "trivial.json");
    write_json(Path::new(&trivial), &Deformation::trivial(table, 0).to_document()).unwrap();
    let out = path(&dir, "extended.json");
    let o = run(&["extend", "--deformation", &trivial, "--to-order", "3", "--emit", &out]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("order 2 -> 3: extended"));
    assert_eq!(code(&run(&["validate", &out])), 0);

    // re-emitting a document without extending it is byte-identical
    let again = path(&dir, "again.json");
    assert_eq!(code(&run(&["extend", "--deformation", &out, "--to-order", "3", "--emit", &again])), 0);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn seeded_extension_is_reproducible() {
    let dir = fixtures();
    let d = path(&dir, "deformation-polynomial-model.json");
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    for out in [&a, &b] {
        assert_eq!(code(&run(&["extend", "--deformation", &d, "--to-order", "2", "--seed", "11", "--emit", out])), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

fn write_pair(dir: &TempDir, fc: &FComplex, shift: &[BigInt]) -> (String, String) {
    let bar = match extend_deformation(&Deformation::trivial(fc.table().clone(), 0), fc).unwrap() {
        Extension::Extended(d) => d,
        Extension::Obstructed { .. } => panic!("order one always extends"),
    };
    let top: Vec<BigInt> = bar.coefficient_flat(1).iter().zip(shift).map(|(a, b)| a + b).collect();
    let tilde = Deformation::first_order(fc.table().clone(), unflatten_one(&top, fc.rank())).unwrap();
    let (t, b) = (path(dir, "tilde.json"), path(dir, "bar.json"));
    write_json(Path::new(&t), &tilde.to_document()).unwrap();
    write_json(Path::new(&b), &bar.to_document()).unwrap();
    (t, b)
}

#[test]
fn equivalence_witness_and_unknown() {
    let dir = TempDir::new().unwrap();
    let fc = complex(2, canonical_instance(2).1);
    let phi = fc.derivations()[0].clone();
    let (t, b) = write_pair(&dir, &fc, &fc.d(0, phi.data()));
    let witness = path(&dir, "witness.json");
    let o = run(&["equivalence", "--tilde", &t, "--bar", &b, "--emit", &witness]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("equivalent"));
    assert_eq!(code(&run(&["validate", &witness])), 0);

    let fc = complex(2, trivial_instance(&FiniteRing::truncated_polynomial(BaseRing::Integers, 2), 2));
    let rep = fc.h1().unwrap().result().representatives[0].clone();
    let (t, b) = write_pair(&dir, &fc, &rep);
    let o = run(&["equivalence", "--tilde", &t, "--bar", &b]);
    assert_eq!(code(&o), 7);
    assert!(stdout(&o).starts_with("unknown"));
}

#[test]
fn rigidity_verdicts() {
    let dir = fixtures();
    let o = run(&["rigidity", "--action", &path(&dir, "action-integers-trivial.json"), "--max-order", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("rigid: a seeded order-3 deformation"));
    let o = run(&["rigidity", "--action", &path(&dir, "action-dual-numbers-trivial.json")]);
    assert_eq!(code(&o), 7);
    assert!(stdout(&o).contains("not certified: H^1 is nonzero"));
}

#[test]
fn structured_output_is_self_describing() {
    let dir = fixtures();
    let action = path(&dir, "action-integers-trivial.json");
    let o = run(&["--format", "json", "rigidity", "--action", &action, "--seed", "42"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tool"], "ln-deform");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["bound"], 2);
    assert_eq!(v["base"], "Z");
    assert_eq!(v["seed"], 42);
    assert_eq!(v["result"]["verdict"]["rigid"], true);

    let o = run(&["--format", "json", "validate", &path(&dir, "absent.json")]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "error");
    assert_eq!(v["error"]["category"], "io");
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = fixtures();
    let action = path(&dir, "action-polynomial-model.json");
    let serial = bin().args(["cohomology", "--action", &action, "--n", "2"]).env("LN_DEFORM_THREADS", "1").output().unwrap();
    let parallel = bin().args(["cohomology", "--action", &action, "--n", "2"]).env("LN_DEFORM_THREADS", "4").output().unwrap();
    assert_eq!(code(&serial), 0);
    assert_eq!(serial.stdout, parallel.stdout);
    let bad = bin().args(["demo", "--out", "unused"]).env("LN_DEFORM_THREADS", "0").output().unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn demo_writes_loadable_fixtures() {
    let dir = fixtures();
    let names: Vec<PathBuf> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(names.len() >= 7);
    for p in names {
        let o = run(&["validate", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}: {}", p.display(), stdout(&o));
    }
}
