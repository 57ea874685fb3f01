use std::path::PathBuf;
use std::time::Instant;

use qubo_energy::formulations::{parse_qaplib, qap_objective, qap_oracle};

fn load(name: &str) -> qubo_energy::formulations::QapInstance {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data/qaplib")
        .join(name);
    parse_qaplib(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn nug08_optimum() {
    let inst = load("nug08.dat");
    let s = qap_oracle(&inst).unwrap();
    assert_eq!(s.objective, 214.0);
    assert_eq!(qap_objective(&inst, &s.perm).unwrap(), 214.0);
}

#[test]
fn nug12_optimum() {
    let inst = load("nug12.dat");
    let t = Instant::now();
    let s = qap_oracle(&inst).unwrap();
    eprintln!("nug12 oracle: {:?} in {:?}", s, t.elapsed());
    assert_eq!(s.objective, 578.0);
}
