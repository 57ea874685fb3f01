use std::path::Path;
use std::process::{Command, Output};

use qubo_energy::qubo::Qubo;
use qubo_energy::solvers::SampleSet;
use qubo_energy_cli::{read_csv, Family};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubo-energy"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["--help"], dir.path())), 0);
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 1);
    assert_eq!(code(&run(&["solve", "--qubo", "q.json"], dir.path())), 1);
    let missing = run(
        &[
            "formulate",
            "--family",
            "qap",
            "--in",
            "nope.dat",
            "--out",
            "q.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&missing), 1);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.dat"));
}

#[test]
fn generate_formulate_solve_oracle_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = [
        "generate", "--family", "uc", "--seed", "4", "--units", "2", "--grids", "2", "--out",
        "uc.json",
    ];
    assert_eq!(code(&run(&gen, d)), 0);
    let formulate = [
        "formulate",
        "--family",
        "uc",
        "--in",
        "uc.json",
        "--grids",
        "2",
        "--out",
        "q.json",
    ];
    assert_eq!(code(&run(&formulate, d)), 0);
    let q: Qubo =
        serde_json::from_str(&std::fs::read_to_string(d.join("q.json")).unwrap()).unwrap();
    assert_eq!(q.num_vars(), 8);

    let solved = run(&["solve", "--qubo", "q.json", "--solver", "brute"], d);
    assert_eq!(code(&solved), 0);
    let set: SampleSet = serde_json::from_str(&stdout(&solved)).unwrap();
    let best = set.best().unwrap();
    assert_eq!(best.energy, q.energy(&best.assignment).unwrap());

    let oracle = run(
        &[
            "oracle", "--family", "uc", "--in", "uc.json", "--grids", "2",
        ],
        d,
    );
    assert_eq!(code(&oracle), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&oracle)).unwrap();
    let objective = v["objective"].as_f64().unwrap();
    assert!((objective - best.energy).abs() <= 1e-9 * objective.max(1.0));

    let tabu = [
        "solve", "--qubo", "q.json", "--solver", "tabu", "--seed", "2", "--reads", "10", "--out",
        "s.json",
    ];
    assert_eq!(code(&run(&tabu, d)), 0);
    let again = run(&tabu, d);
    assert_eq!(code(&again), 0);
    let a: SampleSet =
        serde_json::from_str(&std::fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    assert_eq!(a.meta.reads, 10);
}

#[test]
fn oracle_too_large_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let n = 13;
    let row = vec!["1"; n].join(" ");
    let matrix = vec![row; n].join("\n");
    std::fs::write(
        dir.path().join("big.dat"),
        format!("{n}\n{matrix}\n{matrix}\n"),
    )
    .unwrap();
    let out = run(
        &["oracle", "--family", "qap", "--in", "big.dat"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn bench_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("tiny.dat"), "2\n0 1\n1 0\n0 3\n3 0\n").unwrap();
    let suite = r#"{
        "instances": [
            {"id": "tiny", "family": "qap", "path": "tiny.dat"},
            {"id": "hens2", "generate": {"family": "hens", "sources": 2, "sinks": 2, "grids": 2, "seed": 3}},
            {"id": "uc2", "generate": {"family": "uc", "units": 2, "grids": 2, "seed": 8}, "reference": 1000.0}
        ],
        "solvers": [{"name": "brute"}, {"name": "tabu", "seed": 1}]
    }"#;
    std::fs::write(d.join("suite.json"), suite).unwrap();
    let out = run(
        &["bench", "--suite", "suite.json", "--out", "report.csv"],
        d,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("uc2"));

    let rows = read_csv(std::fs::File::open(d.join("report.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    let ids: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r.instance.as_str(), r.solver.as_str()))
        .collect();
    assert_eq!(
        ids,
        [
            ("hens2", "brute"),
            ("hens2", "tabu"),
            ("tiny", "brute"),
            ("tiny", "tabu"),
            ("uc2", "brute"),
            ("uc2", "tabu")
        ]
    );
    for r in rows.iter().filter(|r| r.instance != "uc2") {
        assert!(r.feasible);
        assert_eq!(r.deviation_pct, Some(0.0));
    }
    let tiny = rows.iter().find(|r| r.instance == "tiny").unwrap();
    assert_eq!(
        (tiny.family, tiny.objective, tiny.reference),
        (Family::Qap, Some(6.0), Some(6.0))
    );
    let uc = rows.iter().find(|r| r.instance == "uc2").unwrap();
    assert_eq!(uc.reference, Some(1000.0));
    assert!(uc.deviation_pct.unwrap() < 0.0);

    let stats = run(
        &[
            "report",
            "--in",
            "report.csv",
            "--stats",
            "--histogram-csv",
            "hist.csv",
        ],
        d,
    );
    assert_eq!(code(&stats), 0);
    let text = stdout(&stats);
    assert!(text.contains("qap: rows 2 feasible 2"), "{text}");
    let hist = std::fs::read_to_string(d.join("hist.csv")).unwrap();
    assert!(hist.starts_with("family,bin_start,bin_end,count\n"));
}

#[test]
fn bench_without_reachable_reference_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let n = 13;
    let row = vec!["1"; n].join(" ");
    let matrix = vec![row; n].join("\n");
    std::fs::write(d.join("big.dat"), format!("{n}\n{matrix}\n{matrix}\n")).unwrap();
    let suite = r#"{"instances": [{"id": "big", "family": "qap", "path": "big.dat"}], "solvers": [{"name": "sa"}]}"#;
    std::fs::write(d.join("suite.json"), suite).unwrap();
    let out = run(&["bench", "--suite", "suite.json", "--out", "r.csv"], d);
    assert_eq!(code(&out), 2);
}
