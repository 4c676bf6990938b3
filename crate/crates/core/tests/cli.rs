use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randpovm")).current_dir(dir).args(args).output().expect("spawn CLI")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn chi_square_run_writes_one_row_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["concentration", "--exp", "chi-square", "--n", "100", "--eps", "1.0", "--trials", "100000", "--seed", "7", "--out", "r.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(dir.path().join("r.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["experiment", "params", "trials", "statistic", "bound", "std_err", "pass"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "chi-square");
    assert_eq!(&rows[0][6], "true");
    let j = json(&out);
    assert_eq!(j["schema_version"], 1);
    assert_eq!(j["config"]["seed"], 7);
    assert!(j["config"].get("threads").is_none());
    assert_eq!(j["pass"], true);
}

#[test]
fn hsp_run_reports_success_rates() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["hsp", "--group", "dihedral:4", "--copies", "40", "--runs", "200", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    let per = j["summary"]["report"]["per_subgroup"].as_array().unwrap();
    assert_eq!(per.len(), 10);
    assert!(per.iter().all(|s| s["rate"].as_f64().unwrap() >= 0.75));
}

#[test]
fn distinguish_run_writes_a_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["distinguish", "--mode", "povm-ancilla", "--K", "4", "--n", "16", "--trials", "500", "--seed", "7", "--out", "d.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(dir.path().join("d.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["pair", "trial", "tv", "frobenius", "ratio"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 500);
    for r in &rows {
        let (tv, f, ratio): (f64, f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap(), r[4].parse().unwrap());
        assert!((tv / f - ratio).abs() < 1e-12);
    }
}

#[test]
fn same_seed_same_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["identify", "--n", "8", "--k", "3", "--runs", "20", "--seed", "3", "--out", "i.csv"];
    assert_eq!(run(a.path(), &args).status.code(), Some(0));
    let mut with_threads = args.to_vec();
    with_threads.extend(["--threads", "3"]);
    assert_eq!(run(b.path(), &with_threads).status.code(), Some(0));
    assert_eq!(std::fs::read(a.path().join("i.csv")).unwrap(), std::fs::read(b.path().join("i.csv")).unwrap());
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["hsp", "--group", "dihedral:4"],
        &["hsp", "--group", "bogus:3", "--seed", "1"],
        &["concentration", "--exp", "chi-square", "--seed", "1"],
        &["distinguish", "--n", "4", "--bogus", "1", "--seed", "1"],
        &["identify", "--threads", "0", "--seed", "1"],
    ];
    for args in cases {
        assert_eq!(run(dir.path(), args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(run(dir.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn failing_acceptance_rule_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["identify", "--n", "8", "--k", "4", "--copies", "1", "--runs", "50", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.cfg"), "# sample\ncommand = hsp\ngroup = cyclic:6\ncopies = 5\nruns = 20\nseed = 3\n").unwrap();
    let out = run(dir.path(), &["--config", "c.cfg", "--runs", "30"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let j = json(&out);
    assert_eq!(j["config"]["command"]["hsp"]["runs"], 30);
    assert_eq!(j["config"]["command"]["hsp"]["copies"], 5);
    assert_eq!(j["config"]["seed"], 3);
    std::fs::write(dir.path().join("bad.cfg"), "command = hsp\ngroup = cyclic:6\nunknown_key = 1\nseed = 3\n").unwrap();
    assert_eq!(run(dir.path(), &["--config", "bad.cfg"]).status.code(), Some(1));
}

#[test]
fn group_info_lists_lattice_and_distances() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["group-info", "--group", "dihedral:4", "--out", "g.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert_eq!(j["summary"]["order"], 8);
    assert_eq!(j["summary"]["subgroups"].as_array().unwrap().len(), 10);
    let rows = csv::Reader::from_path(dir.path().join("g.csv")).unwrap().records().count();
    assert_eq!(rows, 100);
}

#[test]
fn trace_check_and_spectrum_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["hsp", "--group", "cyclic:12", "--trace-check", "--seed", "0", "--json", "t.json"]);
    assert_eq!(out.status.code(), Some(0));
    let j: Value = serde_json::from_slice(&std::fs::read(dir.path().join("t.json")).unwrap()).unwrap();
    assert!(j["summary"]["min_trace_distance"].as_f64().unwrap() >= 1.0 - 1e-8);
    let out = run(dir.path(), &["hsp", "--group", "cyclic:4", "--spectrum", "--draws", "3", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["summary"]["min_ratio"].as_f64().unwrap() > 0.0);
    assert_eq!(run(dir.path(), &["hsp", "--group", "cyclic:4", "--spectrum", "--trace-check", "--seed", "0"]).status.code(), Some(1));
}
