use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn pbdd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbdd"))
        .args(args)
        .env_remove("PBDD_NODE_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn encode_matches_golden_file() {
    let input = data("running.opb");
    let out = pbdd(&["encode", "--method", "bdd1", "--in", input.to_str().unwrap()]);
    assert!(out.status.success());
    let golden = std::fs::read_to_string(data("running_bdd1.cnf")).unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn encode_keeps_three_aux_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("out.cnf");
    let map = dir.path().join("out.map");
    let input = data("running.opb");
    let out = pbdd(&[
        "encode",
        "--method",
        "bdd1",
        "--in",
        input.to_str().unwrap(),
        "--out",
        cnf.to_str().unwrap(),
        "--map",
        map.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&cnf).unwrap();
    assert!(text.contains("p cnf 6 5\n"));
    let map = std::fs::read_to_string(&map).unwrap();
    assert_eq!(map.lines().filter(|l| l.contains(" aux ")).count(), 3);
}

#[test]
fn naive_flag_skips_diagrams() {
    let input = data("running.opb");
    let out = pbdd(&["encode", "--naive-max-vars", "3", "--in", input.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("p cnf 3 2\n"));
}

#[test]
fn output_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let opb = dir.path().join("many.opb");
    let mut text = String::new();
    for k in 0..12 {
        text.push_str(&format!("+3 x1 +5 x2 +7 x3 -2 x4 +4 x5 <= {} ;\n", 4 + k));
        text.push_str(&format!("+1 x2 +1 x4 +2 x6 = {} ;\n", k % 3));
    }
    std::fs::write(&opb, text).unwrap();
    let run = |threads: &str| {
        let out = pbdd(&["encode", "--method", "bdd3", "--threads", threads, "--in", opb.to_str().unwrap()]);
        assert!(out.status.success());
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("1"));
    assert_eq!(one, run("4"));
}

#[test]
fn verify_exit_codes() {
    let out = pbdd(&["verify", "--method", "bdd3", "--max-n", "6", "--seeds", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = pbdd(&["verify", "--method", "bdd1", "--max-n", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_bdd2_without_gac() {
    let out = pbdd(&["verify", "--method", "bdd2", "--max-n", "5", "--seeds", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("checks consistency:"));
}

#[test]
fn gen_hosaka_one() {
    let out = pbdd(&["gen", "--family", "hosaka", "--n", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text.lines().find(|l| !l.starts_with('*')).unwrap();
    assert_eq!(line, "+5 x1 +6 x2 +9 x3 +10 x4 <= 15 ;");
}

#[test]
fn gen_round_trips_through_encode() {
    let dir = tempfile::tempdir().unwrap();
    let opb = dir.path().join("b.opb");
    let out = pbdd(&["gen", "--family", "bailleux", "--n", "6", "--out", opb.to_str().unwrap()]);
    assert!(out.status.success());
    let out = pbdd(&["stats", "--in", opb.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("row\t")).unwrap();
    let fields: Vec<&str> = row.split('\t').collect();
    // x1 + ... + x6 <= 2 has 3 * 4 = 12 decision nodes
    assert_eq!(fields[11], "12");
    let out = pbdd(&["gen", "--family", "bailleux", "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let opb = dir.path().join("bad.opb");
    std::fs::write(&opb, "min: +1 x1 ;\n").unwrap();
    let out = pbdd(&["encode", "--in", opb.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn budget_exceeded_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let opb = dir.path().join("h.opb");
    let out = pbdd(&["gen", "--family", "hosaka", "--n", "2", "--out", opb.to_str().unwrap()]);
    assert!(out.status.success());
    let out = pbdd(&["encode", "--node-budget", "3", "--in", opb.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let out = Command::new(env!("CARGO_BIN_EXE_pbdd"))
        .args(["encode", "--in", opb.to_str().unwrap()])
        .env("PBDD_NODE_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pbdd(&["encode"]).status.code(), Some(2));
    assert_eq!(pbdd(&["encode", "--method", "adder", "--in", "x"]).status.code(), Some(2));
    assert_eq!(pbdd(&["encode", "--in", "/nonexistent/file.opb"]).status.code(), Some(2));
}

#[test]
fn equiv_examples() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let a = data("running.opb");
    let five = write("five.opb", "+2 x1 +3 x2 +5 x3 <= 5 ;\n");
    let seven = write("seven.opb", "+2 x1 +3 x2 +5 x3 <= 7 ;\n");
    let reordered = write("re.opb", "+5 x3 +2 x1 +3 x2 <= 5 ;\n");
    for (other, expected) in [(&five, "equivalent"), (&seven, "different"), (&reordered, "equivalent")] {
        let out = pbdd(&["equiv", a.to_str().unwrap(), other.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out).trim(), expected);
    }
    let foreign = write("f.opb", "+2 x1 +3 y +5 x3 <= 5 ;\n");
    let out = pbdd(&["equiv", a.to_str().unwrap(), foreign.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
