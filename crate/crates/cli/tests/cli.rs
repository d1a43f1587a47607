use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SIX_PART: &str = "6 9\n1 2\n2 3\n3 4\n4 5\n5 6\n1 6\n1 3\n3 5\n2 2\n";
const LOOP_PATH: &str = "3 3\n1 1\n1 2\n2 3\n";
const TRIANGLE: &str = "3 3\n1 2\n2 3\n1 3\n";

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, content: &str) -> String {
        let path = self.path(name);
        fs::write(&path, content).unwrap();
        path.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn spartite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spartite"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn solve_prints_optimum() {
    let ws = Workspace::new();
    let s = ws.file("s", SIX_PART);
    let x = ws.file("x", "24 7 4 11 6 4\n");
    let out = spartite(&["solve", "--skeleton", &s, "--alloc", &x]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().next(), Some("42"));

    let s = ws.file("loop", LOOP_PATH);
    let x = ws.file("x3", "3 3 3\n");
    let out = spartite(&["solve", "--skeleton", &s, "--alloc", &x]);
    assert_eq!(stdout(&out).lines().next(), Some("9"));

    let s = ws.file("empty", "2 0\n");
    let x = ws.file("x2", "5 5\n");
    let out = spartite(&["solve", "--skeleton", &s, "--alloc", &x]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().next(), Some("0"));
}

#[test]
fn cover_reports_size_and_verifies() {
    let ws = Workspace::new();
    let x = ws.file("x", "3 3 3\n");
    for (skeleton, cycles) in [(LOOP_PATH, 2), (TRIANGLE, 1)] {
        let s = ws.file("s", skeleton);
        let cover = ws.path("cover.txt");
        let out = spartite(&[
            "cover",
            "--skeleton",
            &s,
            "--alloc",
            &x,
            "--out",
            cover.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out).trim(), format!("covered 9, cycles {cycles}"));
        assert_eq!(read(&cover).lines().count(), cycles);
        let out = spartite(&[
            "verify",
            "--skeleton",
            &s,
            "--alloc",
            &x,
            "--cover",
            cover.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stdout(&out));
    }
}

#[test]
fn verify_rejects_bad_witnesses() {
    let ws = Workspace::new();
    let s = ws.file("s", LOOP_PATH);
    let x = ws.file("x", "3 3 3\n");
    let cover = ws.file("cover", "0 1 2\n3 4 5\n");
    let out = spartite(&["verify", "--skeleton", &s, "--alloc", &x, "--cover", &cover]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));

    let good = ws.file("good", "9\n3 3 3\n3 0 6\n");
    let out = spartite(&[
        "verify",
        "--skeleton",
        &s,
        "--alloc",
        &x,
        "--solution",
        &good,
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let infeasible = ws.file("bad", "9\n3 3 3\n3 1 6\n");
    let out = spartite(&[
        "verify",
        "--skeleton",
        &s,
        "--alloc",
        &x,
        "--solution",
        &infeasible,
    ]);
    assert_eq!(code(&out), 1);
    let suboptimal = ws.file("low", "8\n3 3 2\n3 0 5\n");
    let out = spartite(&[
        "verify",
        "--skeleton",
        &s,
        "--alloc",
        &x,
        "--solution",
        &suboptimal,
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn solve_output_round_trips_through_verify() {
    let ws = Workspace::new();
    let s = ws.file("s", SIX_PART);
    let x = ws.file("x", "24 7 4 11 6 4\n");
    let record = ws.path("record");
    let out = spartite(&[
        "solve",
        "--skeleton",
        &s,
        "--alloc",
        &x,
        "--out",
        record.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = spartite(&[
        "verify",
        "--skeleton",
        &s,
        "--alloc",
        &x,
        "--solution",
        record.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn exit_codes() {
    let ws = Workspace::new();
    let s = ws.file("s", SIX_PART);
    let missing = ws.path("nope").to_string_lossy().into_owned();
    let x = ws.file("x", "24 7 4 11 6 4\n");
    assert_eq!(
        code(&spartite(&["solve", "--skeleton", &missing, "--alloc", &x])),
        2
    );

    let bad = ws.file("bad", "6 1\n2 1\n");
    assert_eq!(
        code(&spartite(&["solve", "--skeleton", &bad, "--alloc", &x])),
        2
    );

    let short = ws.file("short", "1 2 3\n");
    assert_eq!(
        code(&spartite(&["solve", "--skeleton", &s, "--alloc", &short])),
        2
    );

    let tri = ws.file("tri", TRIANGLE);
    let two = ws.file("two", "2 3 3\n");
    assert_eq!(
        code(&spartite(&["cover", "--skeleton", &tri, "--alloc", &two])),
        3
    );

    let big = ws.file("big", "120 35 22 55 30 18\n");
    let out = spartite(&[
        "simulate",
        "--skeleton",
        &s,
        "--alloc",
        &big,
        "--p",
        "0.6",
        "--samples",
        "1",
    ]);
    assert_eq!(code(&out), 4);

    let out = spartite(&[
        "simulate",
        "--skeleton",
        &s,
        "--alloc",
        &x,
        "--p",
        "often",
        "--samples",
        "1",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_and_exact_agree() {
    let ws = Workspace::new();
    let petersen = ws.file(
        "petersen",
        "10 15\n0 1\n1 2\n2 3\n3 4\n0 4\n0 5\n1 6\n2 7\n3 8\n4 9\n5 7\n7 9\n6 9\n6 8\n5 8\n",
    );
    let oracle = spartite(&["oracle", "--graph", &petersen]);
    assert_eq!(stdout(&oracle).trim(), "10");
    let witness = ws.path("witness");
    let exact = spartite(&[
        "exact",
        "--graph",
        &petersen,
        "--out",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&exact).trim(), "10");
    assert!(read(&witness).starts_with("10 10\n"));
}

#[test]
fn simulate_extreme_probabilities() {
    let ws = Workspace::new();
    let s = ws.file("s", LOOP_PATH);
    let x = ws.file("x", "3 3 3\n");
    let out = ws.path("pmf.csv");
    let run = spartite(&[
        "simulate",
        "--skeleton",
        &s,
        "--alloc",
        &x,
        "--p",
        "0,1",
        "--samples",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0);
    let csv = read(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,0,1");
    assert_eq!(lines.len(), 11);
    assert_eq!(lines[1], "0,1.000000,0.000000");
    assert_eq!(lines[10], "9,0.000000,1.000000");
    let meta = read(&ws.path("pmf.csv.meta"));
    assert!(meta.contains("n_star=9"));
    assert!(meta.contains("samples=5"));
}

#[test]
fn simulate_single_sample_is_point_mass() {
    let ws = Workspace::new();
    let s = ws.file("s", SIX_PART);
    let x = ws.file("x", "24 7 4 11 6 4\n");
    let run = spartite(&[
        "simulate",
        "--skeleton",
        &s,
        "--alloc",
        &x,
        "--p",
        "6log(n)/n",
        "--samples",
        "1",
        "--format",
        "txt",
    ]);
    assert_eq!(code(&run), 0);
    let table = stdout(&run);
    let ones = table.matches("1.000000").count();
    assert_eq!(ones, 1, "{table}");
}

#[test]
fn sweep_writes_one_row_per_scale_and_rule() {
    let ws = Workspace::new();
    let s = ws.file("s", LOOP_PATH);
    let x = ws.file("x", "3 3 3\n");
    let run = spartite(&[
        "sweep",
        "--skeleton",
        &s,
        "--alloc",
        &x,
        "--scales",
        "1,2",
        "--p",
        "0.5,1",
        "--samples",
        "20",
    ]);
    assert_eq!(code(&run), 0);
    let csv = stdout(&run);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,p_label,p_hat_star");
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("9,1,"));
    assert!(lines[4].starts_with("18,1,1.0"));
}
