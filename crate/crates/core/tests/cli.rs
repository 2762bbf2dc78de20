use std::path::Path;
use std::process::{Command, Output};

use natpart::solver::{read_grid_csv, Status};
use natpart::BoundedSet;

fn natpart(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_natpart"));
    cmd.args(args).env_remove("NATPART_OUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("NATPART_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Splits `# label` blocks into `(label, set)` pairs.
fn blocks(text: &str) -> Vec<(String, BoundedSet)> {
    text.split("# ")
        .skip(1)
        .map(|block| {
            let (label, literal) = block.split_once('\n').unwrap();
            (label.to_string(), literal.parse().unwrap())
        })
        .collect()
}

#[test]
fn solve_small_case() {
    let out = natpart(&["solve", "--r", "2", "--m", "3", "--bound", "14"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("status=Completed\nfamily=s1t1:1\n"));
    let sets = blocks(&text);
    assert_eq!(sets[0].0, "A");
    assert_eq!(sets[0].1.iter().collect::<Vec<_>>(), [0, 4, 7, 9, 13]);
    assert_eq!(sets[1].1.iter().collect::<Vec<_>>(), [1, 3, 6, 10, 12]);
}

#[test]
fn solve_reports_contradiction_as_json() {
    let out = natpart(&["solve", "--r", "1", "--m", "4", "--bound", "40", "--emit", "json"], None);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["outcome"]["status"], "Contradiction");
    assert_eq!(json["outcome"]["contradiction"]["sum"], 5);
    assert_eq!(json["outcome"]["contradiction"]["forced_value"], 1);
    assert!(json["family"].is_null());
}

#[test]
fn build_writes_into_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = natpart(&["build", "--family", "ef:2", "--out", "ef.txt"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    let sets = blocks(&std::fs::read_to_string(dir.path().join("ef.txt")).unwrap());
    let labels: Vec<_> = sets.iter().map(|(l, _)| l.as_str()).collect();
    assert_eq!(labels, ["E", "F", "T"]);
    assert_eq!(sets[0].1.iter().collect::<Vec<_>>(), [0, 3, 6, 7, 10, 11]);
}

#[test]
fn repfn_single_set_and_pair() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.txt");
    std::fs::write(&input, "bound=6\n0,1,2,3\n").unwrap();
    let out = natpart(&["repfn", "--input", input.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "n,R1,R2,R3");
    assert_eq!(lines[3], "2,3,1,2");
    assert_eq!(lines.len(), 7);

    let out = natpart(&["repfn", "--family", "s2t2:3", "--bound", "300"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("n,R2_A,R2_B,equal\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn classify_matches_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let out = natpart(&["classify", "--m-max", "9", "--bound", "1024", "--out", "grid.csv"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read(dir.path().join("grid.csv")).unwrap();
    let records = read_grid_csv(csv.as_slice()).unwrap();
    assert_eq!(records.len(), (2..=9).map(|m| 2 * m + 1).sum::<usize>());
    let completed: Vec<_> = records.iter().filter(|r| r.status == Status::Completed).map(|r| (r.r, r.m)).collect();
    assert_eq!(completed, [(0, 2), (0, 3), (0, 5), (0, 9), (1, 2), (1, 3), (2, 3), (2, 5), (4, 5), (4, 9), (8, 9)]);
    let again = natpart(&["classify", "--m-max", "9", "--bound", "1024"], None);
    assert_eq!(again.stdout, csv);
}

#[test]
fn classify_flags_survivors_at_tiny_bounds() {
    // At bound 8 some contradictions have not surfaced yet.
    let out = natpart(&["classify", "--m-max", "9", "--bound", "8"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("larger --bound"));
}

#[test]
fn verify_quick_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = natpart(&["verify", "--lemma", "all", "--bound-profile", "quick", "--out", "v.json"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(json["lemmas"].as_array().unwrap().len(), 10);

    let single = natpart(&["verify", "--lemma", "lemma7"], None);
    assert_eq!(single.status.code(), Some(0));
    assert!(stdout(&single).starts_with("PASS lemma7"));
}

#[test]
fn usage_and_domain_errors_exit_one() {
    for args in [
        &["solve", "--r", "1"][..],
        &["solve", "--r", "1", "--m", "1"],
        &["solve", "--r", "9", "--m", "3", "--bound", "5"],
        &["build", "--family", "s9t9:1"],
        &["verify", "--lemma", "lemma99"],
        &["repfn", "--input", "/nonexistent/set.txt"],
    ] {
        let out = natpart(args, None);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(natpart(&["--version"], None).status.code(), Some(0));
}
