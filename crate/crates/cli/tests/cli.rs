use std::path::Path;
use std::process::{Command, Output};

use batswarm::experiment::{to_json, ComparisonReport};

fn batswarm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_batswarm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const RESTAURANT: &str = "216,247,541,222\n437,937,849,543\n82,329,325,289\n578,264,776,158\n";

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn list_functions_has_every_benchmark() {
    let out = batswarm(&["list-functions"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 23);
    assert!(lines[0].starts_with("F1 ") && lines[0].contains("[-100, 100]"));
    assert!(lines[22].starts_with("F23") && lines[22].contains("fixed 4") && lines[22].contains("[0, 10]"));
}

#[test]
fn bench_writes_runs_and_summary() {
    let out = batswarm(&[
        "bench", "--algo", "mba", "--fn", "F1", "--runs", "30", "--seed", "7", "--iters", "20", "--dim", "5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "function,dim,algorithm,run,seed,initial_best,final_best,evaluations"
    );
    assert_eq!(
        lines
            .iter()
            .filter(|l| l.starts_with("F1,5,mba,") && l.split(',').nth(3).unwrap().parse::<usize>().is_ok())
            .count(),
        30
    );
    assert!(lines[1].starts_with("F1,5,mba,0,7,"));
    assert!(lines[30].starts_with("F1,5,mba,29,36,"));
    assert!(lines.iter().any(|l| l.starts_with("F1,5,mba,mean,,,")));
}

#[test]
fn bench_output_is_deterministic_and_atomic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = batswarm(&[
            "bench",
            "--fn",
            "F7,F15",
            "--runs",
            "3",
            "--iters",
            "30",
            "--seed",
            "3",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 2);
}

#[test]
fn unknown_function_is_a_usage_error() {
    let out = batswarm(&["bench", "--fn", "F99"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown function"));
}

#[test]
fn fixed_dimension_override_is_rejected() {
    let out = batswarm(&["bench", "--algo", "ba", "--fn", "F14", "--dim", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("F14 has fixed dimension 2"));
}

#[test]
fn bad_flags_exit_with_one() {
    assert_eq!(batswarm(&["bench", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        batswarm(&["bench", "--alpha", "1.5", "--fn", "F1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        batswarm(&["compare", "--fn", "F1", "--runs", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        batswarm(&["compare", "--fn", "F1,F16", "--dim", "5"]).status.code(),
        Some(1)
    );
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let out = batswarm(&[
        "bench",
        "--fn",
        "F1",
        "--runs",
        "2",
        "--iters",
        "2",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_reports_winners_and_p_values() {
    let out = batswarm(&["compare", "--fn", "F1,F16", "--runs", "4", "--iters", "30"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("function,dim,ba_mean,ba_std,mba_mean,mba_std,min_avg,min_std"));
    assert!(lines[1].starts_with("F1,30,"));
    assert!(lines[2].starts_with("F16,2,"));
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert!(["+", "-", "="].contains(&fields[6]));
        assert!(fields[2].contains('E'));
    }
}

#[test]
fn compare_json_round_trips() {
    let out = batswarm(&[
        "compare", "--fn", "F2", "--runs", "2", "--iters", "10", "--format", "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: ComparisonReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.runs.len(), 4);
    assert_eq!(to_json(&report).unwrap(), stdout(&out));
}

#[test]
fn assign_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "restaurant.csv", RESTAURANT);
    let out = batswarm(&["assign", &path, "--oracle", "--seed", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("total_seconds,1167\n"), "{text}");
    assert!(text.contains("oracle_seconds,1167\n"));
    assert!(text.contains("oracle_assignment,J1->W2 J2->W1 J3->W3 J4->W4\n"));
    assert!(text.contains("match,true\n"));
}

#[test]
fn assign_single_entry() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "one.json", r#"{"costs": [[42]]}"#);
    let out = batswarm(&["assign", &path]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        stdout(&out).lines().take(3).collect::<Vec<_>>(),
        ["job,worker", "J1,W1", "total_seconds,42"]
    );
}

#[test]
fn assign_rejects_negative_entries() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "neg.csv", "1,2,3\n4,-5,6\n7,8,9\n");
    let out = batswarm(&["assign", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("row 1, column 1"));
}

#[test]
fn assign_rejects_non_square() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "rect.csv", "1,2,3\n4,5,6\n");
    let out = batswarm(&["assign", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("square"));
}

#[test]
fn missing_matrix_file_is_a_runtime_error() {
    let out = batswarm(&["assign", "/nonexistent/matrix.csv"]);
    assert_eq!(out.status.code(), Some(2));
}
