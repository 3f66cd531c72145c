mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use common::fixture;

fn cwgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwgen"))
        .args(args)
        .env_remove("CWGEN_API_KEY")
        .output()
        .unwrap()
}

fn ok(out: &Output) -> &[u8] {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    &out.stdout
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn layout_is_reproducible_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = fixture("physics.jsonl");
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let args = [
            "layout",
            "--pairs",
            path(&pairs),
            "--rows",
            "13",
            "--cols",
            "13",
            "--min-answers",
            "8",
            "--seed",
            "7",
        ];
        ok(&cwgen(
            &[&args[..], &["--jobs", jobs, "--out", path(&out)]].concat(),
        ));
        std::fs::read(out).unwrap()
    };
    let a = run("a.json", "1");
    assert_eq!(a, run("b.json", "1"));
    assert_eq!(run("c.json", "4"), run("d.json", "4"));

    let layout: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(layout["rows"], 13);
    assert!(layout["placements"].as_array().unwrap().len() >= 8);

    let rendered = cwgen(&[
        "render",
        "--layout",
        path(&dir.path().join("a.json")),
        "--format",
        "text",
        "--reveal",
    ]);
    assert_eq!(
        String::from_utf8(ok(&rendered).to_vec())
            .unwrap()
            .lines()
            .count(),
        13
    );
    let svg = cwgen(&[
        "render",
        "--layout",
        path(&dir.path().join("a.json")),
        "--format",
        "svg",
    ]);
    assert!(String::from_utf8_lossy(ok(&svg)).contains("<svg"));
    let json = cwgen(&[
        "render",
        "--layout",
        path(&dir.path().join("a.json")),
        "--format",
        "json",
        "--pairs",
        path(&pairs),
    ]);
    let puzzle: Value = serde_json::from_slice(ok(&json)).unwrap();
    assert!(puzzle["across"].is_array());
}

#[test]
fn from_text_replays_to_the_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pairs.jsonl");
    let report = dir.path().join("report.json");
    let (text, transcript) = (fixture("atom.txt"), fixture("atom_transcript.jsonl"));
    let args = [
        "from-text",
        "--in",
        path(&text),
        "--transcript",
        path(&transcript),
        "--out",
        path(&out),
        "--report",
        path(&report),
    ];
    ok(&cwgen(&args));
    assert_eq!(
        std::fs::read(&out).unwrap(),
        std::fs::read(fixture("atom_golden.jsonl")).unwrap()
    );
    let summary: Value = serde_json::from_slice(&std::fs::read(report).unwrap()).unwrap();
    assert_eq!(summary["passed"], 10);
    assert_eq!(summary["input_count"], 10);
}

#[test]
fn from_keywords_with_remote_classifier() {
    let dir = tempfile::tempdir().unwrap();
    let answers = dir.path().join("answers.txt");
    std::fs::write(&answers, "نجوم\nقوة\nزرافة\n").unwrap();
    let transcript = fixture("keyword_transcript.jsonl");
    let args = [
        "from-keywords",
        "--answers",
        path(&answers),
        "--classifier",
        "remote",
        "--transcript",
        path(&transcript),
        "--all",
    ];
    let out = cwgen(&args);
    let records: Vec<Value> = ok(&out)
        .split(|&b| b == b'\n')
        .filter(|l| !l.is_empty())
        .map(|l| serde_json::from_slice(l).unwrap())
        .collect();
    assert_eq!(records.len(), 3);
    assert_eq!(records[2]["answer"], "زرافة");
    assert_eq!(records[2]["verdict"]["acceptable"], false);
}

#[test]
fn normalize_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    std::fs::write(
        &input,
        "{\"clue\": \"مَوْتِي\", \"answer\": \"حتفي\"}\n{\"clue\": \"موتي\", \"answer\": \"حَتْفِي\"}\n{\"clue\": \"كلمة معكوسة\", \"answer\": \"ابر\"}\n",
    )
    .unwrap();
    let out = dir.path().join("out.jsonl");
    ok(&cwgen(&[
        "normalize",
        "--in",
        path(&input),
        "--out",
        path(&out),
    ]));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("\"clue\":\"موتي\""));

    let stats: Value = serde_json::from_slice(ok(&cwgen(&[
        "stats",
        "--in",
        path(&fixture("two_pairs.jsonl")),
    ])))
    .unwrap();
    assert_eq!(stats["total_pairs"], 2);
    assert_eq!(stats["length_histogram"]["4"]["all_pairs"], 1);
    assert_eq!(stats["length_histogram"]["2"]["unique_answers"], 1);
}

#[test]
fn errors_are_one_json_line_and_nonzero_exit() {
    let out = cwgen(&["stats", "--in", "/definitely/not/here.jsonl"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1);
    let err: Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(err["error"]["kind"], "dataset");

    let out = cwgen(&["from-text", "--in", path(&fixture("atom.txt"))]);
    assert!(!out.status.success());
    let err: Value = serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert!(
        err["error"]["message"]
            .as_str()
            .unwrap()
            .contains("CWGEN_API_KEY"),
        "{err}"
    );

    let out = cwgen(&[
        "layout",
        "--pairs",
        path(&fixture("crossing_pair.jsonl")),
        "--rows",
        "5",
        "--cols",
        "5",
        "--jobs",
        "0",
    ]);
    assert!(!out.status.success());
}
