mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use wotm::cli::{bundled_corpus_dir, run_cli};

fn wotm(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wotm")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn corpus_file(name: &str) -> String {
    bundled_corpus_dir().join(name).to_string_lossy().into_owned()
}

fn json_lines(s: &str) -> Vec<Value> {
    s.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn write_temp(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const HEADER: &str = "mode: deterministic\ntape: standard\nalphabet: 0 1\nstates: q0 qa qr\nstart: q0\naccept: qa\nreject: qr\n";

#[test]
fn validate_exit_codes() {
    let (code, out, _) = wotm(&["validate", &corpus_file("wo_marker.tm")]);
    assert_eq!(code, 0);
    assert_eq!(json_lines(&out)[0]["clean"], true);

    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(dir.path(), "bad.tm", &format!("{HEADER}trans: q0 0 -> 1 R q9\n"));
    let (code, out, _) = wotm(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(json_lines(&out)[0]["issues"][0]["kind"], "unknown-state");

    let truncated = write_temp(dir.path(), "trunc.tm", "mode: deterministic\ntape: stand");
    let (code, _, err) = wotm(&["validate", truncated.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");

    let (code, _, _) = wotm(&["validate", "/nonexistent/machine.tm"]);
    assert_eq!(code, 2);
}

#[test]
fn run_verdicts() {
    let (code, out, _) = wotm(&["run", &corpus_file("wo_marker.tm"), "1"]);
    assert_eq!(code, 0);
    assert_eq!(json_lines(&out)[0]["verdict"], "accept");

    let (code, out, _) = wotm(&["run", &corpus_file("loop_ping_pong.tm"), "11"]);
    assert_eq!(code, 4);
    assert_eq!(json_lines(&out)[0]["verdict"], "loop");

    let (code, _, _) = wotm(&["run", &corpus_file("wo_marker.tm"), "7"]);
    assert_eq!(code, 2);
}

#[test]
fn corpus_expectations_match_exit_codes() {
    let mut checked = 0;
    for (entry, _) in common::corpus() {
        let path = corpus_file(&entry.file);
        for e in &entry.expected {
            let want = match e.verdict.as_str() {
                "accept" => 0,
                "reject" => 1,
                "limit" => 3,
                "loop" => 4,
                "violation" => 5,
                other => panic!("unknown verdict {other}"),
            };
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = run_cli(["wotm", "run", path.as_str(), e.input.as_str()], &mut out, &mut err);
            assert_eq!(code, want, "{} on {:?}: {}", entry.file, e.input, String::from_utf8_lossy(&out));
            checked += 1;
        }
    }
    assert!(checked > 500, "only {checked} expectations");
}

#[test]
fn transpile_outputs_valid_machines() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("copy.tm");
    let (code, _, err) = wotm(&[
        "transpile",
        &corpus_file("std_bit_flipper.tm"),
        "--construction",
        "copying",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = wotm(&["validate", out_path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(json_lines(&out)[0]["clean"], true);

    let (code, out, err) =
        wotm(&["transpile", &corpus_file("std_bit_flipper.tm"), "--construction", "womcoded", "--code", "slot:1,2"]);
    assert_eq!(code, 0);
    assert!(out.contains("tape: write-once"));
    let report = json_lines(&err).pop().unwrap();
    assert_eq!(report["construction"], "wom-coded");
    assert_eq!(report["group_width"], 5);
}

#[test]
fn endwriter_commands() {
    let file = corpus_file("ew_divergent_appender.tm");
    let (code, out, _) = wotm(&["endwriter", "decide", &file, "1"]);
    let decision = &json_lines(&out)[0]["decision"];
    let (direct, _, _) = wotm(&["run", &file, "1", "--max-steps", "20000", "--max-space", "2000"]);
    // The decider settles what the bounded direct run cannot.
    assert_eq!(direct, 3);
    assert_eq!(code, 6);
    assert_eq!(decision["verdict"], "diverge");
    assert_eq!(decision["certificate_failures"], 0);

    let file = corpus_file("ew_append_accept.tm");
    let (code, out, _) = wotm(&["endwriter", "decide", &file, "1"]);
    let (direct, _, _) = wotm(&["run", &file, "1"]);
    assert_eq!(code, direct);
    assert_eq!(json_lines(&out)[0]["decision"]["certificate_failures"], 0);

    let (code, out, _) = wotm(&["endwriter", "analyze", &corpus_file("ew_two_writers.tm")]);
    assert_eq!(code, 0);
    let report = &json_lines(&out)[0];
    let names: Vec<&str> = report["components"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 3);
    assert_eq!(names[0], "init");

    let (code, _, err) = wotm(&["endwriter", "analyze", &corpus_file("std_bit_flipper.tm")]);
    assert_eq!(code, 1);
    assert!(err.contains("write-once-end"));
}

#[test]
fn wom_commands() {
    let (code, out, _) = wotm(&["wom", "print", "--code", "rs"]);
    assert_eq!(code, 0);
    assert_eq!(json_lines(&out)[0]["code"], "rs");
    let (code, _, _) = wotm(&["wom", "verify", "--code", "slot:1,3"]);
    assert_eq!(code, 0);
    let (code, _, _) = wotm(&["wom", "print", "--code", "nonsense"]);
    assert_eq!(code, 2);
}

#[test]
fn bench_records() {
    let empty = tempfile::tempdir().unwrap();
    let (code, out, _) = wotm(&["bench", empty.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());

    let (code, out, _) = wotm(&["bench", bundled_corpus_dir().to_str().unwrap(), "--max-len", "2"]);
    assert_eq!(code, 0);
    let records = json_lines(&out);
    let halting_write_once: Vec<&Value> = records
        .iter()
        .filter(|r| r["discipline"] == "write-once" && r["mode"] == "deterministic")
        .filter(|r| r["verdict"] == "accept" || r["verdict"] == "reject")
        .collect();
    assert!(halting_write_once.len() > 50);
    assert!(halting_write_once.iter().all(|r| r["bound_check"] == true));
    assert!(records.iter().any(|r| !r["transpiled"].as_array().unwrap().is_empty()));
}
