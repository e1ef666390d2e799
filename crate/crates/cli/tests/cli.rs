//! End-to-end tests driving the `condim` binary through pipes and files.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use condim_cli::{render, DimOutput};
use condim_core::{condorcet_dimension, derive_profile, lemma4_instance, Norm, PreferenceProfile, ProfileDocument};
use serde_json::Value;

fn condim(args: &[&str], stdin: &[u8]) -> (i32, Vec<u8>) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_condim"))
        .args(args)
        .env_remove("CONDIM_THREADS")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    // commands given a file argument never read stdin, so the pipe may be closed
    let _ = child.stdin.take().unwrap().write_all(stdin);
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap(), out.stdout)
}

fn ok(args: &[&str], stdin: &[u8]) -> Vec<u8> {
    let (code, out) = condim(args, stdin);
    assert_eq!(code, 0, "{args:?}: {}", String::from_utf8_lossy(&out));
    out
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("condim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn piped_composition_matches_in_process() {
    let spatial = ok(&["lemma4"], b"");
    let profile = ok(&["derive", "--norm", "2"], &spatial);
    let dim = ok(&["dim"], &profile);

    let p = derive_profile(&lemma4_instance(), &Norm::integer(2)).profile;
    let expected = render(&DimOutput {
        result: condorcet_dimension(&p, p.m()).unwrap(),
    });
    assert_eq!(String::from_utf8(dim.clone()).unwrap(), expected);

    let v: Value = serde_json::from_slice(&dim).unwrap();
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["schema_version"], "1");
}

#[test]
fn derived_profile_document_round_trips() {
    let profile = ok(&["derive", "--norm", "inf"], &ok(&["lemma4"], b""));
    let doc: ProfileDocument = serde_json::from_slice(&profile).unwrap();
    let p = PreferenceProfile::try_from(doc).unwrap();
    assert_eq!(p.raw_rankings(), vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
    let v: Value = serde_json::from_slice(&profile).unwrap();
    assert_eq!(v["ties"], Value::Array(vec![]));
    assert_eq!(v["norm"], "inf");
}

#[test]
fn planar_set_under_infinity_norm() {
    let out = ok(&["planar-set", "--norm", "inf"], &ok(&["lemma4"], b""));
    let v: Value = serde_json::from_slice(&out).unwrap();
    let set = v["set"].as_array().unwrap();
    assert!(!set.is_empty() && set.len() <= 3);
    assert_eq!(v["sheared"], true);
    assert_eq!(v["quadrant_report"]["violations"], Value::Array(vec![]));
    let per = v["certificate"]["per_challenger"].as_array().unwrap();
    assert_eq!(per.len(), 3 - set.len());
    assert!(per.iter().all(|c| 2 * c["count"].as_u64().unwrap() > 3));
}

#[test]
fn planar_set_reports_manhattan_tie() {
    let (code, out) = condim(&["planar-set", "--norm", "1"], &ok(&["lemma4"], b""));
    assert_eq!(code, 1);
    let v: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["error"], "tied_preferences");
}

#[test]
fn malformed_profile_exits_two() {
    let (code, out) = condim(&["dim"], b"{\"m\": 3, \"rankings\": ");
    assert_eq!(code, 2);
    let v: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["error"], "malformed_document");
    assert!(v["detail"].as_str().is_some());
}

#[test]
fn file_argument_overrides_stdin_and_output_file_is_written() {
    let input = scratch("cycle.json");
    std::fs::write(&input, r#"{"m": 3, "n": 3, "rankings": [[0,1,2],[1,2,0],[2,0,1]]}"#).unwrap();
    let output = scratch("dim.json");
    let (code, stdout) = condim(
        &["dim", input.to_str().unwrap(), "--output", output.to_str().unwrap()],
        b"not json",
    );
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["dimension"], 2);
}

#[test]
fn embed_output_feeds_derive() {
    let profile = br#"{"m": 4, "n": 3, "rankings": [[3,1,0,2],[0,1,2,3],[2,3,1,0]]}"#;
    for construction in ["candidate-simplex", "voter-simplex"] {
        let spatial = ok(&["embed", "--construction", construction, "--norm", "p:3/2"], profile);
        let derived: ProfileDocument = serde_json::from_slice(&ok(&["derive"], &spatial)).unwrap();
        assert_eq!(
            derived.rankings,
            vec![vec![3, 1, 0, 2], vec![0, 1, 2, 3], vec![2, 3, 1, 0]]
        );
    }
}

#[test]
fn survey_from_config_file_with_flag_override() {
    let config = scratch("survey.json");
    std::fs::write(
        &config,
        r#"{"generator": {"kind": "impartial_culture", "m": 5, "n": 5}, "instances": 10, "seed": 3}"#,
    )
    .unwrap();
    let out = ok(
        &["survey", "--config", config.to_str().unwrap(), "--instances", "40"],
        b"",
    );
    let v: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["config"]["instances"], 40);
    let total: u64 = v["histogram"]
        .as_object()
        .unwrap()
        .values()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(total, 40);
    assert!(v.get("wall_time_ms").is_none());
}

#[test]
fn threads_flag_and_environment_agree() {
    let args = [
        "hunt",
        "--generator",
        "ic:m=6,n=5",
        "--instances",
        "300",
        "--target",
        "3",
        "--seed",
        "9",
    ];
    let single = ok(&args, b"");
    let mut child = Command::new(env!("CARGO_BIN_EXE_condim"))
        .args(args)
        .env("CONDIM_THREADS", "4")
        .stdin(Stdio::null())
        .output()
        .unwrap();
    assert_eq!(child.status.code(), Some(0));
    assert_eq!(std::mem::take(&mut child.stdout), single);
}
