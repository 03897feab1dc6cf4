use std::path::Path;
use std::process::{Command, Output};

fn rackmsr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rackmsr"))
        .current_dir(dir)
        .env_remove("RACKMSR_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "status {:?}\nstdout: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

const C3_DEMO: &[&str] = &["build", "--family", "c3", "--racks", "3", "--rack-size", "2", "-k", "3", "--helpers", "2"];

fn c3_demo(dir: &Path) {
    let mut args = C3_DEMO.to_vec();
    args.extend(["--out", "spec.json"]);
    ok(&rackmsr(dir, &args));
    ok(&rackmsr(dir, &["encode", "--spec", "spec.json", "--seed", "5", "--out", "cw.txt"]));
}

#[test]
fn help_mentions_zero_based_labels() {
    let dir = tempfile::tempdir().unwrap();
    let help = ok(&rackmsr(dir.path(), &["--help"]));
    assert!(help.contains("0-based"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = rackmsr(dir.path(), &["build", "--family", "c3", "--racks", "3", "--rack-size", "2", "--helpers", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = rackmsr(dir.path(), &["bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = rackmsr(dir.path(), &["bounds", "--cutset", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn impossible_field_names_mu() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = C3_DEMO.to_vec();
    args.extend(["--field", "7"]);
    let out = rackmsr(dir.path(), &args);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("μ"));
}

#[test]
fn repair_reports_download() {
    let dir = tempfile::tempdir().unwrap();
    c3_demo(dir.path());
    let out = ok(&rackmsr(
        dir.path(),
        &["repair", "--spec", "spec.json", "--codeword", "cw.txt", "--fail", "3", "--helpers", "0,2", "--out", "fixed.txt"],
    ));
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["downloaded_symbols"], 8);
    assert_eq!(json["failed"], 3);
    let original = std::fs::read_to_string(dir.path().join("cw.txt")).unwrap();
    let fixed = std::fs::read_to_string(dir.path().join("fixed.txt")).unwrap();
    assert_eq!(original, fixed);
}

#[test]
fn repair_restores_an_erased_node() {
    let dir = tempfile::tempdir().unwrap();
    c3_demo(dir.path());
    ok(&rackmsr(dir.path(), &["corrupt", "--spec", "spec.json", "--codeword", "cw.txt", "--erase", "3", "--out", "er.txt"]));
    ok(&rackmsr(
        dir.path(),
        &["repair", "--spec", "spec.json", "--codeword", "er.txt", "--fail", "3", "--helpers", "0,2", "--out", "fixed.txt"],
    ));
    let original = std::fs::read_to_string(dir.path().join("cw.txt")).unwrap();
    let fixed = std::fs::read_to_string(dir.path().join("fixed.txt")).unwrap();
    assert_eq!(original, fixed);

    ok(&rackmsr(dir.path(), &["corrupt", "--spec", "spec.json", "--codeword", "cw.txt", "--erase", "0,3", "--out", "er2.txt"]));
    let out = rackmsr(dir.path(), &["repair", "--spec", "spec.json", "--codeword", "er2.txt", "--fail", "3", "--helpers", "0,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn encode_corrupt_verify_flow() {
    let dir = tempfile::tempdir().unwrap();
    c3_demo(dir.path());
    let verify = |file: &str| rackmsr(dir.path(), &["verify", "--spec", "spec.json", "--codeword", file, "--checks", "mds"]);
    assert_eq!(verify("cw.txt").status.code(), Some(0));

    ok(&rackmsr(dir.path(), &["corrupt", "--spec", "spec.json", "--codeword", "cw.txt", "--erase", "1,4", "--out", "erased.txt"]));
    assert_eq!(verify("erased.txt").status.code(), Some(0));

    ok(&rackmsr(dir.path(), &["corrupt", "--spec", "spec.json", "--codeword", "cw.txt", "--flip", "2:5", "--out", "flipped.txt"]));
    let out = verify("flipped.txt");
    assert_eq!(out.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["passed"], false);
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    c3_demo(dir.path());
    let args = ["verify", "--spec", "spec.json", "--seed", "9", "--scope", "4"];
    let a = ok(&rackmsr(dir.path(), &args));
    let b = ok(&rackmsr(dir.path(), &args));
    assert_eq!(a, b);
    let json: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(json["passed"], true);
}

#[test]
fn seed_variable_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    c3_demo(dir.path());
    let run = |seed: &str, var: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_rackmsr"));
        cmd.current_dir(dir.path()).env_remove("RACKMSR_SEED");
        if let Some(v) = var {
            cmd.env("RACKMSR_SEED", v);
        }
        ok(&cmd.args(["encode", "--spec", "spec.json", "--seed", seed]).output().unwrap())
    };
    assert_eq!(run("1", Some("7")), run("2", Some("7")));
    assert_eq!(run("7", None), run("3", Some("7")));
    assert_ne!(run("1", None), run("2", None));
}

#[test]
fn bounds_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&rackmsr(dir.path(), &["bounds", "--rack-cutset", "3,2,16", "--decomposition", "7,4,2,16"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "bound\tinputs\tvalue\tmeasured\tattained");
    assert!(lines[1].starts_with("rack cut-set\t") && lines[1].contains("\t24\t"));
    let json = ok(&rackmsr(dir.path(), &["bounds", "--subpacketization", "8,4,5,2", "--format", "json"]));
    let rows: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(rows[1]["bound"], "4.000000000000");
}

#[test]
fn c2_builds_from_node_count() {
    let dir = tempfile::tempdir().unwrap();
    ok(&rackmsr(dir.path(), &["build", "--family", "c2", "-n", "4", "-k", "2", "--helpers", "3", "--out", "c2.json"]));
    let out = rackmsr(dir.path(), &["verify", "--spec", "c2.json", "--format", "tsv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    ok(&rackmsr(dir.path(), &["bench", "--spec", "c2.json"]));
}
