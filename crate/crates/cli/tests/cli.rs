use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitlock")).args(args).env_remove("ORBITLOCK_JOBS").output().unwrap()
}

fn analyze(file: &str, extra: &[&str]) -> Value {
    let path = data(file);
    let mut args = vec!["analyze", path.to_str().unwrap()];
    args.extend(extra);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn crown_is_the_forbidden_c8() {
    let r = analyze("crown8.pos", &[]);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["aut_order"], "8");
    assert_eq!(r["orbits"], 2);
    assert_eq!(r["forbidden"], serde_json::json!(["C8"]));
    assert_eq!(r["ious"][0]["forbidden"], "C8");
    assert_eq!(r["violations"], serde_json::json!([]));
}

#[test]
fn chain_has_trivial_group() {
    let r = analyze("chain5.pos", &[]);
    assert_eq!(r["aut_order"], "1");
    assert!(r["ious"].as_array().unwrap().iter().all(|u| u["singleton"] == true));
}

#[test]
fn transmit_drive_has_two_unions() {
    let r = analyze("transmit_drive.pos", &[]);
    let big: Vec<&Value> = r["ious"].as_array().unwrap().iter().filter(|u| u["singleton"] == false).collect();
    assert_eq!(big.len(), 2);
    assert_eq!(big[0]["elements"].as_array().unwrap().len(), 15);
    assert_eq!(r["product_decomposition"], true);
    // 27 elements exceed the default endomorphism cap, so End is a flagged bound.
    assert_eq!(r["end"]["bound"], true);
}

#[test]
fn dictated_structure_from_file() {
    let dos = data("locked_crown.dos");
    let r = analyze("locked_crown.pos", &["--structure", dos.to_str().unwrap()]);
    assert_eq!(r["structure"]["source"], "file");
    assert_eq!(r["structure"]["aut_order"], r["structure"]["end"]["value"]);
    assert_eq!(r["structure"]["blocks"].as_array().unwrap().len(), 4);
}

#[test]
fn dual_flag_swaps_ranks() {
    let r = analyze("transmit_drive.pos", &["--dual"]);
    assert_eq!(r["dual"], true);
    assert_eq!(r["rank_sizes"], serde_json::json!([6, 6, 6, 9]));
}

#[test]
fn reports_are_byte_identical() {
    let path = data("transmit_drive.pos");
    let a = run(&["analyze", path.to_str().unwrap()]);
    let b = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(!text.contains("generated_at"));
    let stamped = run(&["analyze", path.to_str().unwrap(), "--timestamps"]);
    assert!(String::from_utf8(stamped.stdout).unwrap().contains("generated_at"));
}

#[test]
fn keys_are_sorted() {
    let out = run(&["analyze", data("crown8.pos").to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort_unstable();
    assert_eq!(top, sorted);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["analyze", data("bad.pos").to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["analyze", data("cycle.pos").to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["analyze", data("missing.pos").to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["analyze", data("crown8.pos").to_str().unwrap(), "--cap-aut", "4"]).status.code(), Some(4));
    assert_eq!(run(&["verify", "no-such-suite", "3"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_suites_pass_at_small_sizes() {
    for (suite, n) in [("lemmas-core", "7"), ("bounds", "25"), ("catalog", "0"), ("ratios", "6"), ("prune", "8")] {
        let out = run(&["verify", suite, n, "--jobs", "3"]);
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(out.status.code(), Some(0), "{suite}: {text}");
        assert!(text.ends_with("result: PASS\n"), "{suite}: {text}");
    }
}

#[test]
fn verify_lemmas_core_names_its_lemmas() {
    let out = run(&["verify", "lemmas-core", "7", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v["lemmas"].as_array().unwrap().iter().map(|l| l["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["allbutoneac", "unionplacement", "getallfromiou"]);
    assert!(v["lemmas"].as_array().unwrap().iter().all(|l| l["failed"] == 0 && l["passed"] == 2450));
}

#[test]
fn verify_output_ignores_job_count() {
    let one = Command::new(env!("CARGO_BIN_EXE_orbitlock"))
        .args(["verify", "ratios", "6"])
        .env("ORBITLOCK_JOBS", "1")
        .output()
        .unwrap();
    let many = run(&["verify", "ratios", "6", "--jobs", "8"]);
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn catalog_dumps() {
    let out = run(&["catalog", "6"]);
    let text = String::from_utf8(out.stdout).unwrap();
    // 13 named entries, S_2, then S_w and wC_2 for w = 3..=6.
    assert_eq!(text.matches("---\n").count() + 1, 13 + 1 + 8);
    let out = run(&["catalog", "2", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 14);
    assert_eq!(entries[0]["name"], "C8");
    assert_eq!(entries[0]["aut_d"], "8");
}

#[test]
fn enumerate_streams() {
    let out = run(&["enumerate", "posets", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("---\n").count() + 1, 63);
    let out = run(&["enumerate", "posets", "5", "--max-width", "2"]);
    assert!(out.status.success());
    let out = run(&["enumerate", "unions", "8"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("---\n").count() + 1, 25);
    assert!(text.lines().any(|l| l.starts_with("b ")));
}
