use std::process::{Command, Output};

use serde_json::Value;

fn cforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cforge"))
        .args(args)
        .env_remove("CFORGE_CACHE")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

const A5: &str = r#"{"family":"Alt","n":5}"#;
const PSL27: &str = r#"{"family":"PSL","d":2,"q":7}"#;

#[test]
fn classes_of_a5() {
    let out = cforge(&["classes", "--group", A5]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["classes"].as_array().unwrap().len(), 5);
    assert_eq!(v["order"], "60");
}

#[test]
fn arad_herzog_exit_codes() {
    let out = cforge(&["ah", "--group", PSL27]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "holds");

    let out = cforge(&["ah", "--group", r#"{"family":"Alt","n":4}"#]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "fails");
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn bad_spec_is_exit_two() {
    let out = cforge(&["classes", "--group", r#"{"family":"PSL","d":2,"q":6}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = cforge(&["classes", "--group", "{not json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cforge(&["product", "--group", A5]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn product_and_dcoset() {
    let out = cforge(&["product", "--group", A5, "--classes", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["support_size"], 5);
    let out = cforge(&["dcoset", "--group", A5, "--classes", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["count"].as_u64().unwrap() >= 1);
}

#[test]
fn zsig_and_group_file() {
    let out = cforge(&["zsig", "--q", "2", "--n", "6"]);
    assert_eq!(json(&out)["prime"], Value::Null);
    let out = cforge(&["zsig", "--q", "3", "--n", "5"]);
    assert_eq!(json(&out)["prime"], 11);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, PSL27).unwrap();
    let out = cforge(&["steinberg", "--group", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["summary"]["steinberg_degree"], 7);
}

#[test]
fn cache_hit_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let spaced = "{ \"q\": 7, \"family\": \"PSL\", \"d\": 2 }";
    let cold = cforge(&["steinberg", "--group", PSL27, "--cache-dir", d]);
    let warm = cforge(&["steinberg", "--group", spaced, "--cache-dir", d]);
    assert_eq!(cold.status.code(), Some(0));
    assert_eq!(cold.stdout, warm.stdout);
    let files = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(files, 2);

    // corrupt every entry; the result must be recomputed and unchanged
    for e in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::write(e.unwrap().path(), b"{\"truncated").unwrap();
    }
    let again = Command::new(env!("CARGO_BIN_EXE_cforge"))
        .args(["steinberg", "--group", PSL27])
        .env("CFORGE_CACHE", d)
        .output()
        .unwrap();
    assert_eq!(again.stdout, cold.stdout);
    assert!(String::from_utf8_lossy(&again.stderr).contains("discarding cache entry"));
}

#[test]
fn demo_counterexamples_hold() {
    let out = cforge(&["demo-counterexamples", "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert!(v["cases"].as_array().unwrap().iter().all(|c| c["as_expected"] == true));
}

#[test]
fn characteristic_checks_reject_symmetric_groups() {
    let out = cforge(&["unip", "--group", r#"{"family":"Sym","n":5}"#]);
    assert_eq!(out.status.code(), Some(2));
}
