use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn sumsets(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumsets")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn verify(path: &Path, name: &str, extra: &[&str]) -> Output {
    let mut args = vec!["verify", "--instance", path.to_str().unwrap(), "--inequality", name];
    args.extend_from_slice(extra);
    sumsets(&args)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn superadd_on_the_triple_holds() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "t.json",
        r#"{"structure": "Z", "sets": [[0, 2], [0, 1], [0, 3]]}"#,
    );
    let out = verify(&p, "superadd", &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["holds"], true);
    assert_eq!(v["lhs"], serde_json::json!(["14", "1"]));
    assert_eq!(v["rhs"], serde_json::json!(["11", "1"]));
}

#[test]
fn csv_and_json_agree() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "t.json",
        r#"{"structure": "Z", "sets": [[0, 2], [0, 1], [0, 3]]}"#,
    );
    for name in ["superadd", "submult"] {
        let v = json(&verify(&p, name, &["--out", "json"]));
        let csv = String::from_utf8(verify(&p, name, &["--out", "csv"]).stdout).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "name,lhs_num,lhs_den,rhs_num,rhs_den,holds,slack_num,slack_den"
        );
        let cols: Vec<&str> = lines.next().unwrap().split(',').collect();
        let s = |x: &Value| x.as_str().unwrap().to_string();
        assert_eq!(cols[0], name);
        assert_eq!((cols[1], cols[2]), (s(&v["lhs"][0]).as_str(), s(&v["lhs"][1]).as_str()));
        assert_eq!((cols[3], cols[4]), (s(&v["rhs"][0]).as_str(), s(&v["rhs"][1]).as_str()));
        assert_eq!(cols[5], v["holds"].to_string());
        assert_eq!(
            (cols[6], cols[7]),
            (s(&v["slack"][0]).as_str(), s(&v["slack"][1]).as_str())
        );
    }
}

#[test]
fn witness_prints_marked_sets() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "t.json",
        r#"{"structure": "Z", "sets": [[0, 2], [0, 1], [0, 3]]}"#,
    );
    let out = sumsets(&["witness", "--instance", p.to_str().unwrap(), "--inequality", "superadd"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["witness"]["marked_count"], 11);
    assert_eq!(v["witness"]["marked"].as_array().unwrap().len(), 2);
}

#[test]
fn empty_set_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "e.json", r#"{"structure": "Z", "sets": [[], [0, 1]]}"#);
    let out = verify(&p, "superadd", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonempty sets required"));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "m.json", "{\"structure\": \"Z\",\n  \"sets\": [[0, 1],\n");
    let out = verify(&p, "superadd", &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("column"), "{err}");
}

#[test]
fn unknown_inequality_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t.json", r#"{"structure": "Z", "sets": [[0]]}"#);
    let out = verify(&p, "pythagoras", &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    for name in ["superadd", "cauchy-davenport", "plunnecke-multi", "q2"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = verify(Path::new("/definitely/not/here.json"), "superadd", &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn family_finds_the_counterexample() {
    let out = sumsets(&["family", "--n", "120", "--target-size", "6"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["s"].as_array().unwrap().len(), 6);
    assert_eq!(v["pair_sums"], 6);
    assert!(v["triple_sums"].as_u64().unwrap() >= 20);
    assert_eq!(v["report"]["holds"], false);
}

#[test]
fn family_with_explicit_set() {
    let out = sumsets(&["family", "--n", "120", "--s", "82,84,88,96,112,144"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["s"], serde_json::json!([82, 84, 88, 96, 112, 144]));
    let out = sumsets(&["family", "--n", "120", "--s", "82,84,86", "--no-loops"]);
    assert_eq!(out.status.code(), Some(0));
    let out = sumsets(&["family", "--n", "120", "--s", "83"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verifiers_with_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"structure": {"Zmod": 7}, "sets": [[0, 1, 2], [0, 3]]}"#,
            "cauchy-davenport",
            0,
        ),
        (
            r#"{"structure": {"Zmod": 8}, "sets": [[0, 1], [0, 1]]}"#,
            "cauchy-davenport",
            1,
        ),
        (
            r#"{"structure": "Z", "sets": [[0, 1], [0, 1], [0, 1], [0, 2]]}"#,
            "restsum",
            0,
        ),
        (
            r#"{"structure": "Z", "sets": [[0, 1, 2, 5], [0, 1]], "params": {"i": 1, "k": 3}}"#,
            "plunnecke",
            0,
        ),
        (
            r#"{"structure": "Z", "sets": [[0, 1, 2, 5], [0, 1], [0, 4]]}"#,
            "plunnecke-multi",
            0,
        ),
        (
            r#"{"structure": "Z", "sets": [[0, 1, 2, 5, 9], [0, 1]], "params": {"k": 3}}"#,
            "plunnecke-large",
            0,
        ),
        (
            r#"{"structure": "Z", "sets": [[0, 1, 2, 5, 9], [0, 1], [0, 3]], "params": {"t": "3/2"}}"#,
            "plunnecke-smooth",
            0,
        ),
        (
            r#"{"structure": "Z", "sets": [[0, 1, 3, 7]], "params": {"kmax": 4}}"#,
            "lev",
            0,
        ),
        (
            r#"{"structure": "Z", "sets": [[0, 1, 3], [0, 2]], "params": {"k": 2}}"#,
            "tensor",
            0,
        ),
        (
            r#"{"structure": {"Zd": 3}, "sets": [[[0,0,0],[0,0,1],[0,1,0],[1,0,0]]]}"#,
            "projection",
            0,
        ),
        (
            r#"{"structure": {"Zd": 2}, "sets": [[[0,0],[1,0]], [[0,0],[0,1]]]}"#,
            "superadd-tf",
            0,
        ),
        (
            r#"{"structure": {"Sym": 3}, "sets": [[[1,2,3],[2,1,3]], [[1,2,3],[2,3,1]], [[1,2,3]]]}"#,
            "q1",
            0,
        ),
        (
            r#"{"structure": "Z", "sets": [[0, 1], [0, 1], [0, 1], [0, 1], [0, 3]]}"#,
            "q2",
            0,
        ),
        (
            r#"{"structure": "Z", "sets": [[1, 2, 3]], "graph": {"edges": [[1, 2], [2, 3], [1, 3]]}}"#,
            "graph",
            0,
        ),
        (
            r#"{"structure": {"Intersect": 3}, "sets": [[3, 5], [6, 7]]}"#,
            "submult",
            0,
        ),
    ];
    for (i, (text, name, code)) in cases.iter().enumerate() {
        let p = write(dir.path(), &format!("{i}.json"), text);
        let out = verify(&p, name, &[]);
        assert_eq!(
            out.status.code(),
            Some(*code),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn hunt_summary_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("q1.jsonl");
    let out = sumsets(&[
        "hunt",
        "--question",
        "q1",
        "--budget",
        "500",
        "--log",
        log.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["instances_run"], 500);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    assert_eq!(std::fs::read_to_string(log).unwrap().lines().count(), 500);
}

#[test]
fn hunt_resumes_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("q2.jsonl");
    let ck = dir.path().join("ck.json");
    let base = [
        "hunt",
        "--question",
        "q2",
        "--seed",
        "3",
        "--log",
        log.to_str().unwrap(),
    ];
    let whole = dir.path().join("whole.jsonl");
    let out = sumsets(&[
        "hunt",
        "--question",
        "q2",
        "--seed",
        "3",
        "--budget",
        "60",
        "--log",
        whole.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let mut first = base.to_vec();
    first.extend(["--budget", "25", "--checkpoint", ck.to_str().unwrap()]);
    assert_eq!(sumsets(&first).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&ck).unwrap(), r#"{"next_index":25}"#);
    let mut second = base.to_vec();
    second.extend(["--budget", "35", "--checkpoint", ck.to_str().unwrap(), "--resume"]);
    assert_eq!(sumsets(&second).status.code(), Some(0));
    assert_eq!(std::fs::read(&log).unwrap(), std::fs::read(&whole).unwrap());
}

#[test]
fn hunt_rejects_bad_configs() {
    assert_eq!(
        sumsets(&["hunt", "--question", "q1", "--structure", "Z"]).status.code(),
        Some(1)
    );
    assert_eq!(
        sumsets(&["hunt", "--question", "q2", "--k", "2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        sumsets(&[
            "hunt",
            "--question",
            "q1",
            "--structure",
            "{\"Sym\": 4}",
            "--k",
            "4",
            "--size-cap",
            "3",
            "--budget",
            "50"
        ])
        .status
        .code(),
        Some(0)
    );
}

#[test]
fn selftest_passes() {
    let out = sumsets(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 failed"));
}
