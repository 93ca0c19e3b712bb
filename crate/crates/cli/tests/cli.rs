use std::process::Command;

use serde_json::Value;

fn gfc(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gfc"))
        .args(args)
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v, stdout)
}

#[test]
fn curve_genus() {
    let (code, v, _) = gfc(&[
        "curve", "genus", "--family", "IIb1", "--q", "7", "--n", "3", "--m", "3", "--a", "2",
        "--b", "1", "--c", "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["closed"], 4);
    assert_eq!(v["rh"], 4);
}

#[test]
fn dickson() {
    let (code, v, _) = gfc(&["dickson", "--q", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["group_order"], 120);
    assert_eq!(v["dichotomy_violations"], Value::Array(vec![]));
}

#[test]
fn exit_codes() {
    // a = -bc
    let (code, _, _) = gfc(&[
        "curve", "genus", "--family", "IIb1", "--q", "7", "--n", "3", "--m", "3", "--a", "6",
        "--b", "1", "--c", "1",
    ]);
    assert_eq!(code, 2);
    let (code, _, _) = gfc(&[
        "curve", "genus", "--family", "I", "--q", "7", "--n", "3", "--m", "3", "--a", "1",
    ]);
    assert_eq!(code, 2);
    let (code, _, _) = gfc(&[
        "curve", "genus", "--family", "I", "--q", "7", "--n", "5", "--m", "3", "--a", "1", "--b",
        "1",
    ]);
    assert_eq!(code, 2);
    let (code, _, _) = gfc(&[
        "verify",
        "--suite",
        "genus",
        "--qset",
        "17",
        "--max-exp",
        "4",
    ]);
    assert_eq!(code, 3);
    let (code, _, _) = gfc(&[
        "curve", "places", "--family", "I", "--q", "7", "--n", "3", "--m", "3", "--a", "1", "--b",
        "1", "--L", "13",
    ]);
    assert_eq!(code, 3);
}

#[test]
fn subcommands() {
    let (code, v, _) = gfc(&["field-audit", "--q", "9"]);
    assert_eq!((code, &v["pass"]), (0, &Value::Bool(true)));
    let (code, v, _) = gfc(&["quotient", "--q", "7", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["quotient"]["kind"], "nonsplit");
    let (code, v, _) = gfc(&[
        "orbits", "--family", "IIb2", "--q", "7", "--n", "4", "--m", "3", "--a", "1", "--b", "0",
        "--c", "0", "--d", "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["case"], "T4-two-preserved");
    let (code, v, _) = gfc(&[
        "aut", "--family", "IIb1", "--q", "11", "--n", "5", "--m", "2", "--a", "1", "--b", "1",
        "--c", "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["check"]["quotient"], "D10");
    let (code, _, _) = gfc(&["equiv", "overlap", "--q", "7", "--n", "3"]);
    assert_eq!(code, 0);
    let (code, v, _) = gfc(&["equiv", "artin-schreier", "--p", "3", "--r", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["translations"], 3);
    let (code, _, _) = gfc(&[
        "equiv", "quadrex", "--family", "IIb3", "--q", "5", "--n", "3", "--m", "3", "--a", "0",
        "--b", "1", "--c", "1", "--d", "0",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn verify_is_deterministic_and_writes_markdown() {
    let dir = std::env::temp_dir().join(format!("gfc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("r.md");
    let args = [
        "verify",
        "--suite",
        "genus,frobenius,dickson",
        "--qset",
        "5,7",
        "--max-exp",
        "5",
    ];
    let (c1, _, a) = gfc(&[&args[..], &["--workers", "1"]].concat());
    let (c2, v, b) = gfc(&[&args[..], &["--workers", "2"]].concat());
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(v["schema"], 1);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["paper_anchor"].as_str().is_some_and(|s| !s.is_empty())));
    let (c3, _, md) = gfc(&[
        &args[..],
        &["--output", "markdown", "--out", out.to_str().unwrap()],
    ]
    .concat());
    assert_eq!(c3, 0);
    assert!(md.contains("| check | anchor |"));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), md);
}
