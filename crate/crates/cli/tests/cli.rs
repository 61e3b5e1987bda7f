use std::process::{Command, Output};

fn rootchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rootchain"))
        .args(args)
        .env_remove("ROOTCHAIN_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

#[test]
fn analyze_sextic_s1() {
    let o = rootchain(&["analyze", "x^6-x^2", "--s", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["arrangement"], "P < Q < P^2Q < Q < P");
    assert_eq!(v["rolle_count"], 3);
    assert_eq!(v["admissibility"]["verdict"], true);
    let roots: Vec<f64> = v["rolle_roots"][0]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let r = 3f64.powf(-0.25);
    for (got, want) in roots.iter().zip([-r, 0.0, r]) {
        assert!((got - want).abs() < 1e-9);
    }
}

#[test]
fn analyze_sextic_s3_splits_triple_root() {
    let o = rootchain(&["analyze", "x^6-x^2", "--s", "3", "--json"]);
    let v = json(&o);
    assert_eq!(v["arrangement"], "P < P^2Q^3 < P");
    assert_eq!(v["rolle_assignments"], serde_json::json!([[0, 1, 0]]));
}

#[test]
fn analyze_double_root() {
    let o = rootchain(&["analyze", "x^2", "--s", "1"]);
    assert!(stdout(&o).contains("arrangement: P^2Q "));
}

#[test]
fn analyze_parse_error_exits_2() {
    let o = rootchain(&["analyze", "x^^2", "--s", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn analyze_ambiguous_float_exits_3() {
    // roots 1e-9 apart: one cluster in floating point, two roots exactly
    let o = rootchain(&["analyze", "(x - 1)*(x - 1.000000001)*(x + 3)", "--s", "1", "--float"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let forced = rootchain(&["analyze", "(x - 1)*(x - 1.000000001)*(x + 3)", "--s", "1", "--force-float"]);
    assert_eq!(forced.status.code(), Some(0));
}

#[test]
fn enumerate_counts() {
    let two = rootchain(&["enumerate", "--n", "2", "--s", "1", "--m", "0", "--count-only"]);
    assert_eq!(stdout(&two).trim(), "2");
    let bad = rootchain(&["enumerate", "--n", "2", "--s", "2", "--m", "0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn realize_exit_codes() {
    let ok = rootchain(&["realize", "P^2Q", "--n", "2", "--s", "1", "--json"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["reextracted"], "P^2Q");

    let sextic = rootchain(&["realize", "P < Q < P^2Q < Q < P", "--n", "6", "--s", "1", "--m", "1", "--mprime", "1"]);
    assert_eq!(sextic.status.code(), Some(0));

    let bad = rootchain(&["realize", "Q < P < P"]);
    assert_eq!(bad.status.code(), Some(4));
    assert!(stdout(&bad).contains("RolleChain1"));
}

#[test]
fn realize_unreachable_target_exits_5() {
    let o = rootchain(&["realize", "Q < P < Q", "--n", "3", "--s", "1", "--m", "1"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn closure_sizes() {
    let count = |arr: &str, extra: &[&str]| {
        let mut args = vec!["closure", arr, "--json"];
        args.extend_from_slice(extra);
        json(&rootchain(&args)).as_array().unwrap().len()
    };
    assert_eq!(count("P < Q < P", &[]), 4);
    assert_eq!(count("P^2Q", &[]), 1);
    assert_eq!(count("P < Q < P^2Q < Q < P", &["--m", "1", "--mprime", "1"]), 16);
}

#[test]
fn verify_writes_catalog_and_rereads_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cat.json");
    let o = rootchain(&["verify", "--n", "2", "--s", "1", "--m", "0", "--samples", "500", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let cat: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cat["rows"].as_array().unwrap().len(), 2);
    assert_eq!(cat["soundness"]["samples"], 500);

    let re = rootchain(&["verify", "--from-catalog", out.to_str().unwrap()]);
    assert_eq!(re.status.code(), Some(0), "{}", stdout(&re));
}

#[test]
fn tampered_catalog_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cat.csv");
    rootchain(&["enumerate", "--n", "3", "--s", "1", "--m", "0", "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out).unwrap();
    let tampered = text.replacen(",true,", ",false,", 1);
    std::fs::write(&out, tampered).unwrap();
    let re = rootchain(&["verify", "--from-catalog", out.to_str().unwrap()]);
    assert_eq!(re.status.code(), Some(6));
}

#[test]
fn verify_partial_failure_exits_6() {
    let o = rootchain(&["verify", "--n", "3", "--s", "1", "--m", "1", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn verify_respects_cap() {
    let o = rootchain(&["verify", "--n", "7", "--s", "1", "--m", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, "n_box = 0.5\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rootchain"))
        .args(["enumerate", "--n", "2", "--s", "1", "--m", "0"])
        .env("ROOTCHAIN_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output_is_deterministic() {
    let run = |jobs: &str| {
        stdout(&rootchain(&["verify", "--n", "3", "--s", "2", "--m", "0", "--seed", "5", "--samples", "2000", "--jobs", jobs, "--json"]))
    };
    assert_eq!(run("1"), run("4"));
}
