mod common;

use common::{cases, fixture, golden_path, run};
use serde_json::Value;

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("stdout is JSON")
}

/// Set `UPDATE_GOLDEN=1` to rewrite the golden files from the current binary.
#[test]
fn outputs_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, args, code) in cases() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = run(&args);
        assert_eq!(r.code, code, "{name}: {}", r.stderr);
        let path = golden_path(name);
        if update {
            std::fs::write(&path, &r.stdout).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {name}"));
        assert_eq!(r.stdout, expected, "{name} drifted from its golden file");
    }
}

#[test]
fn degenerate_cover_fails_e2_only() {
    let r = run(&["verify", "--input", &fixture("degenerate2.json")]);
    assert_eq!(r.code, 1);
    let v = json(&r.stdout);
    assert_eq!(v["e1"]["holds"], true);
    assert_eq!(v["e2"]["holds"], false);
    assert_eq!(v["e3"]["holds"], true);
}

#[test]
fn bounds_at_six() {
    let r = run(&["bounds", "--n", "6"]);
    assert_eq!(r.code, 0);
    assert_eq!(json(&r.stdout)["lr_lower"], 3.0);
}

#[test]
fn half_plane_vertex_is_emitted() {
    for extra in [vec!["--params", &fixture("roomy.json")], vec!["--fallback-exhaustive"]] {
        let mut args = vec!["find-uncovered", "--input"];
        let input = fixture("half-plane.json");
        args.push(&input);
        args.extend(extra.iter().copied());
        let r = run(&args);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let v = json(&r.stdout);
        assert_eq!(v["status"], "found");
        let x: Vec<i64> = serde_json::from_value(v["vertex"].clone()).unwrap();
        assert!(x == [1, 1] || x == [-1, -1]);
    }
}

#[test]
fn default_params_reject_the_half_plane_premise() {
    // n^0.52 / 10 < 1 at n = 2
    let r = run(&["find-uncovered", "--input", &fixture("half-plane.json")]);
    assert_eq!(r.code, 2);
    assert_eq!(json(&r.stdout)["status"], "premise_failure");
}

#[test]
fn essential_cover_is_not_reported_found() {
    for fallback in [false, true] {
        let input = fixture("essential2.json");
        let params = fixture("roomy.json");
        let mut args = vec!["find-uncovered", "--input", &input, "--params", &params];
        if fallback {
            args.push("--fallback-exhaustive");
        }
        let r = run(&args);
        assert_ne!(r.code, 0);
        assert_ne!(json(&r.stdout)["status"], "found");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["verify"]).code, 2);
    assert_eq!(run(&["bounds", "--n", "3", "--frobnicate"]).code, 2);
    assert_eq!(run(&["no-such-command"]).code, 2);
    assert_eq!(run(&["verify", "--input", "/nonexistent/cover.json"]).code, 2);
    assert_eq!(run(&["bounds", "--n", "0"]).code, 2);
}

#[test]
fn invalid_params_are_rejected_before_dispatch() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"c0": 0.5}"#).unwrap();
    let r = run(&["bounds", "--n", "4", "--params", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    std::fs::write(&bad, r#"{"unknown_knob": 1}"#).unwrap();
    let r = run(&["bounds", "--n", "4", "--params", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
}

#[test]
fn exhausted_oracle_budget_exits_with_three() {
    let r = run(&["oracle", "--n", "3", "--budget", "5"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.json");
    let r = run(&["bounds", "--n", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let v = json(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(v["lr_lower"], 2.0);
}

#[test]
fn verbose_summary_goes_to_stderr() {
    let r = run(&["bounds", "--n", "2", "-v"]);
    assert!(r.stderr.contains("lr_lower=2"));
    json(&r.stdout);
}
