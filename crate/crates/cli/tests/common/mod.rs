#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.json"))
}

pub fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_cubecover"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// One invocation per subcommand on fixed fixtures and seeds, with its
/// golden name and expected exit code.
pub fn cases() -> Vec<(&'static str, Vec<String>, i32)> {
    let f = |s: &str| fixture(s);
    let strs = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    vec![
        ("verify_degenerate2", strs(&["verify", "--input", &f("degenerate2.json")]), 1),
        ("verify_essential2", strs(&["verify", "--input", &f("essential2.json")]), 0),
        ("bounds_6", strs(&["bounds", "--n", "6"]), 0),
        ("oracle_2", strs(&["oracle", "--n", "2"]), 0),
        ("bang3", strs(&["bang", "--input", &f("bang3.json")]), 0),
        (
            "find_half_plane_roomy",
            strs(&["find-uncovered", "--input", &f("half-plane.json"), "--params", &f("roomy.json")]),
            0,
        ),
        (
            "find_half_plane_fallback",
            strs(&["find-uncovered", "--input", &f("half-plane.json"), "--fallback-exhaustive"]),
            0,
        ),
        (
            "find_sparse12",
            strs(&["find-uncovered", "--input", &f("sparse12.json"), "--params", &f("roomy.json"), "--seed", "3"]),
            0,
        ),
        (
            "decompose_sparse12",
            strs(&["decompose", "--input", &f("sparse12.json"), "--params", &f("roomy.json")]),
            0,
        ),
        ("lo_single", strs(&["experiment", "lo", "--vector", "1,1,1", "--target", "1"]), 0),
        ("lo_reduced4", strs(&["experiment", "lo", "--n", "4", "--reduced"]), 0),
        (
            "antichain_small",
            strs(&["experiment", "antichain", "--n", "6", "--trials", "3", "--seed", "1"]),
            0,
        ),
        ("scales_small", strs(&["experiment", "scales", "--trials", "2", "--seed", "1"]), 0),
    ]
}
