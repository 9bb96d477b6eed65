//! Acceptance suite: one test per criterion, run at full size with a fixed
//! master seed. Each test prints its report block (visible with
//! `--nocapture`) and fails if any sub-check fails.

use std::process::Command;

use acp_core::verify::{self, CheckFn, Scale};

const SEED: u64 = 0x5EED;

fn run(check: CheckFn) {
    let result = check(SEED, Scale::Full).expect("check runs");
    print!("{}", result.render());
    assert!(result.passed, "criterion {} failed:\n{}", result.criterion, result.render());
}

#[test]
fn criterion_01_offspring_law() {
    run(verify::check_offspring_law);
}

#[test]
fn criterion_02_progeny_generating_function() {
    run(verify::check_progeny_pgf);
}

#[test]
fn criterion_03_exponential_tails() {
    run(verify::check_exponential_tails);
}

#[test]
fn criterion_04_stochastic_domination() {
    run(verify::check_domination);
}

#[test]
fn criterion_05_exact_oracle_equivalence() {
    run(verify::check_oracle_equivalence);
}

#[test]
fn criterion_06_meanfield_threshold() {
    run(verify::check_meanfield_threshold);
}

#[test]
fn criterion_07_extinction_phase() {
    run(verify::check_extinction_phase);
}

#[test]
fn criterion_08_block_events() {
    run(verify::check_block_events);
}

#[test]
fn criterion_09_percolation_combinatorics() {
    run(verify::check_percolation_combinatorics);
}

#[test]
fn criterion_10_verify_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<Vec<(String, Vec<u8>)>> = ["first", "second"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let status = Command::new(env!("CARGO_BIN_EXE_acp"))
                .args(["verify", "--seed", "24301", "--set", "scale=quick", "--out", out.to_str().unwrap()])
                .status()
                .expect("binary runs");
            assert!(matches!(status.code(), Some(0 | 1)));
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
                .unwrap()
                .map(|e| e.unwrap())
                .filter(|e| e.file_name() != "timing.json")
                .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
                .collect();
            files.sort();
            files
        })
        .collect();
    let names: Vec<&str> = outputs[0].iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["summary.json", "verify.csv", "verify_report.txt"]);
    let identical = outputs[0] == outputs[1];
    println!("criterion 10 reproducibility: {}", if identical { "pass" } else { "FAIL" });
    assert!(identical, "verify outputs differ between runs");
}
