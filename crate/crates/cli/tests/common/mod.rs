#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Output {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

pub fn hdsteer(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_hdsteer"))
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn fixture(name: &str) -> String {
    tests_dir().join("fixtures").join(name).to_string_lossy().into_owned()
}

pub fn golden_path(name: &str) -> PathBuf {
    tests_dir().join("golden").join(name)
}

/// Seeded invocations covered by the golden files. Entries may refer to an
/// earlier golden output through `@name`.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("mub_d3.json", &["mub", "--d", "3"]),
    ("simulate_d5_c0.csv", &["simulate", "--d", "5", "--v", "0.9", "--mean", "1596", "--bases", "c,0", "--seed", "7"]),
    ("simulate_d5_all.csv", &["simulate", "--d", "5", "--v", "0.95", "--mean", "1596", "--all-bases", "--seed", "21"]),
    ("simulate_d3_exact.csv", &["simulate", "--d", "3", "--v", "1", "--mean", "900", "--all-bases", "--exact"]),
    ("certify_d5_c0.json", &["certify", "--counts", "@simulate_d5_c0.csv", "--pair", "c,0", "--resamples", "200", "--seed", "11"]),
    ("scan_d5.csv", &["certify", "--counts", "@simulate_d5_all.csv", "--scan", "--resamples", "100", "--seed", "5"]),
    ("table1_report.csv", &["certify", "--deltas", "#table1_deltas.csv"]),
    ("sr_maxent_d3.json", &["sr", "--gen", "maxent-mub", "--d", "3"]),
    ("sr_lhs_d2.json", &["sr", "--gen", "lhs-random", "--d", "2", "--seed", "1"]),
    ("csr_isotropic_d3.json", &["sr", "--gen", "isotropic", "--d", "3", "--v", "0.8", "--kind", "csr"]),
    ("threshold.csv", &["threshold", "--d-min", "3", "--d-max", "13"]),
];

pub fn resolve(args: &[&str]) -> Vec<String> {
    args.iter()
        .map(|a| {
            if let Some(name) = a.strip_prefix('@') {
                golden_path(name).to_string_lossy().into_owned()
            } else if let Some(name) = a.strip_prefix('#') {
                fixture(name)
            } else {
                a.to_string()
            }
        })
        .collect()
}

pub fn run_case(args: &[&str]) -> Output {
    let owned = resolve(args);
    let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
    hdsteer(&refs)
}
