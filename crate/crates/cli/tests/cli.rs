mod common;

use common::{fixture, hdsteer};
use hdsteer::mub::MubSet;
use serde_json::Value;

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn mub_rejects_composite_dimension() {
    let out = hdsteer(&["mub", "--d", "6"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("prime"));
}

#[test]
fn mub_d31_validates_on_load() {
    let out = hdsteer(&["mub", "--d", "31"]);
    assert_eq!(out.code, 0);
    let set = MubSet::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(set.bases().len(), 32);
    assert!(set.max_unbiasedness_defect() < 1e-12);
}

#[test]
fn simulate_argument_errors() {
    assert_eq!(hdsteer(&["simulate", "--d", "5", "--v", "1.2", "--bases", "1,2", "--seed", "1"]).code, 2);
    assert_eq!(hdsteer(&["simulate", "--d", "5", "--v", "0.5", "--bases", "1,2"]).code, 2);
    assert_eq!(hdsteer(&["simulate", "--d", "9", "--v", "0.5", "--bases", "1,2", "--seed", "1"]).code, 2);
}

#[test]
fn simulate_shapes() {
    let out = hdsteer(&["simulate", "--d", "5", "--v", "1", "--mean", "1596", "--bases", "1,2", "--seed", "7"]);
    assert_eq!(out.code, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let labels: std::collections::BTreeSet<_> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels.into_iter().collect::<Vec<_>>(), ["1", "2"]);

    let all = hdsteer(&["simulate", "--d", "5", "--v", "0.7", "--all-bases", "--exact"]);
    assert_eq!(String::from_utf8(all.stdout).unwrap().lines().count(), 1 + 6 * 25);
}

fn analytic_delta(d: usize, v: f64) -> f64 {
    let df = d as f64;
    let lambda = 1.0 + 1.0 / df.sqrt();
    let sr = ((2.0 * v + 2.0 * (1.0 - v) / df) / lambda - 1.0).max(0.0);
    ((1.0 + sr) / (1.0 - sr)).powi(2)
}

#[test]
fn exact_simulation_round_trips_through_certify() {
    let dir = tempfile::tempdir().unwrap();
    for (d, v) in [(3usize, 0.95), (5, 0.9), (7, 0.85)] {
        let counts = dir.path().join(format!("exact{d}.csv"));
        let counts = counts.to_str().unwrap();
        let sim = hdsteer(&[
            "simulate", "--d", &d.to_string(), "--v", &v.to_string(), "--bases", "c,1", "--exact", "--out", counts,
        ]);
        assert_eq!(sim.code, 0, "{}", sim.stderr);
        let cert = hdsteer(&["certify", "--counts", counts, "--resamples", "0"]);
        let doc = json(&cert.stdout);
        let delta = doc["delta"].as_f64().unwrap();
        assert!((delta - analytic_delta(d, v)).abs() < 1e-9, "d={d}: {delta}");
        let n = doc["certified_n"].as_u64().unwrap();
        assert_eq!(cert.code, if n >= 2 { 0 } else { 1 });
    }
}

#[test]
fn noiseless_maximally_entangled_certifies_full_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("max.csv");
    let counts = counts.to_str().unwrap();
    assert_eq!(hdsteer(&["simulate", "--d", "5", "--v", "1", "--bases", "0,3", "--exact", "--out", counts]).code, 0);
    let cert = hdsteer(&["certify", "--counts", counts, "--pair", "0,3", "--seed", "2", "--resamples", "50"]);
    assert_eq!(cert.code, 0);
    assert_eq!(json(&cert.stdout)["certified_n"], 5);
}

#[test]
fn uniform_counts_certify_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("x,a,b,count\n");
    for x in ["c", "0"] {
        for a in 0..3 {
            for b in 0..3 {
                text.push_str(&format!("{x},{a},{b},10\n"));
            }
        }
    }
    let path = write_temp(&dir, "uniform.csv", &text);
    let out = hdsteer(&["certify", "--counts", &path, "--seed", "1", "--resamples", "20"]);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out.stdout)["certified_n"], 1);
}

#[test]
fn malformed_counts_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "bad.csv", "x,a,b,count\nc,0,0,4\nc,1,one,3\n");
    let out = hdsteer(&["certify", "--counts", &path, "--resamples", "0"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
}

#[test]
fn bootstrap_requires_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "ok.csv", "x,a,b,count\nc,0,0,4\nc,1,1,3\n0,0,0,2\n0,1,1,2\n");
    assert_eq!(hdsteer(&["certify", "--counts", &path]).code, 2);
}

#[test]
fn delta_fixtures_reproduce_published_column() {
    let out = hdsteer(&["certify", "--deltas", &fixture("table1_deltas.csv")]);
    assert_eq!(out.code, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let column: Vec<u32> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(column, [5, 7, 10, 11, 13, 14, 12, 13, 15]);
}

#[test]
fn sr_generators() {
    let out = hdsteer(&["sr", "--gen", "maxent-mub", "--d", "3"]);
    assert_eq!(out.code, 0);
    let v = json(&out.stdout)["value"].as_f64().unwrap();
    assert!((v - (2.0 - 3f64.sqrt())).abs() < 1e-5);

    let out = hdsteer(&["sr", "--gen", "lhs-random", "--d", "2", "--seed", "1"]);
    assert!(json(&out.stdout)["value"].as_f64().unwrap().abs() < 1e-6);

    let out = hdsteer(&["sr", "--gen", "isotropic", "--d", "3", "--v", "0.8"]);
    let want = (2.0 * 0.8 + 2.0 * 0.2 / 3.0) / (1.0 + 1.0 / 3f64.sqrt()) - 1.0;
    assert!((json(&out.stdout)["value"].as_f64().unwrap() - want).abs() < 1e-5);

    let out = hdsteer(&["sr", "--kind", "ir", "--d", "3", "--pair", "0,2"]);
    let ceiling = (3f64.sqrt() - 1.0) / (3f64.sqrt() + 1.0);
    assert!((json(&out.stdout)["value"].as_f64().unwrap() - ceiling).abs() < 1e-5);
}

#[test]
fn sr_reports_iteration_cap() {
    let out = hdsteer(&["sr", "--gen", "maxent-mub", "--d", "3", "--max-iterations", "5"]);
    assert_eq!(out.code, 3);
    let doc = json(&out.stdout);
    assert_eq!(doc["status"], "maxIterations");
    assert!(doc["lower_bound"].as_f64().unwrap() <= doc["value"].as_f64().unwrap());
}

#[test]
fn sr_rejects_large_dimension() {
    assert_eq!(hdsteer(&["sr", "--gen", "maxent-mub", "--d", "17"]).code, 2);
}

#[test]
fn threshold_diagonal_is_one() {
    let out = hdsteer(&["threshold", "--d-min", "2", "--d-max", "31"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[0] == f[1] {
            assert!((f[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-12, "{line}");
            rows += 1;
        }
    }
    assert_eq!(rows, 30);
}
