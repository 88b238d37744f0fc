use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn out_path(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("cnum-cli-{}-{tag}.json", std::process::id()))
}

/// Exit code and report of one run.
fn cnum(tag: &str, args: &[&str]) -> (i32, String) {
    let out = out_path(tag);
    let status = Command::new(env!("CARGO_BIN_EXE_cnum")).args(args).arg("--out").arg(&out).status().unwrap();
    let report = std::fs::read_to_string(&out).unwrap_or_default();
    let _ = std::fs::remove_file(&out);
    (status.code().unwrap(), report)
}

fn json(report: &str) -> Value {
    serde_json::from_str(report).unwrap()
}

#[test]
fn enumerate_counts() {
    let (code, r) = cnum("e1", &["enumerate", "--poset", &data("chain2.poset"), "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(json(&r)["count"], 6);
    let (code, r) = cnum("e2", &["enumerate", "--poset", &data("antichain3.poset"), "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(json(&r)["count"], 9);
    assert_eq!(cnum("e3", &["enumerate", "--poset", &data("chain2.poset"), "--n", "-1"]).0, 2);
    let (code, r) = cnum("e4", &["enumerate", "--poset", &data("chain2.poset"), "--n", "2", "--convention", "strict2"]);
    assert_eq!(code, 0);
    assert_eq!(json(&r)["config"]["convention"], "strict2");
}

#[test]
fn sample_reports() {
    let args = [
        "sample", "--poset", &data("chain2.poset"), "--spectrum", &data("chain2.spec"), "--sampler", "rejection",
        "--guard", "200", "--n", "3", "--samples", "20000", "--seed", "1",
    ];
    let (code, r) = cnum("s1", &args);
    assert_eq!(code, 0);
    let head = json(r.lines().next().unwrap());
    let rate = head["accept_rate"].as_f64().unwrap();
    assert!((rate - 4.0 / 7.0).abs() < 3.0 * (0.25f64 / 20000.0).sqrt() * 2.0, "{rate}");
    assert_eq!(head["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r.lines().count(), 20001);
    assert_eq!(json(r.lines().nth(1).unwrap())["word"].as_array().unwrap().len(), 3);

    let (code, _) = cnum("s2", &["sample", "--poset", &data("chain2.poset"), "--spectrum", &data("equal.spec")]);
    assert_eq!(code, 2);
}

#[test]
fn sample_trace() {
    let trace = out_path("trace-csv");
    let args = [
        "sample", "--poset", &data("chain3.poset"), "--spectrum", &data("chain3.spec"), "--n", "5", "--samples",
        "4", "--trace", trace.to_str().unwrap(),
    ];
    assert_eq!(cnum("s3", &args).0, 0);
    let csv = std::fs::read_to_string(&trace).unwrap();
    let _ = std::fs::remove_file(&trace);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "step,a,b,c");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("5,"));
}

#[test]
fn verify_exit_codes() {
    let base = ["verify", "--poset", &data("chain2.poset"), "--spectrum", &data("chain2.spec"), "--samples", "20000"];
    let (code, r) = cnum("v1", &[&base[..], &["--n", "6", "--long-word", "20000"]].concat());
    assert_eq!(code, 0);
    assert_eq!(json(&r)["exact_pass"], true);
    let (code, r) = cnum("v2", &[&base[..], &["--n", "6", "--inject-greedy", "0.9"]].concat());
    assert_eq!(code, 1);
    assert_eq!(json(&r)["exact_pass"], false);
    assert_eq!(cnum("v3", &[&base[..], &["--n", "1", "--long-word", "100"]].concat()).0, 0);
}

#[test]
fn zd_reports() {
    let (code, r) = cnum("z1", &["zd", "--diagram", &data("rows_columns.json")]);
    assert_eq!(code, 0);
    let v = json(&r);
    assert_eq!(v["decomposition"]["all_finite"], true);
    assert_eq!(v["decomposition"]["pairwise_intersections"][0]["diagram"]["cells"].as_array().unwrap().len(), 6);
    let (code, r) = cnum("z2", &["zd", "--diagram", &data("vbase.json")]);
    assert_eq!(code, 0);
    assert_eq!(json(&r)["chains"]["elements"], 3);
    assert_eq!(json(&r)["chains"]["covers"], 2);
    assert_eq!(cnum("z3", &["zd", "--diagram", &data("repeated_axis.json")]).0, 2);
    let (code, r) = cnum("z4", &["zd", "--diagram", &data("rows_columns.json"), "--spectrum", &data("rows_columns.spec")]);
    assert_eq!(code, 0);
    for comp in json(&r)["reduction"].as_array().unwrap() {
        let total: f64 = comp["normalized"].as_array().unwrap().iter().map(|e| e[1].as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rsk_reports() {
    let base = ["rsk", "--poset", &data("chain2.poset"), "--spectrum", &data("chain2.spec"), "--samples", "100000"];
    let (code, r) = cnum("r1", &[&base[..], &["--n", "2"]].concat());
    assert_eq!(code, 0);
    let v = json(&r);
    assert!(v["comparison"]["tv_distance"].as_f64().unwrap() <= v["comparison"]["envelope"].as_f64().unwrap());
    let control = ["--n", "2", "--control-spectrum", &data("chain2_control.spec")];
    assert_eq!(cnum("r2", &[&base[..], &control[..]].concat()).0, 1);
    assert_eq!(cnum("r3", &[&base[..], &["--n", "9"]].concat()).0, 3);
    let (code, r) = cnum("r4", &["rsk", "--poset", &data("chain1.poset"), "--spectrum", &data("chain1.spec"), "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(json(&r)["comparison"]["tv_distance"], 0.0);
}
