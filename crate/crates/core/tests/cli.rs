use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_hplab");
const CONFIGS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");

fn hplab(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn config(name: &str) -> String {
    format!("{CONFIGS}/{name}")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("MANIFEST.json")).unwrap()).unwrap()
}

#[test]
fn type2_writes_2n_rows_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let out = hplab(&["type2", "--config", &config("markov.json"), "--n", "16", "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let csv = fs::read_to_string(a.join("zeros_type2_n16.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("re,im,family,n"));
    assert_eq!(lines.count(), 32);
    for f in ["zeros_type2_n16.csv", "summary_type2.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let m = manifest(&a);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["files"], manifest(&b)["files"]);
    assert_eq!(m["config"]["degrees"], serde_json::json!([16]));
}

#[test]
fn type2_three_degrees() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hplab(&["type2", "--n", "8,16,32", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for n in [8, 16, 32] {
        assert!(tmp.path().join(format!("zeros_type2_n{n}.csv")).exists());
    }
    let s: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("summary_type2.json")).unwrap()).unwrap();
    assert_eq!(s["results"].as_array().unwrap().len(), 3);
    let files = manifest(tmp.path())["files"].as_object().unwrap().len();
    assert_eq!(files, 4);
}

#[test]
fn equilibrium_both_reports_consistency() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hplab(&["equilibrium", "--mode", "both", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("equilibrium_scalar.json").exists());
    assert!(tmp.path().join("equilibrium_vector.json").exists());
    let r: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("equilibrium_report.json")).unwrap()).unwrap();
    assert!(r["ks_mu_composed_lambda_e"].as_f64().unwrap() <= 1e-2);
}

#[test]
fn equilibrium_scalar_on_two_components_spans_both() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hplab(&[
        "equilibrium",
        "--mode",
        "scalar",
        "--config",
        &config("markov-two-interval.json"),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let sol: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("equilibrium_scalar.json")).unwrap()).unwrap();
    let text = sol["measure"].to_string();
    let mass = |lo: f64, hi: f64| -> f64 {
        let nodes = sol["measure"]["nodes"].as_array().unwrap();
        let weights = sol["measure"]["weights"].as_array().unwrap();
        nodes
            .iter()
            .zip(weights)
            .filter(|(z, _)| {
                let x = z[0].as_f64().unwrap();
                (lo..=hi).contains(&x)
            })
            .map(|(_, w)| w.as_f64().unwrap())
            .sum()
    };
    assert!(mass(2.0, 2.5) > 0.1 && mass(3.0, 3.5) > 0.1, "{text}");
}

#[test]
fn equilibrium_vector_needs_one_interval() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hplab(&[
        "equilibrium",
        "--mode",
        "vector",
        "--config",
        &config("markov-two-interval.json"),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_support_exits_2_with_failed_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, r#"{"pair":{"kind":"markov","support":[[0.5,3.0]]}}"#).unwrap();
    let dir = tmp.path().join("out");
    let out = hplab(&["equilibrium", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pair"));
    assert_eq!(manifest(&dir)["status"], "failed");
}

#[test]
fn malformed_json_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, "{ not json").unwrap();
    let out = hplab(&["type2", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suite_and_example_exit_2() {
    assert_eq!(hplab(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(hplab(&["figure", "--example", "5"]).status.code(), Some(2));
}

#[test]
fn type1_on_markov_pair_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hplab(&["type1", "--config", &config("markov.json"), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn type1_writes_three_families() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hplab(&["type1", "--n", "6", "--prec-bits", "256", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for j in 0..3 {
        let csv = fs::read_to_string(tmp.path().join(format!("zeros_type1_Q{j}_n6.csv"))).unwrap();
        assert!(csv.lines().skip(1).all(|l| l.ends_with(&format!("type1_Q{j},6"))), "{csv}");
    }
    assert_eq!(manifest(tmp.path())["config"]["precision_bits"], 256);
}

#[test]
fn verify_lemma2_spread() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hplab(&["verify", "--suite", "lemma2", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("report_lemma2.json")).unwrap()).unwrap();
    assert!(r.to_string().contains("spread"));
}

#[test]
fn verify_all_on_default_config_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hplab(&["verify", "--suite", "all", "--threads", "2", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(tmp.path());
    assert_eq!(m["status"], "ok");
    assert_eq!(m["files"].as_object().unwrap().len(), 4);
}

#[test]
fn failing_tolerance_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("strict.json");
    fs::write(
        &cfg,
        r#"{"pair":{"kind":"markov","support":[[2,3]]},"degrees":[8,16],"tolerances":{"lemma1_ks":1e-6}}"#,
    )
    .unwrap();
    let dir = tmp.path().join("out");
    let out = hplab(&["verify", "--suite", "lemma1", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(manifest(&dir)["status"], "check-failed");
    assert!(dir.join("report_lemma1.json").exists());
}

#[test]
fn figure_example_one_emits_four_clouds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hplab(&["figure", "--example", "1", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csvs = fs::read_dir(tmp.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count();
    assert_eq!(csvs, 4);
    let r: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("figure_report.json")).unwrap()).unwrap();
    assert!(r["type2"]["fraction_small_imag"].as_f64().unwrap() >= 0.9);
}
