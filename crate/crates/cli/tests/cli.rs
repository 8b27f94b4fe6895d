//! End-to-end runs of the binary, checking exit codes and report output.

use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitchin-linf")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn lemma_on_sl2_passes() {
    let out = cli(&["verify", "lemma", "--algebra", "sl2", "--trials", "100", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).starts_with("PASS"));
}

#[test]
fn funny_on_gl3_passes() {
    let out = cli(&["verify", "funny", "--algebra", "gl3", "--kmax", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn flip_koszul_fails_with_a_counterexample() {
    let out = cli(&["verify", "hitchin-morphism", "--model", "curve_sl2.toml", "--kmax", "2", "--negctl", "flip-koszul"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("counterexample:"));
}

#[test]
fn hitchin_verify_passes_on_the_curve_model() {
    let out = cli(&["hitchin", "verify", "--model", "curve_sl2.toml", "--kmax", "3", "--trials", "5", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    for anchor in ["Prop.hitchin1", "Prop.hitchin2", "Cor.obstruct"] {
        assert!(stdout(&out).contains(anchor));
    }
}

#[test]
fn only_filter_selects_a_single_suite() {
    let out = cli(&["run-all", "--only", "Prop.Lie2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("def-chi"));
    assert!(!text.contains("Lemma.lemma"));
}

#[test]
fn json_report_is_versioned_and_deterministic() {
    let dir = std::env::temp_dir().join(format!("hitchin-linf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let paths = [dir.join("a.json"), dir.join("b.json")];
    for p in &paths {
        let out = cli(&["verify", "lemma", "--algebra", "gl2", "--trials", "5", "--seed", "3", "--json", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read_to_string(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read_to_string(&paths[1]).unwrap());
    let report: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(report.get("schema_version").is_some());
    assert_eq!(report["suites"][0]["verdict"], "pass");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_model_exits_with_a_located_error() {
    let out = cli(&["verify", "hitchin-morphism", "--model", "/nonexistent/m.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/m.toml"));
}

#[test]
fn unknown_negative_control_is_a_usage_error() {
    assert_eq!(cli(&["verify", "lemma", "--negctl", "nonsense"]).status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn list_names_every_suite() {
    let out = cli(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    for id in ["artin", "hull", "obstruction", "curve_sl2"] {
        assert!(stdout(&out).contains(id));
    }
}
