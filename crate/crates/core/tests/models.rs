//! Model-file loading: accepted fixtures and located rejections.

use std::path::Path;

use hitchin_linf::hitchin::HiggsModel;
use hitchin_linf::Error;

const BASE: &str = r#"
name = "probe"
algebra = "sl2"
invariants = "char-poly"
hol_generators = 1
antihol_generators = 1
"#;

fn parse(extra: &str) -> Result<HiggsModel, Error> {
    HiggsModel::parse(&format!("{BASE}{extra}"), "probe.toml", None)
}

fn rejection(extra: &str) -> (String, String) {
    match parse(extra) {
        Err(Error::Parse { location, message }) => (location, message),
        Err(e) => panic!("expected a located parse error, got {e}"),
        Ok(_) => panic!("model unexpectedly accepted"),
    }
}

#[test]
fn well_formed_model_builds_its_dgla() {
    let m = parse("degrees = [2]\ntheta = [[0, 0, 1]]\n").unwrap();
    assert!(m.dgla().is_ok());
}

#[test]
fn toml_syntax_errors_report_line_and_column() {
    let (location, message) = rejection("theta = [[0, 0, 1]\n");
    assert_eq!(location, "probe.toml");
    assert!(message.contains("line"), "{message}");
}

#[test]
fn declared_degrees_must_match_generators() {
    let (_, message) = rejection("degrees = [3]\ntheta = [[0, 0, 1]]\n");
    assert!(message.contains("degrees"), "{message}");
}

#[test]
fn theta_needs_one_entry_per_holomorphic_generator() {
    let (_, message) = rejection("theta = [[0, 0, 1], [0, 1, 0]]\n");
    assert!(message.contains("theta has 2 entries"), "{message}");
}

#[test]
fn theta_coefficients_match_algebra_dimension() {
    let (_, message) = rejection("theta = [[0, 1]]\n");
    assert!(message.contains("dimension 3"), "{message}");
}

#[test]
fn dbar_indices_are_range_checked() {
    let (_, message) = rejection("theta = [[0, 0, 1]]\n[[dbar]]\neta = 1\nwedge = [1, 2]\ncoeff = 1\n");
    assert!(message.contains("dbar[0]"), "{message}");
}

#[test]
fn noncommuting_theta_is_rejected_by_the_dgla() {
    let m = HiggsModel::parse(
        "name = \"x\"\nalgebra = \"sl2\"\ninvariants = \"char-poly\"\nhol_generators = 2\nantihol_generators = 1\ntheta = [[1, 0, 0], [0, 1, 0]]\n",
        "x.toml",
        None,
    )
    .unwrap();
    assert!(matches!(m.dgla(), Err(Error::Validation(_))));
}

#[test]
fn unknown_builtin_is_a_parse_error() {
    assert!(matches!(HiggsModel::builtin("nope"), Err(Error::Parse { .. })));
}

#[test]
fn missing_file_is_a_parse_error_naming_the_path() {
    match HiggsModel::load(Path::new("/nonexistent/model.toml")) {
        Err(Error::Parse { location, .. }) => assert!(location.contains("/nonexistent/model.toml")),
        other => panic!("unexpected {:?}", other.map(|m| m.name)),
    }
}

#[test]
fn bare_fixture_name_resolves_to_builtin() {
    assert_eq!(HiggsModel::load(Path::new("curve_sl2.toml")).unwrap().name, "curve_sl2");
}

#[test]
fn model_over_an_algebra_spec_file_loads() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/curve_gl2_spec.toml");
    let m = HiggsModel::load(&path).unwrap();
    assert_eq!(m.algebra.dim(), 4);
    assert_eq!(m.quotient.degrees(), vec![1, 2]);
    assert!(m.dgla().is_ok());
}

#[test]
fn every_builtin_fixture_loads() {
    for name in HiggsModel::builtin_names() {
        assert!(HiggsModel::builtin(name).unwrap().dgla().is_ok(), "{name}");
    }
}
