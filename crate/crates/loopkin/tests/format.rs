use loopkin::format::{parse_mrdf, parse_unchecked, serialize_mrdf, validate_description, ParseError};
use loopkin::models::lookup;
use loopkin_core::mrdf::{Geometry, Severity, Visual};
use loopkin_core::DescriptionError;
use proptest::prelude::*;

#[test]
fn json_errors_carry_position() {
    let err = parse_mrdf("{\n  \"name\": \"x\",\n  \"links\": [,]\n}").unwrap_err();
    match err {
        ParseError::Json { line, column, .. } => assert_eq!((line, column), (3, 13)),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse_mrdf("{\"name\": 3}"), Err(ParseError::Json { line: 1, .. })));
}

#[test]
fn semantic_errors_are_separate_from_json_errors() {
    let mut desc = lookup("B").unwrap().description;
    desc.joints[0].parent = "ghost".into();
    let text = serialize_mrdf(&desc);
    assert!(parse_unchecked(&text).is_ok());
    assert!(matches!(parse_mrdf(&text), Err(ParseError::Description(DescriptionError::UnresolvedName { .. }))));
}

#[test]
fn mesh_paths_survive_round_trip() {
    let mut desc = lookup("C").unwrap().description;
    desc.links[1].visual = Visual { geometry: Geometry::Mesh { path: "meshes/crank.stl".into() }, ..Visual::unit_box() };
    let text = serialize_mrdf(&desc);
    assert!(text.contains("meshes/crank.stl"));
    assert_eq!(parse_mrdf(&text).unwrap(), desc);
}

#[test]
fn inverted_bounds_are_one_finding() {
    let mut desc = lookup("TCCHS").unwrap().description;
    desc.actuators[3].bounds = [2.0, 1.5];
    let findings = validate_description(&desc).unwrap();
    let errors: Vec<_> = findings.iter().filter(|f| f.severity == Severity::Error).collect();
    assert_eq!(errors.len(), 1, "{findings:?}");
    assert_eq!(errors[0].code, "bounds");
    assert!(errors[0].message.contains("A3") && errors[0].message.contains("inverted"));
}

proptest! {
    #[test]
    fn scaled_models_round_trip(scale in 0.2f64..5.0, which in 0usize..8) {
        let name = loopkin::models::BUILTIN[which];
        let desc = loopkin::models::builtin_robot(name, loopkin::models::ModelParams { scale }).unwrap().description;
        let text = serialize_mrdf(&desc);
        prop_assert_eq!(parse_mrdf(&text).unwrap(), desc);
    }
}
