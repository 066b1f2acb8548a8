use splitaudit_core::report::{from_json, to_json, SCHEMA_VERSION};
use splitaudit_core::Error;
use splitaudit_testkit::fuzz::{fuzz_from_json, round_trip_generated};
use splitaudit_testkit::generated_documents;

#[test]
fn every_report_kind_round_trips() {
    let kinds = round_trip_generated(0..40);
    assert_eq!(kinds.len(), 14, "{kinds:?}");
}

#[test]
fn unknown_versions_are_rejected() {
    let doc = generated_documents(1).remove(0);
    let mut value: serde_json::Value = serde_json::from_slice(&to_json(&doc)).unwrap();
    for bad in [
        serde_json::json!(SCHEMA_VERSION + 1),
        serde_json::json!(0),
        serde_json::json!("1"),
        serde_json::Value::Null,
    ] {
        value["schema_version"] = bad;
        let err = from_json(&serde_json::to_vec(&value).unwrap()).unwrap_err();
        assert!(matches!(err, Error::SchemaVersionMismatch { .. }), "{err}");
    }
}

#[test]
fn ten_thousand_fuzz_cases_never_panic() {
    let outcomes = fuzz_from_json(10_000, 0xf022);
    assert_eq!(
        outcomes.accepted + outcomes.malformed + outcomes.version_mismatch,
        10_000
    );
    assert!(outcomes.malformed > 1000, "{outcomes:?}");
}

#[test]
fn shipped_threshold_file_holds_the_defaults() {
    use splitaudit_core::report::{Document, ThresholdConfig};
    let shipped = include_str!("../../../thresholds.default.json");
    assert_eq!(shipped.as_bytes(), to_json(&Document::Thresholds(ThresholdConfig::default())));
    assert_eq!(ThresholdConfig::from_json_str(shipped).unwrap(), ThresholdConfig::default());
}
