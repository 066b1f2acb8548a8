//! Versioned JSON envelope shared by every report and the threshold config:
//!
//! ```json
//! { "schema_version": 1, "kind": "leakage", "report": { ... } }
//! ```

use serde::{Deserialize, Serialize};

use super::summary::{AuditReports, SummaryReport};
use super::thresholds::ThresholdConfig;
use crate::diagnostics::{ColdStartReport, LeakageReport, ShiftReport, SplitComparisonMatrix};
use crate::error::{Error, Result};
use crate::ingest::ValidationReport;
use crate::split::SplitDescription;
use crate::stats::{ComparisonTable, CoreStatsReport, RepeatReport, StatsReport, TemporalStatsReport, TimelineReport};

/// Bumped on every structural change to any document.
pub const SCHEMA_VERSION: u32 = 1;

/// A dataset report together with the same report for a reference subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsComparison {
    pub analysed: StatsReport,
    pub reference: StatsReport,
    pub comparison: ComparisonTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "report", rename_all = "snake_case")]
// built once per response and serialized straight away; boxing buys nothing
#[allow(clippy::large_enum_variant)]
pub enum Document {
    CoreStats(CoreStatsReport),
    TemporalStats(TemporalStatsReport),
    RepeatStats(RepeatReport),
    Timeline(TimelineReport),
    StatsComparison(StatsComparison),
    Validation(ValidationReport),
    SplitDescription(SplitDescription),
    Leakage(LeakageReport),
    ColdStart(ColdStartReport),
    Shift(ShiftReport),
    SplitComparison(SplitComparisonMatrix),
    Audit(AuditReports),
    Summary(SummaryReport),
    Thresholds(ThresholdConfig),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::CoreStats(_) => "core_stats",
            Document::TemporalStats(_) => "temporal_stats",
            Document::RepeatStats(_) => "repeat_stats",
            Document::Timeline(_) => "timeline",
            Document::StatsComparison(_) => "stats_comparison",
            Document::Validation(_) => "validation",
            Document::SplitDescription(_) => "split_description",
            Document::Leakage(_) => "leakage",
            Document::ColdStart(_) => "cold_start",
            Document::Shift(_) => "shift",
            Document::SplitComparison(_) => "split_comparison",
            Document::Audit(_) => "audit",
            Document::Summary(_) => "summary",
            Document::Thresholds(_) => "thresholds",
        }
    }
}

macro_rules! from_report {
    ($($variant:ident($ty:ty)),* $(,)?) => {$(
        impl From<$ty> for Document {
            fn from(r: $ty) -> Self {
                Document::$variant(r)
            }
        }
    )*};
}

from_report! {
    CoreStats(CoreStatsReport),
    TemporalStats(TemporalStatsReport),
    RepeatStats(RepeatReport),
    Timeline(TimelineReport),
    StatsComparison(StatsComparison),
    Validation(ValidationReport),
    SplitDescription(SplitDescription),
    Leakage(LeakageReport),
    ColdStart(ColdStartReport),
    Shift(ShiftReport),
    SplitComparison(SplitComparisonMatrix),
    Audit(AuditReports),
    Summary(SummaryReport),
    Thresholds(ThresholdConfig),
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    #[serde(flatten)]
    document: &'a Document,
}

/// Pretty-printed, newline-terminated.
pub fn to_json(document: &Document) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&Envelope {
        schema_version: SCHEMA_VERSION,
        document,
    })
    .expect("reports serialize to JSON");
    out.push(b'\n');
    out
}

pub fn to_json_string(document: &Document) -> String {
    String::from_utf8(to_json(document)).expect("serde_json emits UTF-8")
}

pub fn from_json(bytes: &[u8]) -> Result<Document> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    let serde_json::Value::Object(mut map) = value else {
        return Err(Error::MalformedDocument("top level must be an object".into()));
    };
    let version = map
        .remove("schema_version")
        .ok_or_else(|| Error::MalformedDocument("missing `schema_version`".into()))?;
    match version.as_i64() {
        Some(v) if v == i64::from(SCHEMA_VERSION) => {}
        found => {
            return Err(Error::SchemaVersionMismatch {
                found,
                expected: SCHEMA_VERSION,
            })
        }
    }
    serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| Error::MalformedDocument(e.to_string()))
}
