//! Threshold-evaluated summaries, the versioned JSON schema, and Markdown.

mod audit;
mod markdown;
mod schema;
mod summary;
mod thresholds;

pub use audit::run_audit;
pub use markdown::{
    render_comparison_markdown, render_comparison_text, render_markdown, render_stats_comparison_markdown,
    render_stats_markdown,
};
pub use schema::{from_json, to_json, to_json_string, Document, StatsComparison, SCHEMA_VERSION};
pub use summary::{evaluate, metric_link, summarize, AuditReports, Card, CardStatus, SummaryReport, TOOLKIT_VERSION};
pub use thresholds::{Direction, Threshold, ThresholdConfig};
