use serde::{Deserialize, Serialize};

use super::basic::CoreStatsReport;
use super::distribution::DistributionSummary;
use super::repeats::RepeatReport;
use super::temporal::TemporalStatsReport;
use crate::error::{Error, Result};

/// A dataset-level report that can be compared with a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StatsReport {
    Core(CoreStatsReport),
    Temporal(TemporalStatsReport),
    Repeats(RepeatReport),
}

impl StatsReport {
    pub fn kind(&self) -> &'static str {
        match self {
            StatsReport::Core(_) => "core",
            StatsReport::Temporal(_) => "temporal",
            StatsReport::Repeats(_) => "repeats",
        }
    }

    /// Numeric fields in a fixed order. Distributions contribute their
    /// mean, median and extremes.
    pub fn numeric_fields(&self) -> Vec<(String, Option<f64>)> {
        let mut out = Vec::new();
        let mut put = |name: &str, v: f64| out.push((name.to_owned(), Some(v)));
        match self {
            StatsReport::Core(r) => {
                put("n_users", r.n_users as f64);
                put("n_items", r.n_items as f64);
                put("n_interactions", r.n_interactions as f64);
                put("avg_seq_len", r.avg_seq_len);
                put("density_pct", r.density_pct);
                distribution_fields(&mut out, "popularity", &r.popularity);
                distribution_fields(&mut out, "seq_len", &r.seq_len);
            }
            StatsReport::Temporal(r) => {
                put("start_ts", r.start_ts as f64);
                put("end_ts", r.end_ts as f64);
                put("timeframe_ms", r.timeframe_ms as f64);
                put("collision_count", r.collision_count as f64);
                put("collision_rate_pct", r.collision_rate_pct);
                distribution_fields(&mut out, "delta_t", &r.delta_t);
                distribution_fields(&mut out, "user_lifetime", &r.user_lifetime);
                distribution_fields(&mut out, "item_lifetime", &r.item_lifetime);
            }
            StatsReport::Repeats(r) => {
                put("n_interactions", r.n_interactions as f64);
                put("repeated_count", r.repeated_count as f64);
                put("consecutive_count", r.consecutive_count as f64);
                put("repeated_interactions_pct", r.repeated_interactions_pct);
                put("consecutive_repeats_pct", r.consecutive_repeats_pct);
                distribution_fields(&mut out, "per_user_repeat_share", &r.per_user_repeat_share);
            }
        }
        out
    }
}

fn distribution_fields(out: &mut Vec<(String, Option<f64>)>, prefix: &str, d: &DistributionSummary) {
    out.push((format!("{prefix}.count"), Some(d.count as f64)));
    out.push((format!("{prefix}.mean"), d.mean));
    out.push((format!("{prefix}.median"), d.median()));
    out.push((format!("{prefix}.min"), d.min));
    out.push((format!("{prefix}.max"), d.max));
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub field: String,
    pub analysed: Option<f64>,
    pub reference: Option<f64>,
    /// `100 · (analysed − reference) / reference`; absent when the
    /// reference is zero or a side is missing.
    pub delta_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub kind: String,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn row(&self, field: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.field == field)
    }
}

pub fn compare_stats(analysed: &StatsReport, reference: &StatsReport) -> Result<ComparisonTable> {
    if analysed.kind() != reference.kind() {
        return Err(Error::TypeMismatch {
            analysed: analysed.kind(),
            reference: reference.kind(),
        });
    }
    let rows = analysed
        .numeric_fields()
        .into_iter()
        .zip(reference.numeric_fields())
        .map(|((field, a), (_, r))| {
            let delta_pct = match (a, r) {
                (Some(a), Some(r)) if r != 0.0 => Some(100.0 * (a - r) / r),
                _ => None,
            };
            ComparisonRow {
                field,
                analysed: a,
                reference: r,
                delta_pct,
            }
        })
        .collect();
    Ok(ComparisonTable {
        kind: analysed.kind().to_owned(),
        rows,
    })
}
