use serde::{Deserialize, Serialize};

use super::distribution::DistributionSummary;
use crate::error::{Error, Result};
use crate::model::{InteractionLog, SubsetRole, Timestamp};

/// How the collision rate is counted; carried in every report.
pub const COLLISION_DEFINITION: &str =
    "share of interactions whose timestamp equals that of at least one other interaction of the same user";

/// Timeframe, inter-event gaps, timestamp collisions and entity lifetimes.
/// Durations are milliseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalStatsReport {
    pub role: SubsetRole,
    pub start_ts: Timestamp,
    pub end_ts: Timestamp,
    pub timeframe_ms: i64,
    /// Gaps between consecutive interactions of the same user.
    pub delta_t: DistributionSummary,
    pub collision_count: usize,
    pub collision_rate_pct: f64,
    pub collision_definition: String,
    pub user_lifetime: DistributionSummary,
    pub item_lifetime: DistributionSummary,
}

pub fn temporal_stats(log: &InteractionLog) -> Result<TemporalStatsReport> {
    let (start_ts, end_ts) = log.time_range().ok_or(Error::EmptyLog)?;

    let mut gaps = Vec::with_capacity(log.len());
    let mut user_lifetimes = Vec::with_capacity(log.n_users());
    let mut collisions = 0usize;
    for (_, seq) in log.sequences() {
        for w in seq.windows(2) {
            gaps.push((w[1].timestamp - w[0].timestamp) as f64);
        }
        user_lifetimes.push((seq[seq.len() - 1].timestamp - seq[0].timestamp) as f64);
        let mut start = 0;
        while start < seq.len() {
            let end = start
                + seq[start..]
                    .iter()
                    .take_while(|r| r.timestamp == seq[start].timestamp)
                    .count();
            if end - start > 1 {
                collisions += end - start;
            }
            start = end;
        }
    }

    let mut item_span: Vec<Option<(Timestamp, Timestamp)>> = vec![None; log.items_vocab().len()];
    for r in log.records() {
        let slot = &mut item_span[r.item as usize];
        *slot = Some(match *slot {
            None => (r.timestamp, r.timestamp),
            Some((lo, hi)) => (lo.min(r.timestamp), hi.max(r.timestamp)),
        });
    }
    let item_lifetimes: Vec<f64> = item_span
        .into_iter()
        .flatten()
        .map(|(lo, hi)| (hi - lo) as f64)
        .collect();

    Ok(TemporalStatsReport {
        role: log.role(),
        start_ts,
        end_ts,
        timeframe_ms: end_ts - start_ts,
        delta_t: DistributionSummary::from_durations(&gaps),
        collision_count: collisions,
        collision_rate_pct: 100.0 * collisions as f64 / log.len() as f64,
        collision_definition: COLLISION_DEFINITION.to_owned(),
        user_lifetime: DistributionSummary::from_durations(&user_lifetimes),
        item_lifetime: DistributionSummary::from_durations(&item_lifetimes),
    })
}
