use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InteractionLog, SubsetRole, Timestamp};
use crate::time::{Granularity, TimeRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    pub start: Timestamp,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineSeries {
    pub role: SubsetRole,
    /// Non-empty buckets in chronological order.
    pub buckets: Vec<Bucket>,
    /// Interactions outside the requested range.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineReport {
    pub granularity: Granularity,
    /// `None` only when every input log is empty and no range was given.
    pub range: Option<TimeRange>,
    pub series: Vec<TimelineSeries>,
}

impl TimelineReport {
    pub fn series(&self, role: SubsetRole) -> Option<&TimelineSeries> {
        self.series.iter().find(|s| s.role == role)
    }
}

/// Interaction counts per calendar bucket for each subset. Without an
/// explicit range the union of the logs' time ranges is used.
pub fn timeline(
    logs: &[(SubsetRole, &InteractionLog)],
    granularity: Granularity,
    range: Option<TimeRange>,
) -> Result<TimelineReport> {
    if let Some(r) = range {
        if r.start > r.end {
            return Err(Error::InvalidRange {
                start: r.start,
                end: r.end,
            });
        }
    }
    let range = range.or_else(|| {
        logs.iter()
            .filter_map(|(_, l)| l.time_range())
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
            .map(|(start, end)| TimeRange { start, end })
    });
    let series = logs
        .iter()
        .map(|&(role, log)| {
            let mut counts: BTreeMap<Timestamp, usize> = BTreeMap::new();
            let mut excluded = 0;
            for r in log.records() {
                if range.is_some_and(|rg| rg.contains(r.timestamp)) {
                    *counts.entry(granularity.bucket_start(r.timestamp)).or_default() += 1;
                } else {
                    excluded += 1;
                }
            }
            TimelineSeries {
                role,
                buckets: counts
                    .into_iter()
                    .map(|(start, count)| Bucket { start, count })
                    .collect(),
                excluded,
            }
        })
        .collect();
    Ok(TimelineReport {
        granularity,
        range,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::log_from_rows;
    use crate::time::DAY_MS;

    #[test]
    fn one_per_day() {
        let log = log_from_rows((0..7).map(|d| ("u", "i", d * DAY_MS + 5)), SubsetRole::Raw).unwrap();
        let t = timeline(&[(SubsetRole::Raw, &log)], Granularity::Day, None).unwrap();
        let s = t.series(SubsetRole::Raw).unwrap();
        assert_eq!(s.buckets.len(), 7);
        assert!(s.buckets.iter().all(|b| b.count == 1));
        assert_eq!(s.buckets[3].start, 3 * DAY_MS);
    }

    #[test]
    fn empty_role_and_range_exclusion() {
        let log = log_from_rows([("u", "i", 10), ("u", "j", 2 * DAY_MS)], SubsetRole::Train).unwrap();
        let empty = InteractionLog::from_interactions(std::iter::empty(), SubsetRole::TestTarget).unwrap();
        let t = timeline(
            &[(SubsetRole::Train, &log), (SubsetRole::TestTarget, &empty)],
            Granularity::Day,
            Some(TimeRange { start: 0, end: DAY_MS }),
        )
        .unwrap();
        assert_eq!(t.series(SubsetRole::Train).unwrap().excluded, 1);
        assert!(t.series(SubsetRole::TestTarget).unwrap().buckets.is_empty());
    }

    #[test]
    fn inverted_range_rejected() {
        let log = log_from_rows([("u", "i", 10)], SubsetRole::Raw).unwrap();
        assert!(matches!(
            timeline(
                &[(SubsetRole::Raw, &log)],
                Granularity::Hour,
                Some(TimeRange { start: 5, end: 1 })
            ),
            Err(Error::InvalidRange { .. })
        ));
    }
}
