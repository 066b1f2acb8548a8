//! Split-level diagnostics: leakage, cold start, distribution shift, and
//! side-by-side comparison of several splits.

mod cold_start;
mod compare;
mod ks;
mod leakage;
mod shift;

use serde::{Deserialize, Serialize};

use crate::model::Timestamp;

pub use cold_start::{cold_start, ColdStartReport};
pub use compare::{compare_splits, CompareOptions, SplitComparisonMatrix, SplitComparisonRow};
pub use ks::ks_statistic;
pub use leakage::{leakage, LeakageReport, SharedIdentity};
pub use shift::{distribution_shift, shift_samples, ShiftReport, ShiftSamples};

/// Count and percentage of some flagged subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountShare {
    pub count: usize,
    pub total: usize,
    pub pct: f64,
}

impl CountShare {
    pub fn new(count: usize, total: usize) -> Self {
        CountShare {
            count,
            total,
            pct: if total == 0 {
                0.0
            } else {
                100.0 * count as f64 / total as f64
            },
        }
    }
}

/// Flagged share of target interactions within one time bucket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShareBucket {
    pub start: Timestamp,
    pub total: usize,
    pub flagged: usize,
    pub share_pct: f64,
}

pub(crate) fn share_series(
    points: impl IntoIterator<Item = (Timestamp, bool)>,
    granularity: crate::time::Granularity,
) -> Vec<ShareBucket> {
    let mut acc: std::collections::BTreeMap<Timestamp, (usize, usize)> = Default::default();
    for (ts, flagged) in points {
        let e = acc.entry(granularity.bucket_start(ts)).or_default();
        e.0 += 1;
        e.1 += usize::from(flagged);
    }
    acc.into_iter()
        .map(|(start, (total, flagged))| ShareBucket {
            start,
            total,
            flagged,
            share_pct: 100.0 * flagged as f64 / total as f64,
        })
        .collect()
}
