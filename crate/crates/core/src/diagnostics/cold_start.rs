use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{share_series, CountShare, ShareBucket};
use crate::split::{EvalSide, SplitBundle};
use crate::time::Granularity;

/// Users and items of an evaluation side that never occur in train.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColdStartReport {
    pub side: EvalSide,
    /// Target users absent from train.
    pub cold_users: CountShare,
    /// Distinct target items absent from train.
    pub cold_items: CountShare,
    /// Target interactions on cold items.
    pub cold_interactions: CountShare,
    pub granularity: Granularity,
    pub cold_over_time: Vec<ShareBucket>,
}

impl ColdStartReport {
    pub fn cold_interactions_pct(&self) -> f64 {
        self.cold_interactions.pct
    }
}

pub fn cold_start(bundle: &SplitBundle, side: EvalSide, granularity: Granularity) -> ColdStartReport {
    let train = &bundle.train;
    let target = bundle.target(side);
    let train_users: HashSet<u32> = train.sequences().map(|(u, _)| u).collect();
    let train_items: HashSet<u32> = train.records().iter().map(|r| r.item).collect();

    let eval_users: Vec<u32> = target.sequences().map(|(u, _)| u).collect();
    let cold_users = eval_users.iter().filter(|u| !train_users.contains(u)).count();

    let target_items: HashSet<u32> = target.records().iter().map(|r| r.item).collect();
    let cold_items = target_items.iter().filter(|i| !train_items.contains(i)).count();

    let points: Vec<_> = target
        .records()
        .iter()
        .map(|r| (r.timestamp, !train_items.contains(&r.item)))
        .collect();
    let cold_rows = points.iter().filter(|(_, c)| *c).count();

    ColdStartReport {
        side,
        cold_users: CountShare::new(cold_users, eval_users.len()),
        cold_items: CountShare::new(cold_items, target_items.len()),
        cold_interactions: CountShare::new(cold_rows, target.len()),
        granularity,
        cold_over_time: share_series(points, granularity),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::log_from_rows;
    use crate::model::SubsetRole;
    use crate::split::{split, Provenance, SplitSpec, TargetMode};

    #[test]
    fn item_only_in_test_is_cold() {
        let log = log_from_rows(
            [
                ("u", "a", 1),
                ("u", "b", 2),
                ("v", "a", 3),
                ("u", "b", 4),
                ("w", "z", 5),
                ("u", "z", 6),
            ],
            SubsetRole::Raw,
        )
        .unwrap();
        let spec = SplitSpec::global_temporal(0.5, 0.6, TargetMode::AllItems).with_cold_filtering(false);
        let b = split(&log, &spec, Provenance::default()).unwrap();
        let r = cold_start(&b, EvalSide::Test, Granularity::Day);
        // test period: w-z@5, u-z@6
        assert_eq!(r.cold_items.count, 1);
        assert_eq!(r.cold_interactions.pct, 100.0);
        assert_eq!(r.cold_users.count, 1);
        assert_eq!(r.cold_users.total, 2);
    }

    #[test]
    fn loo_has_no_cold_users() {
        let log = log_from_rows(
            [
                ("u", "a", 1),
                ("u", "b", 2),
                ("u", "c", 3),
                ("v", "q", 9),
                ("v", "r", 10),
                ("v", "s", 11),
            ],
            SubsetRole::Raw,
        )
        .unwrap();
        let b = split(
            &log,
            &SplitSpec::leave_one_out().with_cold_filtering(false),
            Provenance::default(),
        )
        .unwrap();
        let r = cold_start(&b, EvalSide::Test, Granularity::Day);
        assert_eq!(r.cold_users.count, 0);
        assert_eq!(r.cold_items.count, 2);
    }
}
