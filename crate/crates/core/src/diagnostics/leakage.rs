use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{share_series, CountShare, ShareBucket};
use crate::model::{InteractionLog, Timestamp};
use crate::split::{EvalSide, SplitBundle};
use crate::time::{Granularity, TimeRange};

/// How target rows are matched against train rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SharedIdentity {
    /// (user, item, timestamp, ordinal): the bundle's ordinals identify
    /// source events.
    Record,
    /// (user, item, timestamp): ordinals are file-local.
    Triple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub side: EvalSide,
    pub n_targets: usize,
    /// Target rows also present in train.
    pub shared_interactions: usize,
    pub shared_identity: SharedIdentity,
    pub train_range: Option<TimeRange>,
    /// Over input ∪ target.
    pub eval_range: Option<TimeRange>,
    /// Share of the evaluation timeframe covered by the train timeframe.
    pub overlap_pct: f64,
    /// Targets earlier than the latest train interaction.
    pub leaked_targets: CountShare,
    /// Targets earlier than a train interaction with the same item.
    pub leaked_item_targets: CountShare,
    pub granularity: Granularity,
    pub leaked_over_time: Vec<ShareBucket>,
}

impl LeakageReport {
    pub fn leaked_target_pct(&self) -> f64 {
        self.leaked_targets.pct
    }

    pub fn leaked_item_target_pct(&self) -> f64 {
        self.leaked_item_targets.pct
    }

    pub fn is_empty(&self) -> bool {
        self.n_targets == 0
    }
}

pub fn leakage(bundle: &SplitBundle, side: EvalSide, granularity: Granularity) -> LeakageReport {
    let train = &bundle.train;
    let input = bundle.input(side);
    let target = bundle.target(side);

    let identity = if bundle.ordinals_consistent {
        SharedIdentity::Record
    } else {
        SharedIdentity::Triple
    };
    let shared = match identity {
        SharedIdentity::Record => {
            let keys: HashSet<_> = train.records().iter().copied().collect();
            target.records().iter().filter(|r| keys.contains(r)).count()
        }
        SharedIdentity::Triple => {
            let keys: HashSet<_> = train.records().iter().map(|r| (r.user, r.item, r.timestamp)).collect();
            target
                .records()
                .iter()
                .filter(|r| keys.contains(&(r.user, r.item, r.timestamp)))
                .count()
        }
    };

    let train_range = range_of(train);
    let eval_range = union_range(range_of(input), range_of(target));
    let overlap_pct = match (train_range, eval_range) {
        (Some(t), Some(e)) if e.is_point() => {
            if t.contains(e.start) {
                100.0
            } else {
                0.0
            }
        }
        (Some(t), Some(e)) => 100.0 * t.overlap_len(&e) as f64 / e.duration() as f64,
        _ => 0.0,
    };

    let max_train = train_range.map(|r| r.end);
    let mut item_latest: Vec<Option<Timestamp>> = vec![None; train.items_vocab().len()];
    for r in train.records() {
        let slot = &mut item_latest[r.item as usize];
        *slot = Some(slot.map_or(r.timestamp, |t| t.max(r.timestamp)));
    }

    let mut leaked = 0usize;
    let mut leaked_item = 0usize;
    let mut points = Vec::with_capacity(target.len());
    for r in target.records() {
        let is_leaked = max_train.is_some_and(|m| r.timestamp < m);
        let is_item_leaked = item_latest
            .get(r.item as usize)
            .copied()
            .flatten()
            .is_some_and(|t| r.timestamp < t);
        leaked += usize::from(is_leaked);
        leaked_item += usize::from(is_item_leaked);
        points.push((r.timestamp, is_leaked));
    }

    LeakageReport {
        side,
        n_targets: target.len(),
        shared_interactions: shared,
        shared_identity: identity,
        train_range,
        eval_range,
        overlap_pct,
        leaked_targets: CountShare::new(leaked, target.len()),
        leaked_item_targets: CountShare::new(leaked_item, target.len()),
        granularity,
        leaked_over_time: share_series(points, granularity),
    }
}

fn range_of(log: &InteractionLog) -> Option<TimeRange> {
    log.time_range().map(|(start, end)| TimeRange { start, end })
}

fn union_range(a: Option<TimeRange>, b: Option<TimeRange>) -> Option<TimeRange> {
    match (a, b) {
        (Some(a), Some(b)) => Some(TimeRange {
            start: a.start.min(b.start),
            end: a.end.max(b.end),
        }),
        (a, None) => a,
        (None, b) => b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::log_from_rows;
    use crate::model::SubsetRole;
    use crate::split::{split, Provenance, SplitSpec, TargetMode};

    fn two_users() -> InteractionLog {
        // u is active early, v late: LOO targets of u precede v's history
        log_from_rows(
            [
                ("u", "a", 1),
                ("u", "b", 2),
                ("u", "c", 3),
                ("u", "a", 4),
                ("v", "a", 10),
                ("v", "b", 11),
                ("v", "c", 12),
                ("v", "b", 13),
            ],
            SubsetRole::Raw,
        )
        .unwrap()
    }

    #[test]
    fn gts_has_no_leakage() {
        let spec = SplitSpec::global_temporal(0.5, 0.75, TargetMode::AllItems).with_cold_filtering(false);
        let b = split(&two_users(), &spec, Provenance::default()).unwrap();
        let r = leakage(&b, EvalSide::Test, Granularity::Day);
        assert_eq!(r.leaked_target_pct(), 0.0);
        assert_eq!(r.shared_interactions, 0);
        assert_eq!(r.shared_identity, SharedIdentity::Record);
    }

    #[test]
    fn loo_leaks_early_users() {
        let b = split(&two_users(), &SplitSpec::leave_one_out(), Provenance::default()).unwrap();
        let r = leakage(&b, EvalSide::Test, Granularity::Day);
        // u's target (t=4) precedes train max (v's t=11); v's target (t=13) does not
        assert_eq!(r.leaked_targets.count, 1);
        assert_eq!(r.leaked_target_pct(), 50.0);
        // item a is trained at t=10 > 4
        assert_eq!(r.leaked_item_targets.count, 1);
        // eval range [1,13], train range [1,11]
        assert!((r.overlap_pct - 100.0 * 10.0 / 12.0).abs() < 1e-12);
        assert_eq!(r.leaked_over_time.len(), 1);
        assert_eq!(r.leaked_over_time[0].share_pct, 50.0);
    }

    #[test]
    fn empty_targets_give_zero_report() {
        let log = two_users();
        let spec = SplitSpec::leave_one_out();
        let mut b = split(&log, &spec, Provenance::default()).unwrap();
        b.val_target = b.val_target.empty_like(SubsetRole::ValTarget);
        let r = leakage(&b, EvalSide::Validation, Granularity::Day);
        assert!(r.is_empty());
        assert_eq!(r.leaked_target_pct(), 0.0);
    }
}
