use serde::{Deserialize, Serialize};

use super::distribution::DistributionSummary;
use crate::error::{Error, Result};
use crate::model::{InteractionLog, SubsetRole};

/// Repeat consumption. An interaction is *repeated* when its item already
/// occurred earlier in the user's sequence, and a *consecutive repeat* when
/// it equals the immediately preceding item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatReport {
    pub role: SubsetRole,
    pub n_interactions: usize,
    pub repeated_count: usize,
    pub consecutive_count: usize,
    pub repeated_interactions_pct: f64,
    pub consecutive_repeats_pct: f64,
    /// Per-user share of repeated interactions, percent.
    pub per_user_repeat_share: DistributionSummary,
}

pub fn repeat_stats(log: &InteractionLog) -> Result<RepeatReport> {
    if log.is_empty() {
        return Err(Error::EmptyLog);
    }
    // last_seen[item] = index of the last user sequence that contained it
    let mut last_seen = vec![usize::MAX; log.items_vocab().len()];
    let mut repeated = 0usize;
    let mut consecutive = 0usize;
    let mut shares = Vec::with_capacity(log.n_users());
    for (k, (_, seq)) in log.sequences().enumerate() {
        let mut user_repeated = 0usize;
        let mut prev = None;
        for r in seq {
            let seen = &mut last_seen[r.item as usize];
            if *seen == k {
                user_repeated += 1;
            }
            *seen = k;
            if prev == Some(r.item) {
                consecutive += 1;
            }
            prev = Some(r.item);
        }
        repeated += user_repeated;
        shares.push(100.0 * user_repeated as f64 / seq.len() as f64);
    }
    let n = log.len() as f64;
    Ok(RepeatReport {
        role: log.role(),
        n_interactions: log.len(),
        repeated_count: repeated,
        consecutive_count: consecutive,
        repeated_interactions_pct: 100.0 * repeated as f64 / n,
        consecutive_repeats_pct: 100.0 * consecutive as f64 / n,
        per_user_repeat_share: DistributionSummary::from_values(&shares),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::log_from_rows;

    #[test]
    fn aaba() {
        let log = log_from_rows(
            [("u", "a", 1), ("u", "a", 2), ("u", "b", 3), ("u", "a", 4)],
            SubsetRole::Raw,
        )
        .unwrap();
        let r = repeat_stats(&log).unwrap();
        assert_eq!((r.repeated_count, r.consecutive_count), (2, 1));
        assert_eq!(r.repeated_interactions_pct, 50.0);
        assert_eq!(r.consecutive_repeats_pct, 25.0);
    }

    #[test]
    fn repeats_do_not_cross_users() {
        let log = log_from_rows([("u", "a", 1), ("v", "a", 2)], SubsetRole::Raw).unwrap();
        let r = repeat_stats(&log).unwrap();
        assert_eq!((r.repeated_count, r.consecutive_count), (0, 0));
    }
}
