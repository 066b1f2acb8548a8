use serde::{Deserialize, Serialize};

use super::distribution::DistributionSummary;
use crate::error::{Error, Result};
use crate::model::InteractionLog;

/// Counts, density, and per-user / per-item volume distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreStatsReport {
    pub role: crate::model::SubsetRole,
    pub n_users: usize,
    pub n_items: usize,
    pub n_interactions: usize,
    /// Interactions per user.
    pub avg_seq_len: f64,
    /// `100 · interactions / (users · items)`
    pub density_pct: f64,
    /// Interactions per item.
    pub popularity: DistributionSummary,
    /// Interactions per user.
    pub seq_len: DistributionSummary,
}

pub fn core_stats(log: &InteractionLog) -> Result<CoreStatsReport> {
    if log.is_empty() {
        return Err(Error::EmptyLog);
    }
    let seq_lens: Vec<f64> = log.sequences().map(|(_, s)| s.len() as f64).collect();
    let mut per_item = vec![0usize; log.items_vocab().len()];
    for r in log.records() {
        per_item[r.item as usize] += 1;
    }
    let popularity: Vec<f64> = per_item.into_iter().filter(|&c| c > 0).map(|c| c as f64).collect();

    let n_users = seq_lens.len();
    let n_items = popularity.len();
    let n_interactions = log.len();
    Ok(CoreStatsReport {
        role: log.role(),
        n_users,
        n_items,
        n_interactions,
        avg_seq_len: n_interactions as f64 / n_users as f64,
        density_pct: 100.0 * n_interactions as f64 / (n_users as f64 * n_items as f64),
        popularity: DistributionSummary::from_values(&popularity),
        seq_len: DistributionSummary::from_values(&seq_lens),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::log_from_rows;
    use crate::model::SubsetRole;

    #[test]
    fn single_interaction() {
        let log = log_from_rows([("u", "i", 0)], SubsetRole::Raw).unwrap();
        let r = core_stats(&log).unwrap();
        assert_eq!(r.density_pct, 100.0);
        assert_eq!(r.avg_seq_len, 1.0);
    }

    #[test]
    fn counts_and_density() {
        let log = log_from_rows(
            [("u", "a", 0), ("u", "a", 1), ("u", "b", 2), ("v", "a", 0)],
            SubsetRole::Raw,
        )
        .unwrap();
        let r = core_stats(&log).unwrap();
        assert_eq!((r.n_users, r.n_items, r.n_interactions), (2, 2, 4));
        assert_eq!(r.avg_seq_len, 2.0);
        assert_eq!(r.density_pct, 100.0);
        assert_eq!(r.popularity.max, Some(3.0));
        assert_eq!(r.seq_len.min, Some(1.0));
    }

    #[test]
    fn empty_log_is_error() {
        let log = InteractionLog::from_interactions(std::iter::empty(), SubsetRole::Raw).unwrap();
        assert!(matches!(core_stats(&log), Err(Error::EmptyLog)));
    }
}
