use proptest::prelude::*;
use splitaudit_core::diagnostics::ks_statistic;
use splitaudit_core::preprocess::{drop_consecutive_repeats, n_core_filter, shuffle_collision_order, PreprocessSpec};
use splitaudit_core::report::{evaluate, summarize, AuditReports, CardStatus, Direction, Threshold, ThresholdConfig};
use splitaudit_core::stats::{repeat_stats, temporal_stats, DistributionSummary};
use splitaudit_core::{InteractionLog, SubsetRole};
use splitaudit_testkit::*;

fn log_from_seed(seed: u64) -> (Vec<splitaudit_core::Interaction>, InteractionLog) {
    let params = LogParams {
        max_interactions: 200,
        ..LogParams::default()
    };
    random_log(&mut ChaCha8Rng::seed_from_u64(seed), &params)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn n_core_is_idempotent(seed: u64, n in 1usize..6) {
        let (_, log) = log_from_seed(seed);
        let once = n_core_filter(&log, n);
        prop_assert_eq!(n_core_filter(&once, n), once);
    }

    #[test]
    fn n_core_ignores_input_order(seed: u64, n in 1usize..6) {
        let (mut rows, log) = log_from_seed(seed);
        rows.reverse();
        let reversed = InteractionLog::from_interactions(rows, SubsetRole::Raw).unwrap();
        prop_assert_eq!(n_core_filter(&reversed, n), n_core_filter(&log, n));
    }

    #[test]
    fn n_core_survivors_meet_threshold(seed: u64, n in 1usize..6) {
        let (_, log) = log_from_seed(seed);
        let out = n_core_filter(&log, n);
        if !out.is_empty() {
            let core = splitaudit_core::stats::core_stats(&out).unwrap();
            prop_assert!(core.seq_len.min.unwrap() >= n as f64);
            prop_assert!(core.popularity.min.unwrap() >= n as f64);
        }
    }

    #[test]
    fn dedup_is_idempotent_and_removes_all_runs(seed: u64) {
        let (_, log) = log_from_seed(seed);
        let once = drop_consecutive_repeats(&log);
        prop_assert_eq!(drop_consecutive_repeats(&once), once.clone());
        prop_assert_eq!(repeat_stats(&once).unwrap().consecutive_repeats_pct, 0.0);
    }

    #[test]
    fn shuffle_preserves_multiset_and_is_seeded(seed: u64, shuffle_seed: u64) {
        let (_, log) = log_from_seed(seed);
        let a = shuffle_collision_order(&log, shuffle_seed);
        prop_assert_eq!(&a, &shuffle_collision_order(&log, shuffle_seed));
        let triples = |l: &InteractionLog| {
            let mut v: Vec<_> = l.iter().map(|r| (r.user_id.to_owned(), r.item_id.to_owned(), r.timestamp)).collect();
            v.sort();
            v
        };
        prop_assert_eq!(triples(&a), triples(&log));
        let mut ordinals: Vec<u64> = a.iter().map(|r| r.ordinal).collect();
        ordinals.sort_unstable();
        let mut before: Vec<u64> = log.iter().map(|r| r.ordinal).collect();
        before.sort_unstable();
        prop_assert_eq!(ordinals, before);
        // statistics that ignore within-timestamp order are unchanged
        prop_assert_eq!(temporal_stats(&a).unwrap(), temporal_stats(&log).unwrap());
    }

    #[test]
    fn preprocess_apply_is_deterministic(seed: u64, n in 1usize..4, dedup: bool, shuffle: Option<u64>) {
        let (_, log) = log_from_seed(seed);
        let spec = PreprocessSpec { n_core: Some(n), drop_consecutive_repeats: dedup, shuffle_collisions: shuffle };
        prop_assert_eq!(spec.apply(&log).unwrap(), spec.apply(&log).unwrap());
    }

    #[test]
    fn temporal_and_repeat_identities(seed: u64) {
        let (rows, log) = log_from_seed(seed);
        let t = temporal_stats(&log).unwrap();
        prop_assert_eq!(t.delta_t.count, log.len() - log.n_users());
        prop_assert!(t.user_lifetime.max.unwrap() <= t.timeframe_ms as f64);
        prop_assert!(t.item_lifetime.max.unwrap() <= t.timeframe_ms as f64);
        prop_assert!((0.0..=100.0).contains(&t.collision_rate_pct));
        let r = repeat_stats(&log).unwrap();
        let identity: usize = sequences(&rows)
            .values()
            .map(|s| s.len() - s.iter().map(|i| &i.item_id).collect::<std::collections::BTreeSet<_>>().len())
            .sum();
        prop_assert_eq!(r.repeated_count, identity);
        prop_assert!(r.consecutive_count <= r.repeated_count);
    }

    #[test]
    fn strictly_increasing_timestamps_never_collide(n in 1usize..50, step in 1i64..1000) {
        let log = splitaudit_core::ingest::log_from_rows((0..n).map(|k| ("u", format!("i{}", k % 3), k as i64 * step)), SubsetRole::Raw).unwrap();
        prop_assert_eq!(temporal_stats(&log).unwrap().collision_rate_pct, 0.0);
    }

    #[test]
    fn summaries_are_consistent(values in prop::collection::vec(-1e6f64..1e6, 1..300)) {
        let s = DistributionSummary::from_values(&values);
        prop_assert_eq!(s.histogram.iter().map(|b| b.count).sum::<usize>(), values.len());
        prop_assert!(s.histogram.len() <= 100);
        prop_assert!(s.quantiles.windows(2).all(|w| w[0].value <= w[1].value));
    }

    #[test]
    fn ks_symmetric_and_bounded(
        a in prop::collection::vec(0u8..20, 1..60),
        b in prop::collection::vec(0u8..20, 1..60),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let d = ks_statistic(&a, &b).unwrap();
        prop_assert_eq!(d, ks_statistic(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(ks_statistic(&a, &a).unwrap(), 0.0);
        prop_assert!((d - naive_ks(&a, &b)).abs() <= 1e-12);
    }

    #[test]
    fn card_status_matches_naive_comparator(value in -10.0f64..200.0, x in 0.0f64..100.0, y in 0.0f64..100.0, low: bool) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let (dir, t) = if low {
            (Direction::LowerIsWorse, Threshold::new(hi, lo))
        } else {
            (Direction::HigherIsWorse, Threshold::new(lo, hi))
        };
        let naive = if low {
            if value < lo { CardStatus::Alert } else if value < hi { CardStatus::Warn } else { CardStatus::Ok }
        } else if value >= hi { CardStatus::Alert } else if value >= lo { CardStatus::Warn } else { CardStatus::Ok };
        prop_assert_eq!(evaluate(Some(value), dir, t), naive);
    }

    #[test]
    fn raising_a_bad_value_never_improves(v in 0.0f64..100.0, bump in 0.0f64..100.0) {
        let rank = |s: CardStatus| match s { CardStatus::Ok => 0, CardStatus::Warn => 1, CardStatus::Alert => 2, CardStatus::NotApplicable => -1 };
        for (_, dir, t) in ThresholdConfig::default().entries() {
            if dir == Direction::HigherIsWorse {
                prop_assert!(rank(evaluate(Some(v + bump), dir, t)) >= rank(evaluate(Some(v), dir, t)));
            }
        }
    }
}

#[test]
fn summary_cards_have_fixed_order() {
    let s = summarize(&AuditReports::default(), &ThresholdConfig::default());
    let names: Vec<&str> = s.cards.iter().map(|c| c.metric.as_str()).collect();
    assert_eq!(
        names,
        [
            "collision_rate_pct",
            "consecutive_repeats_pct",
            "leaked_target_pct",
            "cold_items_pct",
            "cold_users_pct",
            "timegap_ks",
            "position_ks",
            "min_eval_users",
            "min_eval_interactions"
        ]
    );
}
