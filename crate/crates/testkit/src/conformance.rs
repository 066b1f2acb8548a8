//! Optimized statistics and diagnostics against the naive oracles. Checks
//! panic with a description of the first mismatch.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use splitaudit_core::diagnostics::{cold_start, ks_statistic, leakage, shift_samples};
use splitaudit_core::preprocess::{drop_consecutive_repeats, n_core_filter};
use splitaudit_core::split::{split, EvalSide, Provenance, SplitSpec, TargetMode};
use splitaudit_core::stats::{core_stats, repeat_stats, temporal_stats, timeline, DistributionSummary};
use splitaudit_core::time::{Granularity, TimeRange};
use splitaudit_core::{Error, InteractionLog, SubsetRole};

use crate::*;

const REL: f64 = 1e-9;

pub fn check_summary(what: &str, got: &DistributionSummary, want: &NaiveSummary) {
    assert_eq!(got.count, want.count, "{what} count");
    for (g, w, field) in [
        (got.mean, want.mean, "mean"),
        (got.min, want.min, "min"),
        (got.max, want.max, "max"),
    ] {
        match (g, w) {
            (Some(g), Some(w)) => assert!(close(g, w, REL), "{what} {field}: {g} vs {w}"),
            (None, None) => {}
            other => panic!("{what} {field}: {other:?}"),
        }
    }
    let got_q: Vec<f64> = got.quantiles.iter().map(|q| q.value).collect();
    assert_eq!(got_q.len(), want.quantiles.len(), "{what} quantiles");
    for (g, w) in got_q.iter().zip(&want.quantiles) {
        assert!(close(*g, *w, REL), "{what} quantile {g} vs {w}");
    }
    assert_eq!(
        got.histogram.iter().map(|b| b.count).sum::<usize>(),
        got.count,
        "{what} histogram"
    );
}

pub fn check_dataset(rows: &[splitaudit_core::Interaction], log: &InteractionLog, rng: &mut ChaCha8Rng) {
    let core = core_stats(log).unwrap();
    let want = naive_core(rows);
    assert_eq!(
        (core.n_users, core.n_items, core.n_interactions),
        (want.n_users, want.n_items, want.n_interactions)
    );
    assert!(close(core.avg_seq_len, want.avg_seq_len, REL));
    assert!(close(core.density_pct, want.density_pct, REL));
    check_summary("popularity", &core.popularity, &want.popularity);
    check_summary("seq_len", &core.seq_len, &want.seq_len);

    let temporal = temporal_stats(log).unwrap();
    let want = naive_temporal(rows);
    assert_eq!((temporal.start_ts, temporal.end_ts), (want.start_ts, want.end_ts));
    assert_eq!(temporal.collision_count, want.collision_count);
    assert!(close(temporal.collision_rate_pct, want.collision_rate_pct, REL));
    check_summary("delta_t", &temporal.delta_t, &want.delta_t);
    check_summary("user_lifetime", &temporal.user_lifetime, &want.user_lifetime);
    check_summary("item_lifetime", &temporal.item_lifetime, &want.item_lifetime);

    let repeats = repeat_stats(log).unwrap();
    let want = naive_repeats(rows);
    assert_eq!(
        (repeats.repeated_count, repeats.consecutive_count),
        (want.repeated_count, want.consecutive_count)
    );
    assert!(close(repeats.repeated_interactions_pct, want.repeated_pct, REL));
    assert!(close(repeats.consecutive_repeats_pct, want.consecutive_pct, REL));
    check_summary(
        "per_user_repeat_share",
        &repeats.per_user_repeat_share,
        &want.per_user_share,
    );

    let g = [
        Granularity::Hour,
        Granularity::Day,
        Granularity::Week,
        Granularity::Month,
    ][rng.random_range(0..4)];
    let (lo, hi) = (want_range(rows).0, want_range(rows).1);
    let range = if rng.random_bool(0.5) {
        let a = rng.random_range(lo..=hi);
        let b = rng.random_range(a..=hi);
        Some(TimeRange { start: a, end: b })
    } else {
        None
    };
    let report = timeline(&[(SubsetRole::Raw, log)], g, range).unwrap();
    let r = range.unwrap_or(TimeRange { start: lo, end: hi });
    let (buckets, excluded) = naive_timeline(rows, g, r.start, r.end);
    let series = report.series(SubsetRole::Raw).unwrap();
    let got: Vec<(i64, usize)> = series.buckets.iter().map(|b| (b.start, b.count)).collect();
    assert_eq!(got, buckets.into_iter().collect::<Vec<_>>(), "timeline {g}");
    assert_eq!(series.excluded, excluded);
}

fn want_range(rows: &[splitaudit_core::Interaction]) -> (i64, i64) {
    let ts = rows.iter().map(|r| r.timestamp);
    (ts.clone().min().unwrap(), ts.max().unwrap())
}

fn random_spec(rng: &mut ChaCha8Rng) -> SplitSpec {
    let spec = if rng.random_bool(0.4) {
        SplitSpec::leave_one_out()
    } else {
        let q_val = rng.random_range(0.3..0.9);
        let q_test = rng.random_range(q_val..1.0);
        let mode = if rng.random_bool(0.5) {
            TargetMode::AllItems
        } else {
            TargetMode::LastItem
        };
        SplitSpec::global_temporal(q_val, q_test, mode)
    };
    spec.with_cold_filtering(rng.random_bool(0.5))
}

pub fn check_split(rows: &[splitaudit_core::Interaction], log: &InteractionLog, rng: &mut ChaCha8Rng) -> usize {
    let spec = random_spec(rng);
    let bundle = match split(log, &spec, Provenance::default()) {
        Ok(b) => b,
        Err(Error::DegenerateSplit(_) | Error::EmptyEvaluation { .. }) => return 0,
        Err(e) => panic!("{e}"),
    };
    let train = rows_of(&bundle.train);
    let g = [Granularity::Hour, Granularity::Day, Granularity::Week][rng.random_range(0..3)];
    let mut checked = 0;
    for side in [EvalSide::Validation, EvalSide::Test] {
        let input = rows_of(bundle.input(side));
        let target = rows_of(bundle.target(side));

        let got = leakage(&bundle, side, g);
        let want = naive_leakage(&train, &input, &target, bundle.ordinals_consistent, g);
        assert_eq!(got.n_targets, want.n_targets);
        assert_eq!(got.shared_interactions, want.shared);
        assert!(
            close(got.overlap_pct, want.overlap_pct, REL),
            "{} vs {}",
            got.overlap_pct,
            want.overlap_pct
        );
        assert_eq!(got.leaked_targets.count, want.leaked);
        assert_eq!(got.leaked_item_targets.count, want.leaked_item);
        let series: Vec<(i64, (usize, usize))> = got
            .leaked_over_time
            .iter()
            .map(|b| (b.start, (b.total, b.flagged)))
            .collect();
        assert_eq!(series, want.over_time.into_iter().collect::<Vec<_>>());
        if spec.strategy != splitaudit_core::split::SplitStrategy::LeaveOneOut {
            assert_eq!(got.leaked_targets.count, 0, "GTS leaks");
            assert_eq!(got.shared_interactions, 0, "GTS shares");
        }

        let got = cold_start(&bundle, side, g);
        let want = naive_cold_start(&train, &target);
        assert_eq!(
            (
                got.cold_users.count,
                got.cold_users.total,
                got.cold_items.count,
                got.cold_items.total
            ),
            (want.cold_users, want.eval_users, want.cold_items, want.target_items)
        );
        assert_eq!(
            (got.cold_interactions.count, got.cold_interactions.total),
            (want.cold_rows, want.n_targets)
        );
        if spec.filter_cold_items {
            assert_eq!(got.cold_items.count, 0);
        }

        if target.is_empty() {
            continue;
        }
        let mut got = shift_samples(&bundle, log, side).unwrap();
        let want = naive_shift(&input, &target, rows);
        for v in [
            &mut got.target_gaps,
            &mut got.target_positions,
            &mut got.reference_gaps,
            &mut got.reference_positions,
        ] {
            v.sort_by(f64::total_cmp);
        }
        assert_eq!(got.target_gaps, want.target_gaps);
        assert_eq!(got.reference_gaps, want.reference_gaps);
        assert_eq!(got.targets_without_input, want.targets_without_input);
        assert_eq!(got.target_positions.len(), want.target_positions.len());
        for (a, b) in got.target_positions.iter().zip(&want.target_positions) {
            assert!(close(*a, *b, REL));
        }
        for (a, b) in got.reference_positions.iter().zip(&want.reference_positions) {
            assert!(close(*a, *b, REL));
        }
        if !want.target_gaps.is_empty() && !want.reference_gaps.is_empty() {
            let ks = ks_statistic(&got.target_gaps, &got.reference_gaps).unwrap();
            assert!((ks - naive_ks(&want.target_gaps, &want.reference_gaps)).abs() <= 1e-12);
        }
        let ks = ks_statistic(&got.target_positions, &got.reference_positions).unwrap();
        assert!((ks - naive_ks(&want.target_positions, &want.reference_positions)).abs() <= 1e-12);
        checked += 1;
    }
    checked
}

pub fn check_ks(rng: &mut ChaCha8Rng) {
    let n = rng.random_range(1..=50);
    let m = rng.random_range(1..=50);
    // small integer support forces ties
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..10) as f64 / 4.0).collect();
    let b: Vec<f64> = (0..m)
        .map(|_| rng.random_range(0..10) as f64 / 4.0 + rng.random_range(0..2) as f64 * 0.1)
        .collect();
    let got = ks_statistic(&a, &b).unwrap();
    assert!((got - naive_ks(&a, &b)).abs() <= 1e-12);
    assert_eq!(got, ks_statistic(&b, &a).unwrap());
}

pub fn check_preprocessing(rows: &[splitaudit_core::Interaction], log: &InteractionLog, rng: &mut ChaCha8Rng) {
    let n = rng.random_range(1..=6);
    assert_eq!(
        row_set(&rows_of(&n_core_filter(log, n))),
        row_set(&naive_n_core(rows, n)),
        "n-core {n}"
    );
    assert_eq!(
        row_set(&rows_of(&drop_consecutive_repeats(log))),
        row_set(&naive_drop_consecutive(rows))
    );
}

/// Check `n` random logs; returns the number of evaluation sides whose
/// split diagnostics were compared.
pub fn oracle_equivalence(n: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = LogParams::default();
    let mut sides = 0;
    for _ in 0..n {
        let (rows, log) = random_log(&mut rng, &params);
        check_dataset(&rows, &log, &mut rng);
        sides += check_split(&rows, &log, &mut rng);
        check_ks(&mut rng);
        check_preprocessing(&rows, &log, &mut rng);
    }
    sides
}
