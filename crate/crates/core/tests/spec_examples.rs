//! Worked examples for ingestion, preprocessing, splitting and the
//! statistics definitions.

use std::path::Path;

use splitaudit_core::diagnostics::{cold_start, compare_splits, ks_statistic, leakage, CompareOptions};
use splitaudit_core::ingest::{log_from_rows, parse_bytes, parse_log, validate_log, write_csv, ViolationKind};
use splitaudit_core::preprocess::{drop_consecutive_repeats, n_core_filter, shuffle_collision_order};
use splitaudit_core::split::{
    describe_split, load_bundle_dir, quantile_cut, split, write_bundle_dir, EvalSide, Provenance, SplitSpec, TargetMode,
};
use splitaudit_core::stats::{compare_stats, core_stats, repeat_stats, temporal_stats, timeline, StatsReport};
use splitaudit_core::time::{Granularity, DAY_MS};
use splitaudit_core::{ColumnMapping, Error, Interaction, InteractionLog, ParseOptions, SubsetRole, TimestampFormat};
use splitaudit_testkit::*;

fn mapping(format: TimestampFormat) -> ColumnMapping {
    ColumnMapping::new("user_id", "item_id", "timestamp", format).unwrap()
}

fn parse_str(text: &str, format: TimestampFormat) -> splitaudit_core::Result<InteractionLog> {
    parse_bytes(
        text.as_bytes(),
        Path::new("inline.csv"),
        &mapping(format),
        SubsetRole::Raw,
        &ParseOptions::default(),
    )
    .map(|p| p.log)
}

fn seq(items: &str) -> InteractionLog {
    log_from_rows(
        items.chars().enumerate().map(|(t, c)| ("u", c.to_string(), t as i64)),
        SubsetRole::Raw,
    )
    .unwrap()
}

fn items(log: &InteractionLog) -> String {
    log.iter().map(|r| r.item_id).collect()
}

#[test]
fn three_rows_land_in_canonical_order() {
    let log = parse_str(
        "user_id,item_id,timestamp\nu1,i1,10\nu1,i2,5\nu2,i1,7\n",
        TimestampFormat::EpochSeconds,
    )
    .unwrap();
    let got: Vec<Interaction> = rows_of(&log);
    assert_eq!(
        got,
        [
            Interaction::new("u1", "i2", 5000, 1),
            Interaction::new("u1", "i1", 10000, 0),
            Interaction::new("u2", "i1", 7000, 2)
        ]
    );
    assert!(validate_log(&log).is_valid());
}

#[test]
fn header_only_is_empty() {
    assert!(matches!(
        parse_str("user_id,item_id,timestamp\n", TimestampFormat::EpochMillis),
        Err(Error::EmptyLog)
    ));
}

#[test]
fn csv_round_trip_and_determinism() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (_, log) = random_log(&mut rng, &LogParams::default());
        let mut bytes = Vec::new();
        write_csv(&log, &mut bytes).unwrap();
        let opts = ParseOptions {
            ordinal_column: Some("ordinal".into()),
            ..Default::default()
        };
        let back = parse_bytes(
            &bytes,
            Path::new("rt.csv"),
            &mapping(TimestampFormat::EpochMillis),
            SubsetRole::Raw,
            &opts,
        )
        .unwrap()
        .log;
        assert_eq!(rows_of(&back), rows_of(&log));
        let mut again = Vec::new();
        write_csv(&back, &mut again).unwrap();
        assert_eq!(again, bytes);
    }
}

#[test]
fn parse_log_reads_files_and_tabs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.tsv");
    std::fs::write(
        &path,
        "user_id\titem_id\ttimestamp\nu\ta\t2021-03-01T00:00:00\nu\tb\t2021-03-01\n",
    )
    .unwrap();
    let log = parse_log(&path, &mapping(TimestampFormat::Iso8601), SubsetRole::Raw).unwrap();
    assert_eq!(items(&log), "ab");
    assert_eq!(log.time_range(), Some((1_614_556_800_000, 1_614_556_800_000)));
}

#[test]
fn validation_matches_naive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (rows, log) = random_log(
        &mut rng,
        &LogParams {
            max_interactions: 100,
            ..Default::default()
        },
    );
    assert!(validate_log(&log).is_valid());

    let dup = vec![Interaction::new("u", "a", 1, 0), Interaction::new("u", "b", 2, 0)];
    let report = validate_log(&InteractionLog::from_interactions_unchecked(dup, SubsetRole::Raw));
    assert_eq!(report.violations.len(), 1);
    assert_eq!(report.violations[0].kind, ViolationKind::DuplicateOrdinal);

    for _ in 0..200 {
        let mut shuffled = rows.clone();
        // partial shuffle so some logs stay valid
        for _ in 0..rng.random_range(0..4) {
            let (a, b) = (rng.random_range(0..shuffled.len()), rng.random_range(0..shuffled.len()));
            shuffled.swap(a, b);
        }
        if rng.random_bool(0.2) {
            let k = rng.random_range(0..shuffled.len());
            shuffled[k].timestamp = -1;
        }
        let got: Vec<_> = validate_log(&InteractionLog::from_interactions_unchecked(
            shuffled.clone(),
            SubsetRole::Raw,
        ))
        .violations
        .into_iter()
        .map(|v| (v.kind, v.ordinal))
        .collect();
        assert_eq!(got, naive_violations(&shuffled));
    }
}

#[test]
fn n_core_fixed_point_is_unique() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let params = LogParams {
        max_interactions: 200,
        ..Default::default()
    };
    for _ in 0..100 {
        let (rows, log) = random_log(&mut rng, &params);
        let n = rng.random_range(2..=4);
        let got = row_set(&rows_of(&n_core_filter(&log, n)));
        assert_eq!(got, row_set(&naive_n_core_ordered(&rows, n, true)));
        assert_eq!(got, row_set(&naive_n_core_ordered(&rows, n, false)));
    }
}

#[test]
fn preprocessing_examples() {
    assert_eq!(items(&drop_consecutive_repeats(&seq("aaba"))), "aba");
    let plain = seq("abcd");
    assert_eq!(drop_consecutive_repeats(&plain), plain);
    assert_eq!(n_core_filter(&plain, 1), plain);
    let five = log_from_rows(
        (0..25).map(|k| (format!("u{}", k % 5), format!("i{}", k / 5), k as i64)),
        SubsetRole::Raw,
    )
    .unwrap();
    assert_eq!(n_core_filter(&five, 5), five);

    // three colliding events keep their items and ordinal set
    let group = log_from_rows(
        [("u", "x", 5), ("u", "y", 5), ("u", "z", 5), ("u", "w", 9)],
        SubsetRole::Raw,
    )
    .unwrap();
    for seed in 0..20 {
        let out = shuffle_collision_order(&group, seed);
        let mut its: Vec<_> = out
            .iter()
            .filter(|r| r.timestamp == 5)
            .map(|r| r.item_id.to_owned())
            .collect();
        its.sort();
        assert_eq!(its, ["x", "y", "z"]);
        let mut ords: Vec<_> = out.iter().filter(|r| r.timestamp == 5).map(|r| r.ordinal).collect();
        ords.sort();
        assert_eq!(ords, [0, 1, 2]);
        assert_eq!(out.iter().last().unwrap().item_id, "w");
    }
}

#[test]
fn definition_fixtures() {
    let r = repeat_stats(&seq("aaba")).unwrap();
    assert_eq!((r.repeated_interactions_pct, r.consecutive_repeats_pct), (50.0, 25.0));
    let log = log_from_rows([("u", "a", 1), ("u", "b", 1), ("u", "c", 2)], SubsetRole::Raw).unwrap();
    assert_eq!(
        format!("{:.2}", temporal_stats(&log).unwrap().collision_rate_pct),
        "66.67"
    );

    let one = log_from_rows([("u", "a", 0)], SubsetRole::Raw).unwrap();
    let c = core_stats(&one).unwrap();
    assert_eq!((c.density_pct, c.avg_seq_len), (100.0, 1.0));

    let week = log_from_rows((0..7).map(|d| ("u", "a", d * DAY_MS + 3_600_000)), SubsetRole::Raw).unwrap();
    let t = timeline(
        &[
            (SubsetRole::Raw, &week),
            (SubsetRole::Train, &week.empty_like(SubsetRole::Train)),
        ],
        Granularity::Day,
        None,
    )
    .unwrap();
    assert_eq!(t.series(SubsetRole::Raw).unwrap().buckets.len(), 7);
    assert!(t.series(SubsetRole::Raw).unwrap().buckets.iter().all(|b| b.count == 1));
    assert!(t.series(SubsetRole::Train).unwrap().buckets.is_empty());

    assert_eq!(ks_statistic(&[1.0, 2.0], &[10.0, 20.0]).unwrap(), 1.0);
    assert_eq!(ks_statistic(&[3.0, 1.0], &[1.0, 3.0]).unwrap(), 0.0);
    assert!(matches!(ks_statistic(&[], &[1.0]), Err(Error::EmptySample)));
}

#[test]
fn compare_stats_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (rows, log) = random_log(&mut rng, &LogParams::default());
    let a = StatsReport::Core(core_stats(&log).unwrap());
    let same = compare_stats(&a, &a).unwrap();
    assert!(same.rows.iter().all(|r| r.delta_pct.is_none_or(|d| d == 0.0)));

    let doubled: Vec<Interaction> = rows
        .iter()
        .flat_map(|r| {
            let mut twin = r.clone();
            twin.ordinal += 1_000_000;
            [r.clone(), twin]
        })
        .collect();
    let full =
        StatsReport::Core(core_stats(&InteractionLog::from_interactions(doubled, SubsetRole::Raw).unwrap()).unwrap());
    let t = compare_stats(&a, &full).unwrap();
    assert_eq!(t.row("n_interactions").unwrap().delta_pct, Some(-50.0));

    let other = StatsReport::Repeats(repeat_stats(&log).unwrap());
    assert!(matches!(compare_stats(&a, &other), Err(Error::TypeMismatch { .. })));
}

#[test]
fn gts_cut_sizes_and_single_user_example() {
    assert_eq!((quantile_cut(0.8, 10), quantile_cut(0.9, 10)), (8, 9));
    let spec = SplitSpec::global_temporal(0.8, 0.9, TargetMode::AllItems).with_cold_filtering(false);
    let b = split(&seq("abcdefghij"), &spec, Provenance::default()).unwrap();
    assert_eq!(items(&b.train), "abcdefgh");
    assert_eq!(
        (items(&b.val_input), items(&b.val_target)),
        ("abcdefgh".into(), "i".into())
    );
    assert_eq!(
        (items(&b.test_input), items(&b.test_target)),
        ("abcdefghi".into(), "j".into())
    );
    let d = describe_split(&b);
    assert_eq!(d.role(SubsetRole::TestTarget).unwrap().n_interactions, 1);

    // with cold filtering the single-occurrence targets vanish
    let b = split(
        &seq("abcdefghij"),
        &spec.clone().with_cold_filtering(true),
        Provenance::default(),
    )
    .unwrap();
    let d = describe_split(&b);
    let vt = d.role(SubsetRole::ValTarget).unwrap();
    assert_eq!((vt.n_interactions, vt.time_range), (0, None));
}

#[test]
fn loo_examples() {
    let spec = SplitSpec::leave_one_out().with_cold_filtering(false);
    let b = split(&seq("abcd"), &spec, Provenance::default()).unwrap();
    assert_eq!(
        [&b.train, &b.val_input, &b.val_target, &b.test_input, &b.test_target].map(items),
        ["ab", "ab", "c", "abc", "d"]
    );
    let mut rows = rows_of(&seq("abcd"));
    rows.push(Interaction::new("v", "a", 0, 10));
    rows.push(Interaction::new("v", "b", 1, 11));
    let log = InteractionLog::from_interactions(rows, SubsetRole::Raw).unwrap();
    let b = split(&log, &spec, Provenance::default()).unwrap();
    assert_eq!(b.train.iter().filter(|r| r.user_id == "v").count(), 2);
    assert!(b.test_target.iter().all(|r| r.user_id == "u"));
}

#[test]
fn split_structure_on_random_logs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut loo_bundles = 0;
    for _ in 0..200 {
        let (_, log) = random_log(&mut rng, &LogParams::default());
        if let Ok(b) = split(
            &log,
            &SplitSpec::leave_one_out().with_cold_filtering(rng.random_bool(0.5)),
            Provenance::default(),
        ) {
            let c = cold_start(&b, EvalSide::Test, Granularity::Day);
            assert_eq!(c.cold_users.count, 0);
            assert_eq!(b.test_target.len(), b.test_target.n_users());
            loo_bundles += 1;
        }
        for mode in [TargetMode::AllItems, TargetMode::LastItem] {
            let spec = SplitSpec::global_temporal(0.8, 0.9, mode).with_cold_filtering(rng.random_bool(0.5));
            if let Ok(b) = split(&log, &spec, Provenance::default()) {
                for side in [EvalSide::Validation, EvalSide::Test] {
                    let l = leakage(&b, side, Granularity::Day);
                    assert_eq!((l.leaked_target_pct(), l.shared_interactions), (0.0, 0));
                    if spec.filter_cold_items {
                        assert_eq!(cold_start(&b, side, Granularity::Day).cold_items.count, 0);
                    }
                }
            }
        }
    }
    assert!(loo_bundles > 100);
}

#[test]
fn bundle_directory_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (_, log) = random_log(&mut rng, &LogParams::default());
    let spec = SplitSpec::global_temporal(0.7, 0.85, TargetMode::LastItem);
    let b = split(
        &log,
        &spec,
        Provenance::new("random.csv", Default::default(), log.len()),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_bundle_dir(&b, dir.path(), "demo").unwrap();
    let back = load_bundle_dir(dir.path(), None, &ColumnMapping::canonical()).unwrap();
    assert_eq!(back.spec, b.spec);
    assert_eq!(back.provenance, b.provenance);
    assert!(back.ordinals_consistent);
    for (x, y) in back.subsets().iter().zip(b.subsets()) {
        assert_eq!(rows_of(x), rows_of(y));
        assert_eq!(x.role(), y.role());
    }
    assert_eq!(describe_split(&back), describe_split(&b));
}

#[test]
fn split_comparison_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (_, log) = loop {
        let (rows, log) = random_log(
            &mut rng,
            &LogParams {
                max_interactions: 500,
                ..Default::default()
            },
        );
        if log.len() > 300 {
            break (rows, log);
        }
    };
    let prov = Provenance::new("x.csv", Default::default(), log.len());
    let opts = CompareOptions {
        reference: Some(&log),
        allow_provenance_mismatch: false,
    };
    let loo = split(&log, &SplitSpec::leave_one_out(), prov.clone()).unwrap();
    let gts = split(
        &log,
        &SplitSpec::global_temporal(0.8, 0.9, TargetMode::AllItems),
        prov.clone(),
    )
    .unwrap();
    let m = compare_splits(&[&loo, &gts], &opts).unwrap();
    assert_eq!(m.rows.len(), 2);
    assert_eq!(m.rows[0].cold_users_pct, 0.0);
    assert_eq!(
        compare_splits(&[&loo, &loo], &opts).unwrap().rows[0],
        compare_splits(&[&loo, &loo], &opts).unwrap().rows[1]
    );

    let sizes: Vec<usize> = [0.8, 0.9, 0.95]
        .iter()
        .map(|&q| {
            let spec = SplitSpec::global_temporal(q / 2.0, q, TargetMode::AllItems).with_cold_filtering(false);
            split(&log, &spec, prov.clone()).unwrap()
        })
        .map(|b| b.test_target.len())
        .collect();
    assert!(sizes.windows(2).all(|w| w[0] > w[1]), "{sizes:?}");

    let other = split(
        &log,
        &SplitSpec::leave_one_out(),
        Provenance::new("y.csv", Default::default(), 1),
    )
    .unwrap();
    assert!(matches!(
        compare_splits(&[&loo, &other], &opts),
        Err(Error::ProvenanceMismatch(_))
    ));
    let lenient = CompareOptions {
        allow_provenance_mismatch: true,
        ..opts
    };
    assert_eq!(compare_splits(&[&loo, &other], &lenient).unwrap().warnings.len(), 1);
}
