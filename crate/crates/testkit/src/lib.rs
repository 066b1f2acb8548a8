//! Random interaction logs and deliberately naive reference implementations
//! used to cross-check the optimized code paths.
//!
//! Oracles work on owned [`Interaction`]s and string identifiers only, never
//! on interned handles, and favour obvious O(n²) scans over clever ones.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::{DateTime, Datelike, Duration, NaiveDate, Timelike};
use rand::seq::SliceRandom;

use splitaudit_core::time::Granularity;
use splitaudit_core::{Interaction, InteractionLog, SubsetRole};

pub mod conformance;
pub mod fuzz;

pub use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct LogParams {
    pub max_users: usize,
    pub max_items: usize,
    pub max_interactions: usize,
    /// Probability that an event copies the user's previous timestamp.
    pub collision_prob: f64,
    /// Probability that an event repeats the user's previous item.
    pub repeat_prob: f64,
}

impl Default for LogParams {
    fn default() -> Self {
        LogParams {
            max_users: 50,
            max_items: 20,
            max_interactions: 500,
            collision_prob: 0.15,
            repeat_prob: 0.15,
        }
    }
}

const UNITS: [i64; 5] = [1, 1_000, 60_000, 3_600_000, 86_400_000];

/// Shuffled rows with unique random ordinals, at least one interaction.
pub fn random_interactions<R: Rng>(rng: &mut R, p: &LogParams) -> Vec<Interaction> {
    let n_users = rng.random_range(1..=p.max_users);
    let n_items = rng.random_range(1..=p.max_items);
    let n = rng.random_range(1..=p.max_interactions);
    let unit = UNITS[rng.random_range(0..UNITS.len())];
    let base: i64 = rng.random_range(0..1_700_000_000_000);
    let span = (n as i64 / 3).max(1);

    let mut last: Vec<Option<(usize, i64)>> = vec![None; n_users];
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let u = rng.random_range(0..n_users);
        let roll: f64 = rng.random();
        let (item, ts) = match last[u] {
            Some((_, ts)) if roll < p.collision_prob => (rng.random_range(0..n_items), ts),
            Some((item, ts)) if roll < p.collision_prob + p.repeat_prob => (item, ts + unit * rng.random_range(0..3)),
            _ => (rng.random_range(0..n_items), base + unit * rng.random_range(0..span)),
        };
        last[u] = Some((item, ts));
        rows.push((u, item, ts));
    }
    let mut ordinals: Vec<u64> = (0..n as u64).collect();
    ordinals.shuffle(rng);
    let mut out: Vec<Interaction> = rows
        .into_iter()
        .zip(ordinals)
        .map(|((u, i, ts), o)| Interaction::new(format!("u{u}"), format!("i{i}"), ts, o))
        .collect();
    out.shuffle(rng);
    out
}

pub fn random_log<R: Rng>(rng: &mut R, p: &LogParams) -> (Vec<Interaction>, InteractionLog) {
    let rows = random_interactions(rng, p);
    let log = InteractionLog::from_interactions(rows.clone(), SubsetRole::Raw).expect("generated rows are valid");
    (rows, log)
}

pub fn rows_of(log: &InteractionLog) -> Vec<Interaction> {
    log.iter().map(|r| r.to_owned()).collect()
}

/// `a` and `b` agree within `rel` relative tolerance (absolute near zero).
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Per-user sequences sorted by (timestamp, ordinal).
pub fn sequences(rows: &[Interaction]) -> BTreeMap<String, Vec<Interaction>> {
    let mut out: BTreeMap<String, Vec<Interaction>> = BTreeMap::new();
    for r in rows {
        out.entry(r.user_id.clone()).or_default().push(r.clone());
    }
    for seq in out.values_mut() {
        seq.sort_by_key(|r| (r.timestamp, r.ordinal));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveSummary {
    pub count: usize,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// At 0.05, 0.25, 0.5, 0.75, 0.95.
    pub quantiles: Vec<f64>,
}

pub fn naive_summary(values: &[f64]) -> NaiveSummary {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if v.is_empty() {
        return NaiveSummary {
            count: 0,
            mean: None,
            min: None,
            max: None,
            quantiles: vec![],
        };
    }
    let quantile = |q: f64| {
        let pos = q * (v.len() - 1) as f64;
        let below = pos.floor() as usize;
        let above = pos.ceil() as usize;
        v[below] + (pos - below as f64) * (v[above] - v[below])
    };
    let mut total = 0.0;
    for x in &v {
        total += x;
    }
    NaiveSummary {
        count: v.len(),
        mean: Some(total / v.len() as f64),
        min: Some(v[0]),
        max: Some(v[v.len() - 1]),
        quantiles: [0.05, 0.25, 0.5, 0.75, 0.95].iter().map(|&q| quantile(q)).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct NaiveCore {
    pub n_users: usize,
    pub n_items: usize,
    pub n_interactions: usize,
    pub avg_seq_len: f64,
    pub density_pct: f64,
    pub popularity: NaiveSummary,
    pub seq_len: NaiveSummary,
}

pub fn naive_core(rows: &[Interaction]) -> NaiveCore {
    let mut per_user: BTreeMap<&str, usize> = BTreeMap::new();
    let mut per_item: BTreeMap<&str, usize> = BTreeMap::new();
    for r in rows {
        *per_user.entry(&r.user_id).or_default() += 1;
        *per_item.entry(&r.item_id).or_default() += 1;
    }
    let (u, i, n) = (per_user.len(), per_item.len(), rows.len());
    NaiveCore {
        n_users: u,
        n_items: i,
        n_interactions: n,
        avg_seq_len: n as f64 / u as f64,
        density_pct: 100.0 * n as f64 / (u as f64 * i as f64),
        popularity: naive_summary(&per_item.values().map(|&c| c as f64).collect::<Vec<_>>()),
        seq_len: naive_summary(&per_user.values().map(|&c| c as f64).collect::<Vec<_>>()),
    }
}

#[derive(Debug, Clone)]
pub struct NaiveTemporal {
    pub start_ts: i64,
    pub end_ts: i64,
    pub collision_count: usize,
    pub collision_rate_pct: f64,
    pub delta_t: NaiveSummary,
    pub user_lifetime: NaiveSummary,
    pub item_lifetime: NaiveSummary,
}

pub fn naive_temporal(rows: &[Interaction]) -> NaiveTemporal {
    // pairwise scan: an interaction collides if any other one of the same
    // user shares its timestamp
    let mut collisions = 0;
    for (a, x) in rows.iter().enumerate() {
        if rows
            .iter()
            .enumerate()
            .any(|(b, y)| a != b && x.user_id == y.user_id && x.timestamp == y.timestamp)
        {
            collisions += 1;
        }
    }
    let mut gaps = Vec::new();
    let mut user_lifetimes = Vec::new();
    for seq in sequences(rows).values() {
        for k in 1..seq.len() {
            gaps.push((seq[k].timestamp - seq[k - 1].timestamp) as f64);
        }
        user_lifetimes.push((seq.last().unwrap().timestamp - seq[0].timestamp) as f64);
    }
    let items: BTreeSet<&str> = rows.iter().map(|r| r.item_id.as_str()).collect();
    let item_lifetimes: Vec<f64> = items
        .iter()
        .map(|&i| {
            let ts: Vec<i64> = rows.iter().filter(|r| r.item_id == i).map(|r| r.timestamp).collect();
            (ts.iter().max().unwrap() - ts.iter().min().unwrap()) as f64
        })
        .collect();
    NaiveTemporal {
        start_ts: rows.iter().map(|r| r.timestamp).min().unwrap(),
        end_ts: rows.iter().map(|r| r.timestamp).max().unwrap(),
        collision_count: collisions,
        collision_rate_pct: 100.0 * collisions as f64 / rows.len() as f64,
        delta_t: naive_summary(&gaps),
        user_lifetime: naive_summary(&user_lifetimes),
        item_lifetime: naive_summary(&item_lifetimes),
    }
}

#[derive(Debug, Clone)]
pub struct NaiveRepeats {
    pub repeated_count: usize,
    pub consecutive_count: usize,
    pub repeated_pct: f64,
    pub consecutive_pct: f64,
    pub per_user_share: NaiveSummary,
}

pub fn naive_repeats(rows: &[Interaction]) -> NaiveRepeats {
    let (mut repeated, mut consecutive) = (0, 0);
    let mut shares = Vec::new();
    for seq in sequences(rows).values() {
        let mut mine = 0;
        for k in 0..seq.len() {
            if seq[..k].iter().any(|p| p.item_id == seq[k].item_id) {
                mine += 1;
            }
            if k > 0 && seq[k - 1].item_id == seq[k].item_id {
                consecutive += 1;
            }
        }
        repeated += mine;
        shares.push(100.0 * mine as f64 / seq.len() as f64);
    }
    NaiveRepeats {
        repeated_count: repeated,
        consecutive_count: consecutive,
        repeated_pct: 100.0 * repeated as f64 / rows.len() as f64,
        consecutive_pct: 100.0 * consecutive as f64 / rows.len() as f64,
        per_user_share: naive_summary(&shares),
    }
}

/// Calendar bucket start computed through chrono's date arithmetic.
pub fn naive_bucket(ts: i64, g: Granularity) -> i64 {
    let dt = DateTime::from_timestamp_millis(ts).unwrap().naive_utc();
    let start = match g {
        Granularity::Hour => dt.date().and_hms_opt(dt.hour(), 0, 0).unwrap(),
        Granularity::Day => dt.date().and_hms_opt(0, 0, 0).unwrap(),
        Granularity::Week => {
            let monday = dt.date() - Duration::days(dt.weekday().num_days_from_monday() as i64);
            monday.and_hms_opt(0, 0, 0).unwrap()
        }
        Granularity::Month => NaiveDate::from_ymd_opt(dt.year(), dt.month(), 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap(),
    };
    start.and_utc().timestamp_millis()
}

/// (bucket counts, excluded count) for rows inside `[start, end]`.
pub fn naive_timeline(rows: &[Interaction], g: Granularity, start: i64, end: i64) -> (BTreeMap<i64, usize>, usize) {
    let mut buckets = BTreeMap::new();
    let mut excluded = 0;
    for r in rows {
        if r.timestamp < start || r.timestamp > end {
            excluded += 1;
        } else {
            *buckets.entry(naive_bucket(r.timestamp, g)).or_default() += 1;
        }
    }
    (buckets, excluded)
}

#[derive(Debug, Clone)]
pub struct NaiveLeakage {
    pub n_targets: usize,
    pub shared: usize,
    pub overlap_pct: f64,
    pub leaked: usize,
    pub leaked_item: usize,
    /// bucket start → (targets, leaked targets)
    pub over_time: BTreeMap<i64, (usize, usize)>,
}

/// `by_record`: rows are identical when all four fields match, otherwise
/// when (user, item, timestamp) match.
pub fn naive_leakage(
    train: &[Interaction],
    input: &[Interaction],
    target: &[Interaction],
    by_record: bool,
    g: Granularity,
) -> NaiveLeakage {
    let shared = target
        .iter()
        .filter(|t| {
            train.iter().any(|r| {
                r.user_id == t.user_id
                    && r.item_id == t.item_id
                    && r.timestamp == t.timestamp
                    && (!by_record || r.ordinal == t.ordinal)
            })
        })
        .count();

    let train_ts: Vec<i64> = train.iter().map(|r| r.timestamp).collect();
    let eval_ts: Vec<i64> = input.iter().chain(target).map(|r| r.timestamp).collect();
    let overlap_pct = if train_ts.is_empty() || eval_ts.is_empty() {
        0.0
    } else {
        let (t0, t1) = (*train_ts.iter().min().unwrap(), *train_ts.iter().max().unwrap());
        let (e0, e1) = (*eval_ts.iter().min().unwrap(), *eval_ts.iter().max().unwrap());
        if e0 == e1 {
            if t0 <= e0 && e0 <= t1 {
                100.0
            } else {
                0.0
            }
        } else {
            let inter = (t1.min(e1) - t0.max(e0)).max(0);
            100.0 * inter as f64 / (e1 - e0) as f64
        }
    };

    let mut leaked = 0;
    let mut leaked_item = 0;
    let mut over_time: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for t in target {
        let l = train.iter().any(|r| r.timestamp > t.timestamp);
        let li = train
            .iter()
            .any(|r| r.item_id == t.item_id && r.timestamp > t.timestamp);
        leaked += usize::from(l);
        leaked_item += usize::from(li);
        let e = over_time.entry(naive_bucket(t.timestamp, g)).or_default();
        e.0 += 1;
        e.1 += usize::from(l);
    }
    NaiveLeakage {
        n_targets: target.len(),
        shared,
        overlap_pct,
        leaked,
        leaked_item,
        over_time,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveColdStart {
    pub cold_users: usize,
    pub eval_users: usize,
    pub cold_items: usize,
    pub target_items: usize,
    pub cold_rows: usize,
    pub n_targets: usize,
}

pub fn naive_cold_start(train: &[Interaction], target: &[Interaction]) -> NaiveColdStart {
    let train_users: BTreeSet<&str> = train.iter().map(|r| r.user_id.as_str()).collect();
    let train_items: BTreeSet<&str> = train.iter().map(|r| r.item_id.as_str()).collect();
    let eval_users: BTreeSet<&str> = target.iter().map(|r| r.user_id.as_str()).collect();
    let target_items: BTreeSet<&str> = target.iter().map(|r| r.item_id.as_str()).collect();
    NaiveColdStart {
        cold_users: eval_users.difference(&train_users).count(),
        eval_users: eval_users.len(),
        cold_items: target_items.difference(&train_items).count(),
        target_items: target_items.len(),
        cold_rows: target
            .iter()
            .filter(|r| !train_items.contains(r.item_id.as_str()))
            .count(),
        n_targets: target.len(),
    }
}

/// sup |F_a − F_b| evaluated at every point of the merged support.
pub fn naive_ks(a: &[f64], b: &[f64]) -> f64 {
    let ecdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    a.iter()
        .chain(b)
        .map(|&x| (ecdf(a, x) - ecdf(b, x)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Default)]
pub struct NaiveShift {
    pub target_gaps: Vec<f64>,
    pub target_positions: Vec<f64>,
    pub reference_gaps: Vec<f64>,
    pub reference_positions: Vec<f64>,
    pub targets_without_input: usize,
}

/// Samples sorted ascending.
pub fn naive_shift(input: &[Interaction], target: &[Interaction], reference: &[Interaction]) -> NaiveShift {
    let mut out = NaiveShift::default();
    for t in target {
        let history: Vec<&Interaction> = input.iter().filter(|r| r.user_id == t.user_id).collect();
        match history.iter().max_by_key(|r| (r.timestamp, r.ordinal)) {
            Some(last) => out.target_gaps.push((t.timestamp - last.timestamp) as f64),
            None => out.targets_without_input += 1,
        }
        let full: Vec<&Interaction> = input.iter().chain(target).filter(|r| r.user_id == t.user_id).collect();
        let before = full
            .iter()
            .filter(|r| (r.timestamp, r.ordinal) < (t.timestamp, t.ordinal))
            .count();
        out.target_positions.push((before + 1) as f64 / full.len() as f64);
    }
    for seq in sequences(reference).values() {
        for k in 0..seq.len() {
            out.reference_positions.push((k + 1) as f64 / seq.len() as f64);
            if k > 0 {
                out.reference_gaps
                    .push((seq[k].timestamp - seq[k - 1].timestamp) as f64);
            }
        }
    }
    for v in [
        &mut out.target_gaps,
        &mut out.target_positions,
        &mut out.reference_gaps,
        &mut out.reference_positions,
    ] {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    out
}

/// Remove under-populated users and items until nothing changes.
pub fn naive_n_core(rows: &[Interaction], n: usize) -> Vec<Interaction> {
    let mut rows = rows.to_vec();
    loop {
        let keep: Vec<Interaction> = rows
            .iter()
            .filter(|r| {
                rows.iter().filter(|x| x.user_id == r.user_id).count() >= n
                    && rows.iter().filter(|x| x.item_id == r.item_id).count() >= n
            })
            .cloned()
            .collect();
        if keep.len() == rows.len() {
            return keep;
        }
        rows = keep;
    }
}

pub fn naive_drop_consecutive(rows: &[Interaction]) -> Vec<Interaction> {
    let mut out = Vec::new();
    for seq in sequences(rows).values() {
        for k in 0..seq.len() {
            if k == 0 || seq[k - 1].item_id != seq[k].item_id {
                out.push(seq[k].clone());
            }
        }
    }
    out
}

/// Order-insensitive comparison key for a row set.
pub fn row_set(rows: &[Interaction]) -> HashSet<Interaction> {
    rows.iter().cloned().collect()
}

/// One document of every kind, computed from a random log and split.
pub fn generated_documents(seed: u64) -> Vec<splitaudit_core::report::Document> {
    use splitaudit_core::diagnostics::{cold_start, compare_splits, distribution_shift, leakage, CompareOptions};
    use splitaudit_core::ingest::validate_log;
    use splitaudit_core::report::{summarize, AuditReports, Document, StatsComparison, Threshold, ThresholdConfig};
    use splitaudit_core::split::{describe_split, split, EvalSide, Provenance, SplitSpec, TargetMode};
    use splitaudit_core::stats::{compare_stats, core_stats, repeat_stats, temporal_stats, timeline, StatsReport};

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = LogParams {
        max_users: 20,
        max_interactions: 200,
        ..LogParams::default()
    };
    // ensure a splittable log
    let (rows, log) = loop {
        let (rows, log) = random_log(&mut rng, &params);
        if log.n_users() >= 3 && log.len() >= 20 {
            break (rows, log);
        }
    };
    let half = InteractionLog::from_interactions(rows[..rows.len() / 2].to_vec(), SubsetRole::Preprocessed).unwrap();
    let g = [
        Granularity::Hour,
        Granularity::Day,
        Granularity::Week,
        Granularity::Month,
    ][rng.random_range(0..4)];
    let provenance = Provenance::new("generated.csv", Default::default(), log.len());
    let specs = [
        SplitSpec::leave_one_out().with_cold_filtering(rng.random_bool(0.5)),
        SplitSpec::global_temporal(0.7, 0.85, TargetMode::AllItems).with_cold_filtering(false),
    ];
    let bundles: Vec<_> = specs
        .iter()
        .filter_map(|s| split(&log, s, provenance.clone()).ok())
        .collect();

    let mut docs = vec![
        Document::CoreStats(core_stats(&log).unwrap()),
        Document::TemporalStats(temporal_stats(&log).unwrap()),
        Document::RepeatStats(repeat_stats(&log).unwrap()),
        Document::Timeline(timeline(&[(SubsetRole::Raw, &log), (SubsetRole::Preprocessed, &half)], g, None).unwrap()),
        Document::Validation(validate_log(&log)),
    ];
    let analysed = StatsReport::Temporal(temporal_stats(&half).unwrap());
    let reference = StatsReport::Temporal(temporal_stats(&log).unwrap());
    docs.push(Document::StatsComparison(StatsComparison {
        comparison: compare_stats(&analysed, &reference).unwrap(),
        analysed,
        reference,
    }));

    let mut audit = AuditReports {
        dataset: Some("generated".into()),
        provenance: Some(provenance),
        core: Some(core_stats(&log).unwrap()),
        temporal: Some(temporal_stats(&log).unwrap()),
        repeats: Some(repeat_stats(&log).unwrap()),
        ..Default::default()
    };
    if let Some(b) = bundles.first() {
        audit.split = Some(describe_split(b));
        for side in [EvalSide::Validation, EvalSide::Test] {
            audit.leakage.push(leakage(b, side, g));
            audit.cold_start.push(cold_start(b, side, g));
            if let Ok(s) = distribution_shift(b, &log, side) {
                audit.shift.push(s);
            }
        }
        docs.push(Document::SplitDescription(describe_split(b)));
        docs.extend(audit.leakage.iter().cloned().map(Document::Leakage));
        docs.extend(audit.cold_start.iter().cloned().map(Document::ColdStart));
        docs.extend(audit.shift.iter().cloned().map(Document::Shift));
    }
    if bundles.len() == 2 {
        let refs: Vec<_> = bundles.iter().collect();
        let options = CompareOptions {
            reference: Some(&log),
            allow_provenance_mismatch: false,
        };
        docs.push(Document::SplitComparison(compare_splits(&refs, &options).unwrap()));
    }
    let mut thresholds = ThresholdConfig::default();
    let w = rng.random_range(0.0..50.0);
    thresholds.leaked_target_pct = Threshold::new(w, w + rng.random_range(0.0..50.0));
    let mut summary = summarize(&audit, &thresholds);
    summary.generated_at = Some("2024-01-01T00:00:00Z".into());
    docs.push(Document::Summary(summary));
    docs.push(Document::Audit(audit));
    docs.push(Document::Thresholds(thresholds));
    docs
}

/// Invariant scan over rows in stored order: (kind, first offending ordinal)
/// for each violated invariant, in declaration order.
pub fn naive_violations(rows: &[Interaction]) -> Vec<(splitaudit_core::ingest::ViolationKind, Option<u64>)> {
    use splitaudit_core::ingest::ViolationKind as K;
    let mut out = Vec::new();
    if let Some(r) = rows.iter().find(|r| r.timestamp < 0) {
        out.push((K::NegativeTimestamp, Some(r.ordinal)));
    }
    if let Some((_, r)) = rows
        .iter()
        .enumerate()
        .find(|(k, r)| rows[..*k].iter().any(|p| p.ordinal == r.ordinal))
    {
        out.push((K::DuplicateOrdinal, Some(r.ordinal)));
    }
    let key = |r: &Interaction| (r.user_id.clone(), r.timestamp, r.ordinal);
    if let Some(k) = (1..rows.len()).find(|&k| key(&rows[k - 1]) >= key(&rows[k])) {
        out.push((K::NonCanonicalOrder, Some(rows[k].ordinal)));
    }
    // a user's run restarts after another user's rows
    if let Some(k) = (1..rows.len())
        .find(|&k| rows[k].user_id != rows[k - 1].user_id && rows[..k].iter().any(|p| p.user_id == rows[k].user_id))
    {
        out.push((K::FragmentedUserIndex, Some(rows[k].ordinal)));
    }
    out
}

/// n-core fixed point pruning users first (then items) or items first in
/// every pass.
pub fn naive_n_core_ordered(rows: &[Interaction], n: usize, users_first: bool) -> Vec<Interaction> {
    let prune = |rows: &[Interaction], by_user: bool| -> Vec<Interaction> {
        let id = |r: &Interaction| if by_user { r.user_id.clone() } else { r.item_id.clone() };
        rows.iter()
            .filter(|r| rows.iter().filter(|x| id(x) == id(r)).count() >= n)
            .cloned()
            .collect()
    };
    let mut rows = rows.to_vec();
    loop {
        let a = prune(&rows, users_first);
        let b = prune(&a, !users_first);
        if b.len() == rows.len() {
            return b;
        }
        rows = b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let rows = random_interactions(&mut rng, &LogParams::default());
            assert!(!rows.is_empty() && rows.len() <= 500);
            let users: BTreeSet<_> = rows.iter().map(|r| &r.user_id).collect();
            let items: BTreeSet<_> = rows.iter().map(|r| &r.item_id).collect();
            assert!(users.len() <= 50 && items.len() <= 20);
        }
    }

    #[test]
    fn ks_oracle_basics() {
        assert_eq!(naive_ks(&[1.0, 2.0], &[10.0, 20.0]), 1.0);
        assert_eq!(naive_ks(&[1.0, 2.0], &[2.0, 1.0]), 0.0);
    }

    #[test]
    fn weeks_start_monday() {
        // 2024-01-03 is a Wednesday
        let wed = 1_704_240_000_000 + 3_600_000;
        assert_eq!(naive_bucket(wed, Granularity::Week), 1_704_067_200_000);
    }
}
