//! Evaluation splits: leave-one-out and global temporal.
//!
//! A split produces a [`SplitBundle`] of five role-tagged logs. Evaluation
//! inputs hold the user history that precedes the targets. For the global
//! temporal split the validation side only sees the train period as input,
//! and users whose whole history falls in an evaluation period keep an empty
//! input (they are cold users and show up in [`SplitDescription`]).

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{self, ColumnMapping, ParseOptions, ORDINAL_COLUMN};
use crate::model::{align, InteractionLog, Record, SubsetRole};
use crate::preprocess::PreprocessSpec;
use crate::time::TimeRange;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitStrategy {
    LeaveOneOut,
    GlobalTemporal { q_val: f64, q_test: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    LastItem,
    #[default]
    AllItems,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub strategy: SplitStrategy,
    /// Ignored by leave-one-out, which always targets the last item.
    #[serde(default)]
    pub target_mode: TargetMode,
    #[serde(default = "default_true")]
    pub filter_cold_items: bool,
    /// Also drop cold-item rows from evaluation inputs.
    #[serde(default)]
    pub filter_cold_inputs: bool,
    #[serde(default = "default_min_len")]
    pub min_user_length_loo: usize,
}

fn default_true() -> bool {
    true
}

fn default_min_len() -> usize {
    3
}

impl SplitSpec {
    pub fn leave_one_out() -> Self {
        SplitSpec {
            strategy: SplitStrategy::LeaveOneOut,
            target_mode: TargetMode::LastItem,
            filter_cold_items: true,
            filter_cold_inputs: false,
            min_user_length_loo: 3,
        }
    }

    pub fn global_temporal(q_val: f64, q_test: f64, target_mode: TargetMode) -> Self {
        SplitSpec {
            strategy: SplitStrategy::GlobalTemporal { q_val, q_test },
            target_mode,
            filter_cold_items: true,
            filter_cold_inputs: false,
            min_user_length_loo: 3,
        }
    }

    pub fn with_cold_filtering(mut self, filter: bool) -> Self {
        self.filter_cold_items = filter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.strategy {
            SplitStrategy::GlobalTemporal { q_val, q_test } => {
                if !(q_val > 0.0 && q_val < q_test && q_test < 1.0) {
                    return Err(Error::InvalidSplitSpec(format!(
                        "need 0 < q_val < q_test < 1, got q_val={q_val}, q_test={q_test}"
                    )));
                }
            }
            SplitStrategy::LeaveOneOut => {
                if self.min_user_length_loo < 3 {
                    return Err(Error::InvalidSplitSpec(format!(
                        "min_user_length_loo must be at least 3, got {}",
                        self.min_user_length_loo
                    )));
                }
            }
        }
        Ok(())
    }

    /// Short label such as `gts-q0.9-all` or `loo`.
    pub fn label(&self) -> String {
        match self.strategy {
            SplitStrategy::LeaveOneOut => "loo".into(),
            SplitStrategy::GlobalTemporal { q_test, .. } => {
                let target = match self.target_mode {
                    TargetMode::LastItem => "last",
                    TargetMode::AllItems => "all",
                };
                format!("gts-q{q_test}-{target}")
            }
        }
    }

    /// Effective target mode (leave-one-out is always last-item).
    pub fn effective_target_mode(&self) -> TargetMode {
        match self.strategy {
            SplitStrategy::LeaveOneOut => TargetMode::LastItem,
            SplitStrategy::GlobalTemporal { .. } => self.target_mode,
        }
    }
}

/// Where a bundle's data came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    /// `None` when the preprocessing is unknown (externally produced bundles).
    #[serde(default)]
    pub preprocessing: Option<PreprocessSpec>,
    #[serde(default)]
    pub source_interactions: Option<usize>,
}

impl Provenance {
    pub fn new(source: impl Into<String>, preprocessing: PreprocessSpec, source_interactions: usize) -> Self {
        Provenance {
            source: source.into(),
            preprocessing: Some(preprocessing),
            source_interactions: Some(source_interactions),
        }
    }

    pub fn same_origin(&self, other: &Provenance) -> bool {
        self.source == other.source && self.preprocessing == other.preprocessing
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalSide {
    Validation,
    Test,
}

impl EvalSide {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalSide::Validation => "validation",
            EvalSide::Test => "test",
        }
    }

    pub fn input_role(self) -> SubsetRole {
        match self {
            EvalSide::Validation => SubsetRole::ValInput,
            EvalSide::Test => SubsetRole::TestInput,
        }
    }

    pub fn target_role(self) -> SubsetRole {
        match self {
            EvalSide::Validation => SubsetRole::ValTarget,
            EvalSide::Test => SubsetRole::TestTarget,
        }
    }
}

impl std::str::FromStr for EvalSide {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "validation" | "val" => Ok(EvalSide::Validation),
            "test" => Ok(EvalSide::Test),
            other => Err(format!("unknown evaluation side `{other}` (validation|test)")),
        }
    }
}

/// The five subsets produced by one split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitBundle {
    pub train: InteractionLog,
    pub val_input: InteractionLog,
    pub val_target: InteractionLog,
    pub test_input: InteractionLog,
    pub test_target: InteractionLog,
    /// `None` for bundles produced elsewhere without a `split.json`.
    pub spec: Option<SplitSpec>,
    pub provenance: Provenance,
    /// Ordinals identify the same source event across subsets. True for
    /// bundles built here or read back from canonical CSVs.
    pub ordinals_consistent: bool,
}

impl SplitBundle {
    /// Assemble a bundle from independently loaded subsets.
    pub fn from_subsets(
        subsets: [InteractionLog; 5],
        spec: Option<SplitSpec>,
        provenance: Provenance,
        ordinals_consistent: bool,
    ) -> Self {
        let aligned = align(&subsets.iter().collect::<Vec<_>>());
        let mut it = aligned
            .into_iter()
            .zip(SubsetRole::SPLIT)
            .map(|(log, role)| log.with_role(role));
        SplitBundle {
            train: it.next().expect("train"),
            val_input: it.next().expect("val_input"),
            val_target: it.next().expect("val_target"),
            test_input: it.next().expect("test_input"),
            test_target: it.next().expect("test_target"),
            spec,
            provenance,
            ordinals_consistent,
        }
    }

    pub fn subset(&self, role: SubsetRole) -> Option<&InteractionLog> {
        match role {
            SubsetRole::Train => Some(&self.train),
            SubsetRole::ValInput => Some(&self.val_input),
            SubsetRole::ValTarget => Some(&self.val_target),
            SubsetRole::TestInput => Some(&self.test_input),
            SubsetRole::TestTarget => Some(&self.test_target),
            SubsetRole::Raw | SubsetRole::Preprocessed => None,
        }
    }

    pub fn subsets(&self) -> [&InteractionLog; 5] {
        [
            &self.train,
            &self.val_input,
            &self.val_target,
            &self.test_input,
            &self.test_target,
        ]
    }

    pub fn input(&self, side: EvalSide) -> &InteractionLog {
        match side {
            EvalSide::Validation => &self.val_input,
            EvalSide::Test => &self.test_input,
        }
    }

    pub fn target(&self, side: EvalSide) -> &InteractionLog {
        match side {
            EvalSide::Validation => &self.val_target,
            EvalSide::Test => &self.test_target,
        }
    }

    pub fn label(&self) -> String {
        self.spec
            .as_ref()
            .map(SplitSpec::label)
            .unwrap_or_else(|| "external".into())
    }
}

/// Build a split according to `spec.strategy`.
pub fn split(log: &InteractionLog, spec: &SplitSpec, provenance: Provenance) -> Result<SplitBundle> {
    match spec.strategy {
        SplitStrategy::LeaveOneOut => leave_one_out_split(log, spec, provenance),
        SplitStrategy::GlobalTemporal { .. } => global_temporal_split(log, spec, provenance),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Period {
    Train,
    Validation,
    Test,
}

/// `ceil(q * n)`, treating products within 1e-9 of an integer as that
/// integer so that e.g. 0.7 × 100 cuts at 70, not 71.
pub fn quantile_cut(q: f64, n: usize) -> usize {
    let x = q * n as f64;
    let nearest = x.round();
    let k = if (x - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    (k.max(0.0) as usize).min(n)
}

/// Global temporal split on interaction-count quantiles of the
/// (timestamp, ordinal) order.
pub fn global_temporal_split(log: &InteractionLog, spec: &SplitSpec, provenance: Provenance) -> Result<SplitBundle> {
    spec.validate()?;
    let SplitStrategy::GlobalTemporal { q_val, q_test } = spec.strategy else {
        return Err(Error::InvalidSplitSpec("expected a global_temporal strategy".into()));
    };
    if log.is_empty() {
        return Err(Error::EmptyLog);
    }
    let records = log.records();
    let n = records.len();
    let k_val = quantile_cut(q_val, n);
    let k_test = quantile_cut(q_test, n);
    if k_val == 0 {
        return Err(Error::DegenerateSplit("train"));
    }
    if k_test <= k_val {
        return Err(Error::DegenerateSplit("validation"));
    }
    if k_test >= n {
        return Err(Error::DegenerateSplit("test"));
    }

    let mut by_time: Vec<usize> = (0..n).collect();
    by_time.sort_unstable_by_key(|&i| records[i].time_key());
    let mut period = vec![Period::Train; n];
    for (rank, &i) in by_time.iter().enumerate() {
        period[i] = if rank < k_val {
            Period::Train
        } else if rank < k_test {
            Period::Validation
        } else {
            Period::Test
        };
    }

    let train: Vec<Record> = records
        .iter()
        .zip(&period)
        .filter(|(_, &p)| p == Period::Train)
        .map(|(r, _)| *r)
        .collect();

    let mut val = SideBuilder::default();
    let mut test = SideBuilder::default();
    for slice in log.user_slices() {
        let seq = &records[slice.range()];
        let periods = &period[slice.range()];
        // within a user, canonical order is chronological, so periods are monotone
        let prefix_len = periods.iter().take_while(|&&p| p != Period::Test).count();
        let train_len = periods.iter().take_while(|&&p| p == Period::Train).count();

        if prefix_len < seq.len() {
            test.add_user(seq, prefix_len, spec.target_mode);
        }
        if train_len < prefix_len {
            val.add_user(&seq[..prefix_len], train_len, spec.target_mode);
        }
    }

    Ok(finish_bundle(log, spec, provenance, train, val, test))
}

/// Per-user leave-one-out split.
pub fn leave_one_out_split(log: &InteractionLog, spec: &SplitSpec, provenance: Provenance) -> Result<SplitBundle> {
    spec.validate()?;
    if spec.strategy != SplitStrategy::LeaveOneOut {
        return Err(Error::InvalidSplitSpec("expected a leave_one_out strategy".into()));
    }
    let min_len = spec.min_user_length_loo;
    let mut train = Vec::new();
    let mut val = SideBuilder::default();
    let mut test = SideBuilder::default();
    for (_, seq) in log.sequences() {
        let len = seq.len();
        if len < min_len {
            train.extend_from_slice(seq);
            continue;
        }
        train.extend_from_slice(&seq[..len - 2]);
        val.add_user(&seq[..len - 1], len - 2, TargetMode::LastItem);
        test.add_user(seq, len - 1, TargetMode::LastItem);
    }
    if test.users.is_empty() {
        return Err(Error::EmptyEvaluation { min_len });
    }
    Ok(finish_bundle(log, spec, provenance, train, val, test))
}

/// Evaluation users for one side, each with its input and target rows.
#[derive(Default)]
struct SideBuilder {
    users: Vec<(Vec<Record>, Vec<Record>)>,
}

impl SideBuilder {
    /// `seq[..boundary]` is history before the evaluation period and
    /// `seq[boundary..]` the user's evaluation-period events.
    fn add_user(&mut self, seq: &[Record], boundary: usize, mode: TargetMode) {
        debug_assert!(boundary < seq.len());
        let (input, target) = match mode {
            TargetMode::AllItems => (seq[..boundary].to_vec(), seq[boundary..].to_vec()),
            TargetMode::LastItem => {
                let last = seq.len() - 1;
                (seq[..last].to_vec(), vec![seq[last]])
            }
        };
        self.users.push((input, target));
    }

    fn finish(self, train_items: Option<&HashSet<u32>>, filter_inputs: bool) -> (Vec<Record>, Vec<Record>) {
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for (mut input, mut target) in self.users {
            if let Some(items) = train_items {
                target.retain(|r| items.contains(&r.item));
                if target.is_empty() {
                    continue;
                }
                if filter_inputs {
                    input.retain(|r| items.contains(&r.item));
                }
            }
            inputs.extend(input);
            targets.extend(target);
        }
        (inputs, targets)
    }
}

fn finish_bundle(
    log: &InteractionLog,
    spec: &SplitSpec,
    provenance: Provenance,
    train: Vec<Record>,
    val: SideBuilder,
    test: SideBuilder,
) -> SplitBundle {
    let train_items: Option<HashSet<u32>> = spec.filter_cold_items.then(|| train.iter().map(|r| r.item).collect());
    let (val_input, val_target) = val.finish(train_items.as_ref(), spec.filter_cold_inputs);
    let (test_input, test_target) = test.finish(train_items.as_ref(), spec.filter_cold_inputs);
    SplitBundle {
        train: log.derive(train, SubsetRole::Train),
        val_input: log.derive(val_input, SubsetRole::ValInput),
        val_target: log.derive(val_target, SubsetRole::ValTarget),
        test_input: log.derive(test_input, SubsetRole::TestInput),
        test_target: log.derive(test_target, SubsetRole::TestTarget),
        spec: Some(spec.clone()),
        provenance,
        ordinals_consistent: true,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleDescription {
    pub role: SubsetRole,
    pub n_users: usize,
    pub n_items: usize,
    pub n_interactions: usize,
    /// Absent for an empty subset.
    pub time_range: Option<TimeRange>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDescription {
    pub label: String,
    pub spec: Option<SplitSpec>,
    pub provenance: Provenance,
    pub roles: Vec<RoleDescription>,
    /// Target users with no input rows (their whole history is in the
    /// evaluation period).
    pub val_users_without_input: usize,
    pub test_users_without_input: usize,
}

impl SplitDescription {
    pub fn role(&self, role: SubsetRole) -> Option<&RoleDescription> {
        self.roles.iter().find(|r| r.role == role)
    }
}

pub fn describe_log(log: &InteractionLog) -> RoleDescription {
    RoleDescription {
        role: log.role(),
        n_users: log.n_users(),
        n_items: log.n_items(),
        n_interactions: log.len(),
        time_range: log.time_range().map(|(start, end)| TimeRange { start, end }),
    }
}

pub fn describe_split(bundle: &SplitBundle) -> SplitDescription {
    let without_input = |side: EvalSide| {
        let input_users: HashSet<u32> = bundle.input(side).sequences().map(|(u, _)| u).collect();
        bundle
            .target(side)
            .sequences()
            .filter(|(u, _)| !input_users.contains(u))
            .count()
    };
    SplitDescription {
        label: bundle.label(),
        spec: bundle.spec.clone(),
        provenance: bundle.provenance.clone(),
        roles: bundle.subsets().into_iter().map(describe_log).collect(),
        val_users_without_input: without_input(EvalSide::Validation),
        test_users_without_input: without_input(EvalSide::Test),
    }
}

pub const SPLIT_SPEC_FILE: &str = "split.json";
pub const PROVENANCE_FILE: &str = "provenance.json";
pub const DEFAULT_PREFIX: &str = "split";

pub fn subset_file_name(prefix: &str, role: SubsetRole) -> String {
    format!("{prefix}_{}.csv", role.as_str())
}

/// Write the five canonical CSVs plus `split.json` and `provenance.json`.
pub fn write_bundle_dir(bundle: &SplitBundle, dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for log in bundle.subsets() {
        let path = dir.join(subset_file_name(prefix, log.role()));
        ingest::write_csv_file(log, &path)?;
        written.push(path);
    }
    if let Some(spec) = &bundle.spec {
        let path = dir.join(SPLIT_SPEC_FILE);
        write_json(&path, spec)?;
        written.push(path);
    }
    let path = dir.join(PROVENANCE_FILE);
    write_json(&path, &bundle.provenance)?;
    written.push(path);
    Ok(written)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Find the single `<prefix>_train.csv` in `dir`.
pub fn detect_prefix(dir: &Path) -> Result<String> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut prefixes: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().map(str::to_owned))
        .filter_map(|name| name.strip_suffix("_train.csv").map(str::to_owned))
        .collect();
    prefixes.sort();
    match prefixes.len() {
        1 => Ok(prefixes.remove(0)),
        0 => Err(Error::io(
            dir,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no `<prefix>_train.csv` file in bundle directory",
            ),
        )),
        _ => Err(Error::io(
            dir,
            std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!("several bundle prefixes found: {}", prefixes.join(", ")),
            ),
        )),
    }
}

/// Load a bundle directory. Subset files are read with `mapping`; when a
/// file carries an `ordinal` column its values are kept as ordinals.
/// `split.json` and `provenance.json` are optional.
pub fn load_bundle_dir(dir: &Path, prefix: Option<&str>, mapping: &ColumnMapping) -> Result<SplitBundle> {
    let prefix = match prefix {
        Some(p) => p.to_owned(),
        None => detect_prefix(dir)?,
    };
    let mut logs = Vec::with_capacity(5);
    let mut all_have_ordinals = true;
    for role in SubsetRole::SPLIT {
        let path = dir.join(subset_file_name(&prefix, role));
        let has_ordinal = ingest::read_header(&path)?.iter().any(|h| h == ORDINAL_COLUMN);
        all_have_ordinals &= has_ordinal;
        let options = ParseOptions {
            skip_malformed: false,
            ordinal_column: has_ordinal.then(|| ORDINAL_COLUMN.to_owned()),
        };
        let log = match ingest::parse_log_with(&path, mapping, role, &options) {
            Ok(p) => p.log,
            Err(Error::EmptyLog) => empty_log(role),
            Err(e) => return Err(e),
        };
        logs.push(log);
    }
    let spec_path = dir.join(SPLIT_SPEC_FILE);
    let spec = if spec_path.exists() {
        let spec: SplitSpec = read_json(&spec_path)?;
        spec.validate()?;
        Some(spec)
    } else {
        None
    };
    let prov_path = dir.join(PROVENANCE_FILE);
    let provenance = if prov_path.exists() {
        read_json(&prov_path)?
    } else {
        Provenance {
            source: dir.display().to_string(),
            ..Default::default()
        }
    };
    let subsets: [InteractionLog; 5] = logs.try_into().expect("five subsets");
    Ok(SplitBundle::from_subsets(subsets, spec, provenance, all_have_ordinals))
}

fn empty_log(role: SubsetRole) -> InteractionLog {
    InteractionLog::from_interactions(std::iter::empty(), role).expect("empty log is valid")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedDocument(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::log_from_rows;

    fn letters(log: &InteractionLog) -> Vec<&str> {
        log.iter().map(|i| i.item_id).collect()
    }

    fn single_user(n: usize) -> InteractionLog {
        let items: Vec<String> = (b'a'..).take(n).map(|c| (c as char).to_string()).collect();
        log_from_rows(
            items.into_iter().enumerate().map(|(t, i)| ("u", i, t as i64)),
            SubsetRole::Raw,
        )
        .unwrap()
    }

    #[test]
    fn cut_sizes_8_1_1() {
        assert_eq!(quantile_cut(0.8, 10), 8);
        assert_eq!(quantile_cut(0.9, 10), 9);
        assert_eq!(quantile_cut(0.7, 100), 70);
        assert_eq!(quantile_cut(0.9, 11), 10);
    }

    #[test]
    fn gts_single_user_all_items() {
        let log = single_user(10);
        let spec = SplitSpec::global_temporal(0.8, 0.9, TargetMode::AllItems).with_cold_filtering(false);
        let b = global_temporal_split(&log, &spec, Provenance::default()).unwrap();
        assert_eq!(letters(&b.train), ["a", "b", "c", "d", "e", "f", "g", "h"]);
        assert_eq!(letters(&b.test_input), ["a", "b", "c", "d", "e", "f", "g", "h", "i"]);
        assert_eq!(letters(&b.test_target), ["j"]);
        assert_eq!(letters(&b.val_input), ["a", "b", "c", "d", "e", "f", "g", "h"]);
        assert_eq!(letters(&b.val_target), ["i"]);
        let d = describe_split(&b);
        assert_eq!(d.role(SubsetRole::TestTarget).unwrap().n_interactions, 1);
    }

    #[test]
    fn gts_periods_tie_break_by_ordinal() {
        // all ten events share one timestamp
        let log = log_from_rows((0..10).map(|k| (format!("u{k}"), "x", 5)), SubsetRole::Raw).unwrap();
        let spec = SplitSpec::global_temporal(0.8, 0.9, TargetMode::AllItems);
        let b = global_temporal_split(&log, &spec, Provenance::default()).unwrap();
        assert_eq!(b.train.len(), 8);
        assert_eq!(b.val_target.iter().map(|i| i.ordinal).collect::<Vec<_>>(), [8]);
        assert_eq!(b.test_target.iter().map(|i| i.ordinal).collect::<Vec<_>>(), [9]);
        // those users have no history: empty input, kept as cold users
        assert!(b.test_input.is_empty());
        assert_eq!(describe_split(&b).test_users_without_input, 1);
    }

    #[test]
    fn gts_last_item_input_is_everything_before_target() {
        let log = log_from_rows(
            [
                ("u", "a", 1),
                ("u", "b", 2),
                ("v", "c", 3),
                ("v", "a", 4),
                ("u", "c", 8),
                ("u", "a", 9),
            ],
            SubsetRole::Raw,
        )
        .unwrap();
        // N=6: train [0,3) val [3,4) test [4,6)
        let spec = SplitSpec::global_temporal(0.5, 0.6, TargetMode::LastItem).with_cold_filtering(false);
        let b = global_temporal_split(&log, &spec, Provenance::default()).unwrap();
        assert_eq!(letters(&b.test_target), ["a"]);
        assert_eq!(letters(&b.test_input), ["a", "b", "c"]);
        assert_eq!(letters(&b.val_target), ["a"]);
        assert_eq!(letters(&b.val_input), ["c"]);
    }

    #[test]
    fn gts_degenerate_periods() {
        let log = single_user(3);
        let spec = SplitSpec::global_temporal(0.5, 0.6, TargetMode::AllItems);
        assert!(matches!(
            global_temporal_split(&log, &spec, Provenance::default()),
            Err(Error::DegenerateSplit("validation"))
        ));
        let bad = SplitSpec::global_temporal(0.9, 0.9, TargetMode::AllItems);
        assert!(matches!(bad.validate(), Err(Error::InvalidSplitSpec(_))));
    }

    #[test]
    fn loo_four_items() {
        let log = single_user(4);
        let spec = SplitSpec::leave_one_out().with_cold_filtering(false);
        let b = leave_one_out_split(&log, &spec, Provenance::default()).unwrap();
        assert_eq!(letters(&b.train), ["a", "b"]);
        assert_eq!(letters(&b.val_input), ["a", "b"]);
        assert_eq!(letters(&b.val_target), ["c"]);
        assert_eq!(letters(&b.test_input), ["a", "b", "c"]);
        assert_eq!(letters(&b.test_target), ["d"]);
    }

    #[test]
    fn loo_short_users_go_to_train() {
        let log = log_from_rows(
            [
                ("s", "a", 1),
                ("s", "b", 2),
                ("l", "a", 1),
                ("l", "b", 2),
                ("l", "a", 3),
            ],
            SubsetRole::Raw,
        )
        .unwrap();
        let b = leave_one_out_split(&log, &SplitSpec::leave_one_out(), Provenance::default()).unwrap();
        assert_eq!(b.train.len(), 3);
        assert!(b.test_target.iter().all(|i| i.user_id == "l"));
        let only_short = single_user(2);
        assert!(matches!(
            leave_one_out_split(&only_short, &SplitSpec::leave_one_out(), Provenance::default()),
            Err(Error::EmptyEvaluation { min_len: 3 })
        ));
    }

    #[test]
    fn cold_item_targets_dropped_with_user_rows() {
        // item z never reaches train
        let log = log_from_rows(
            [
                ("u", "a", 1),
                ("u", "b", 2),
                ("u", "a", 3),
                ("u", "z", 4),
                ("v", "a", 1),
                ("v", "b", 2),
                ("v", "a", 3),
                ("v", "b", 4),
            ],
            SubsetRole::Raw,
        )
        .unwrap();
        let b = leave_one_out_split(&log, &SplitSpec::leave_one_out(), Provenance::default()).unwrap();
        assert!(b.test_target.iter().all(|i| i.user_id == "v"));
        assert!(b.test_input.iter().all(|i| i.user_id == "v"));
        assert_eq!(b.val_target.len(), 2);
        let keep = leave_one_out_split(
            &log,
            &SplitSpec::leave_one_out().with_cold_filtering(false),
            Provenance::default(),
        )
        .unwrap();
        assert_eq!(keep.test_target.len(), 2);
    }

    #[test]
    fn bundle_dir_round_trip() {
        let log = single_user(10);
        let spec = SplitSpec::global_temporal(0.8, 0.9, TargetMode::AllItems).with_cold_filtering(false);
        let b = global_temporal_split(&log, &spec, Provenance::new("mem", PreprocessSpec::default(), 10)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_bundle_dir(&b, dir.path(), "demo").unwrap();
        let back = load_bundle_dir(dir.path(), None, &ColumnMapping::canonical()).unwrap();
        assert_eq!(back, b);
        assert!(back.ordinals_consistent);
    }
}
