use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use splitaudit_core::ingest::parse_timestamp;
use splitaudit_core::preprocess::PreprocessSpec;
use splitaudit_core::split::{SplitSpec, TargetMode};
use splitaudit_core::time::{Granularity, TimeRange};
use splitaudit_core::{ColumnMapping, SubsetRole, TimestampFormat};

#[derive(Debug, Parser)]
#[command(name = "splitaudit", version, about = "Audit interaction logs and evaluation splits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dataset statistics for one log, optionally compared with a reference.
    Stats(StatsArgs),
    /// Split a log and write the bundle directory.
    Split(SplitArgs),
    /// Run every diagnostic on a bundle (or a log plus a split spec).
    Audit(AuditArgs),
    /// Compare the headline diagnostics of several splits.
    Compare(CompareArgs),
    /// Start the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MappingArgs {
    #[arg(long, default_value = "user_id")]
    pub user_col: String,
    #[arg(long, default_value = "item_id")]
    pub item_col: String,
    #[arg(long, default_value = "timestamp")]
    pub time_col: String,
    /// epoch_seconds, epoch_millis or iso8601.
    #[arg(long, default_value = "epoch_millis", value_parser = parse_format)]
    pub time_format: TimestampFormat,
    /// Count and skip malformed rows instead of failing.
    #[arg(long)]
    pub skip_malformed: bool,
}

fn parse_format(s: &str) -> Result<TimestampFormat, String> {
    s.parse()
}

impl MappingArgs {
    pub fn mapping(&self) -> Result<ColumnMapping> {
        Ok(ColumnMapping::new(
            &self.user_col,
            &self.item_col,
            &self.time_col,
            self.time_format,
        )?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct PreprocessArgs {
    /// Keep only users and items with at least N interactions.
    #[arg(long, value_name = "N")]
    pub n_core: Option<usize>,
    /// Collapse runs of the same item within a user.
    #[arg(long)]
    pub drop_consecutive: bool,
    /// Shuffle the order of same-timestamp events with this seed.
    #[arg(long, value_name = "SEED")]
    pub shuffle_collisions_seed: Option<u64>,
}

impl PreprocessArgs {
    pub fn spec(&self) -> Result<PreprocessSpec> {
        let spec = PreprocessSpec {
            n_core: self.n_core,
            drop_consecutive_repeats: self.drop_consecutive,
            shuffle_collisions: self.shuffle_collisions_seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Loo,
    Gts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Last,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct SplitSpecArgs {
    #[arg(long = "split", value_enum)]
    pub strategy: Option<Strategy>,
    /// Validation cut quantile (gts).
    #[arg(long, default_value_t = 0.8)]
    pub q_val: f64,
    /// Test cut quantile (gts).
    #[arg(long, default_value_t = 0.9)]
    pub q_test: f64,
    /// Targets per user in the evaluation periods (gts).
    #[arg(long, value_enum, default_value_t = Target::All)]
    pub target: Target,
    /// Keep target items never seen in training.
    #[arg(long)]
    pub keep_cold: bool,
}

impl SplitSpecArgs {
    pub fn spec(&self) -> Result<Option<SplitSpec>> {
        let Some(strategy) = self.strategy else {
            return Ok(None);
        };
        let spec = match strategy {
            Strategy::Loo => SplitSpec::leave_one_out(),
            Strategy::Gts => SplitSpec::global_temporal(
                self.q_val,
                self.q_test,
                match self.target {
                    Target::Last => TargetMode::LastItem,
                    Target::All => TargetMode::AllItems,
                },
            ),
        }
        .with_cold_filtering(!self.keep_cold);
        spec.validate()?;
        Ok(Some(spec))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        self != Format::Markdown
    }

    pub fn markdown(self) -> bool {
        self != Format::Json
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Directory for all written artifacts; without it results go to stdout.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Delimited log file, or a bundle directory (see --role).
    pub input: PathBuf,
    /// Subset to analyse when INPUT is a bundle directory.
    #[arg(long, default_value = "train", value_parser = parse_role)]
    pub role: SubsetRole,
    /// Reference log file, or a subset role of the same bundle.
    #[arg(long)]
    pub reference: Option<String>,
    #[arg(long, default_value = "day")]
    pub granularity: Granularity,
    /// Timeline window `START..END` (epoch millis or ISO-8601, inclusive).
    #[arg(long, value_parser = parse_date_range)]
    pub date_range: Option<TimeRange>,
    #[command(flatten)]
    pub mapping: MappingArgs,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub split: SplitSpecArgs,
    #[command(flatten)]
    pub mapping: MappingArgs,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// File name prefix of the subset CSVs.
    #[arg(long, default_value = "split")]
    pub prefix: String,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Bundle directory, or a delimited log when --split is given.
    pub input: PathBuf,
    /// Full log the bundle was cut from (bundle input only).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Subset file prefix (bundle input only); detected when absent.
    #[arg(long)]
    pub prefix: Option<String>,
    /// Dataset name used in reports; defaults to the input's file name.
    #[arg(long)]
    pub name: Option<String>,
    #[command(flatten)]
    pub split: SplitSpecArgs,
    #[command(flatten)]
    pub mapping: MappingArgs,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value = "day")]
    pub granularity: Granularity,
    /// Threshold config (JSON).
    #[arg(long, env = "SPLITAUDIT_THRESHOLDS")]
    pub thresholds: Option<PathBuf>,
    /// Exit with status 2 when any summary card is at alert level.
    #[arg(long)]
    pub fail_on_alert: bool,
    /// Stamp the summary with the current time (or SOURCE_DATE_EPOCH).
    #[arg(long)]
    pub timestamp: bool,
    /// Run the diagnostics on a splitaudit server instead of in-process.
    /// Paths must be readable by the server.
    #[arg(long, value_name = "URL")]
    pub server: Option<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Bundle directories, or one delimited log combined with --spec.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Split to build from the log: `loo` or `gts:Q_VAL:Q_TEST[:last|all]`.
    #[arg(long = "spec", value_parser = parse_spec)]
    pub specs: Vec<SplitSpec>,
    /// Keep cold target items in specs built here.
    #[arg(long)]
    pub keep_cold: bool,
    /// Warn instead of failing when bundles come from different data.
    #[arg(long)]
    pub allow_provenance_mismatch: bool,
    #[command(flatten)]
    pub mapping: MappingArgs,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// text, markdown or json.
    #[arg(long, value_enum, default_value_t = CompareFormat::Text)]
    pub format: CompareFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareFormat {
    Text,
    Markdown,
    Json,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8750")]
    pub bind: SocketAddr,
    /// Persist registered bundles here and reload them on start.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Request body limit.
    #[arg(long, default_value_t = 64 * 1024 * 1024)]
    pub max_body_bytes: usize,
}

fn parse_role(s: &str) -> Result<SubsetRole, String> {
    SubsetRole::SPLIT.into_iter().find(|r| r.as_str() == s).ok_or_else(|| {
        let names: Vec<_> = SubsetRole::SPLIT.iter().map(|r| r.as_str()).collect();
        format!("unknown subset `{s}` ({})", names.join("|"))
    })
}

pub fn role_name(s: &str) -> Option<SubsetRole> {
    parse_role(s).ok()
}

fn parse_instant(s: &str) -> Result<i64> {
    parse_timestamp(s, TimestampFormat::EpochMillis)
        .or_else(|_| parse_timestamp(s, TimestampFormat::Iso8601))
        .map_err(|e| anyhow::anyhow!(e))
        .with_context(|| format!("`{s}` is neither epoch millis nor ISO-8601"))
}

fn parse_date_range(s: &str) -> Result<TimeRange> {
    let (a, b) = s.split_once("..").context("expected START..END")?;
    let range = TimeRange {
        start: parse_instant(a.trim())?,
        end: parse_instant(b.trim())?,
    };
    if range.start > range.end {
        bail!("range start is after its end");
    }
    Ok(range)
}

pub fn parse_spec(s: &str) -> Result<SplitSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    let spec = match parts.as_slice() {
        ["loo"] => SplitSpec::leave_one_out(),
        ["gts", q_val, q_test, rest @ ..] => {
            let target = match rest {
                [] | ["all"] => TargetMode::AllItems,
                ["last"] => TargetMode::LastItem,
                _ => bail!("gts target must be `last` or `all`"),
            };
            SplitSpec::global_temporal(
                q_val.parse().context("q_val is not a number")?,
                q_test.parse().context("q_test is not a number")?,
                target,
            )
        }
        _ => bail!("expected `loo` or `gts:Q_VAL:Q_TEST[:last|all]`"),
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use splitaudit_core::split::SplitStrategy;

    #[test]
    fn spec_mini_language() {
        assert_eq!(parse_spec("loo").unwrap(), SplitSpec::leave_one_out());
        let s = parse_spec("gts:0.7:0.85:last").unwrap();
        assert_eq!(
            s.strategy,
            SplitStrategy::GlobalTemporal {
                q_val: 0.7,
                q_test: 0.85
            }
        );
        assert_eq!(s.target_mode, TargetMode::LastItem);
        assert!(parse_spec("gts:0.9:0.8").is_err());
        assert!(parse_spec("random").is_err());
    }

    #[test]
    fn date_ranges() {
        let r = parse_date_range("1970-01-01T00:00:01Z..5000").unwrap();
        assert_eq!((r.start, r.end), (1000, 5000));
        assert!(parse_date_range("10..5").is_err());
        assert!(parse_date_range("10").is_err());
    }
}
