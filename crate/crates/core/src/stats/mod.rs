//! Dataset-level statistics for any subset.

mod basic;
mod compare;
mod distribution;
mod repeats;
mod temporal;
mod timeline;

pub use basic::{core_stats, CoreStatsReport};
pub use compare::{compare_stats, ComparisonRow, ComparisonTable, StatsReport};
pub use distribution::{quantile_sorted, DistributionSummary, HistogramBin, Quantile, MAX_BINS, QUANTILE_LEVELS};
pub use repeats::{repeat_stats, RepeatReport};
pub use temporal::{temporal_stats, TemporalStatsReport, COLLISION_DEFINITION};
pub use timeline::{timeline, Bucket, TimelineReport, TimelineSeries};
