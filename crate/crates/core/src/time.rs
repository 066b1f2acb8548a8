//! UTC calendar bucketing and human-readable durations.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::model::Timestamp;

pub const SECOND_MS: i64 = 1_000;
pub const MINUTE_MS: i64 = 60 * SECOND_MS;
pub const HOUR_MS: i64 = 60 * MINUTE_MS;
pub const DAY_MS: i64 = 24 * HOUR_MS;
pub const YEAR_MS: i64 = 365 * DAY_MS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Hour,
    #[default]
    Day,
    /// ISO weeks, starting Monday 00:00 UTC.
    Week,
    Month,
}

impl Granularity {
    /// Start of the bucket containing `ts`.
    pub fn bucket_start(self, ts: Timestamp) -> Timestamp {
        match self {
            Granularity::Hour => ts - ts.rem_euclid(HOUR_MS),
            Granularity::Day => ts - ts.rem_euclid(DAY_MS),
            Granularity::Week => {
                let day = ts.div_euclid(DAY_MS);
                // 1970-01-05 (day 4) was a Monday
                (day - (day - 4).rem_euclid(7)) * DAY_MS
            }
            Granularity::Month => {
                let dt = DateTime::from_timestamp_millis(ts).expect("timestamp in chrono range");
                NaiveDate::from_ymd_opt(dt.year(), dt.month(), 1)
                    .expect("first of month")
                    .and_hms_opt(0, 0, 0)
                    .expect("midnight")
                    .and_utc()
                    .timestamp_millis()
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::Hour => "hour",
            Granularity::Day => "day",
            Granularity::Week => "week",
            Granularity::Month => "month",
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hour" => Ok(Granularity::Hour),
            "day" => Ok(Granularity::Day),
            "week" => Ok(Granularity::Week),
            "month" => Ok(Granularity::Month),
            other => Err(format!("unknown granularity `{other}` (hour|day|week|month)")),
        }
    }
}

/// Inclusive `[start, end]` range of epoch milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeRange {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl TimeRange {
    pub fn contains(&self, ts: Timestamp) -> bool {
        self.start <= ts && ts <= self.end
    }

    /// Length of the intersection of two closed ranges, 0 if disjoint.
    pub fn overlap_len(&self, other: &TimeRange) -> i64 {
        (self.end.min(other.end) - self.start.max(other.start)).max(0)
    }

    pub fn duration(&self) -> i64 {
        self.end - self.start
    }

    pub fn is_point(&self) -> bool {
        self.start == self.end
    }
}

/// `2003-02-28`
pub fn format_date(ts: Timestamp) -> String {
    DateTime::from_timestamp_millis(ts)
        .map(|d| d.format("%Y-%m-%d").to_string())
        .unwrap_or_else(|| ts.to_string())
}

/// `2003-02-28 13:05:00`
pub fn format_datetime(ts: Timestamp) -> String {
    DateTime::from_timestamp_millis(ts)
        .map(|d| d.format("%Y-%m-%d %H:%M:%S").to_string())
        .unwrap_or_else(|| ts.to_string())
}

/// Millisecond duration in the largest unit that keeps the value ≥ 1
/// (s, m, h, d, y), two decimals.
pub fn format_duration(ms: f64) -> String {
    let abs = ms.abs();
    let (div, unit) = if abs >= YEAR_MS as f64 {
        (YEAR_MS, "y")
    } else if abs >= DAY_MS as f64 {
        (DAY_MS, "d")
    } else if abs >= HOUR_MS as f64 {
        (HOUR_MS, "h")
    } else if abs >= MINUTE_MS as f64 {
        (MINUTE_MS, "m")
    } else {
        (SECOND_MS, "s")
    };
    format!("{:.2} {unit}", ms / div as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> Timestamp {
        DateTime::parse_from_rfc3339(s).unwrap().timestamp_millis()
    }

    #[test]
    fn buckets_align_to_calendar() {
        let t = ts("2021-03-17T15:42:10Z");
        assert_eq!(Granularity::Hour.bucket_start(t), ts("2021-03-17T15:00:00Z"));
        assert_eq!(Granularity::Day.bucket_start(t), ts("2021-03-17T00:00:00Z"));
        assert_eq!(Granularity::Week.bucket_start(t), ts("2021-03-15T00:00:00Z"));
        assert_eq!(Granularity::Month.bucket_start(t), ts("2021-03-01T00:00:00Z"));
        assert_eq!(Granularity::Week.bucket_start(0), ts("1969-12-29T00:00:00Z"));
    }

    #[test]
    fn monday_is_its_own_week_start() {
        let monday = ts("2024-01-01T00:00:00Z");
        assert_eq!(Granularity::Week.bucket_start(monday), monday);
        assert_eq!(Granularity::Week.bucket_start(monday - 1), ts("2023-12-25T00:00:00Z"));
    }

    #[test]
    fn durations_pick_units() {
        assert_eq!(format_duration(0.0), "0.00 s");
        assert_eq!(format_duration(45_570.0), "45.57 s");
        assert_eq!(format_duration(90.0 * 60_000.0), "1.50 h");
        assert_eq!(format_duration(2.0 * DAY_MS as f64), "2.00 d");
        assert_eq!(format_duration(1.5 * YEAR_MS as f64), "1.50 y");
    }

    #[test]
    fn overlap_of_ranges() {
        let a = TimeRange { start: 0, end: 10 };
        let b = TimeRange { start: 5, end: 20 };
        assert_eq!(a.overlap_len(&b), 5);
        assert_eq!(a.overlap_len(&TimeRange { start: 11, end: 12 }), 0);
    }
}
