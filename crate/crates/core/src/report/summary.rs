use serde::{Deserialize, Serialize};

use super::thresholds::{Direction, Threshold, ThresholdConfig};
use crate::diagnostics::{ColdStartReport, LeakageReport, ShiftReport};
use crate::model::SubsetRole;
use crate::split::{EvalSide, Provenance, SplitDescription};
use crate::stats::{CoreStatsReport, RepeatReport, TemporalStatsReport, TimelineReport};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CardStatus {
    Ok,
    Warn,
    Alert,
    NotApplicable,
}

impl CardStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CardStatus::Ok => "ok",
            CardStatus::Warn => "warn",
            CardStatus::Alert => "alert",
            CardStatus::NotApplicable => "not_applicable",
        }
    }
}

/// Status of one value under one threshold pair. Missing or non-finite
/// values are not applicable.
pub fn evaluate(value: Option<f64>, direction: Direction, t: Threshold) -> CardStatus {
    let Some(v) = value.filter(|v| v.is_finite()) else {
        return CardStatus::NotApplicable;
    };
    let (alert, warn) = match direction {
        Direction::HigherIsWorse => (v >= t.alert, v >= t.warn),
        Direction::LowerIsWorse => (v < t.alert, v < t.warn),
    };
    if alert {
        CardStatus::Alert
    } else if warn {
        CardStatus::Warn
    } else {
        CardStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Card {
    pub metric: String,
    pub value: Option<f64>,
    pub status: CardStatus,
    /// Detail page holding the metric's full report.
    pub link: String,
}

/// Everything an audit computed; any part may be missing.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AuditReports {
    pub dataset: Option<String>,
    pub provenance: Option<Provenance>,
    pub core: Option<CoreStatsReport>,
    pub temporal: Option<TemporalStatsReport>,
    pub repeats: Option<RepeatReport>,
    pub timeline: Option<TimelineReport>,
    pub split: Option<SplitDescription>,
    pub leakage: Vec<LeakageReport>,
    pub cold_start: Vec<ColdStartReport>,
    pub shift: Vec<ShiftReport>,
}

impl AuditReports {
    pub fn is_empty(&self) -> bool {
        self.core.is_none()
            && self.temporal.is_none()
            && self.repeats.is_none()
            && self.timeline.is_none()
            && self.split.is_none()
            && self.leakage.is_empty()
            && self.cold_start.is_empty()
            && self.shift.is_empty()
    }

    pub fn leakage(&self, side: EvalSide) -> Option<&LeakageReport> {
        self.leakage.iter().find(|r| r.side == side)
    }

    pub fn cold_start(&self, side: EvalSide) -> Option<&ColdStartReport> {
        self.cold_start.iter().find(|r| r.side == side)
    }

    pub fn shift(&self, side: EvalSide) -> Option<&ShiftReport> {
        self.shift.iter().find(|r| r.side == side)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub dataset: Option<String>,
    pub provenance: Option<Provenance>,
    pub split_label: Option<String>,
    pub toolkit_version: String,
    /// RFC 3339; left empty unless the caller supplies a clock, so that
    /// repeated runs produce identical documents.
    pub generated_at: Option<String>,
    pub thresholds: ThresholdConfig,
    pub cards: Vec<Card>,
}

impl SummaryReport {
    pub fn card(&self, metric: &str) -> Option<&Card> {
        self.cards.iter().find(|c| c.metric == metric)
    }

    pub fn worst_status(&self) -> CardStatus {
        let rank = |s: CardStatus| match s {
            CardStatus::Alert => 3,
            CardStatus::Warn => 2,
            CardStatus::Ok => 1,
            CardStatus::NotApplicable => 0,
        };
        self.cards
            .iter()
            .map(|c| c.status)
            .max_by_key(|&s| rank(s))
            .unwrap_or(CardStatus::NotApplicable)
    }

    pub fn has_alert(&self) -> bool {
        self.cards.iter().any(|c| c.status == CardStatus::Alert)
    }
}

/// Detail page for each summary metric.
pub fn metric_link(metric: &str) -> &'static str {
    match metric {
        "collision_rate_pct" => "core_temporal",
        "consecutive_repeats_pct" => "repeats",
        "leaked_target_pct" => "leakage",
        "cold_items_pct" | "cold_users_pct" => "cold_start",
        "timegap_ks" | "position_ks" => "shift",
        _ => "split",
    }
}

/// Split cards describe the test side. `cold_items_pct` is the share of
/// test targets whose item never occurs in train.
pub fn summarize(reports: &AuditReports, thresholds: &ThresholdConfig) -> SummaryReport {
    let side = EvalSide::Test;
    let leak = reports.leakage(side);
    let cold = reports.cold_start(side);
    let shift = reports.shift(side);
    let target = reports.split.as_ref().and_then(|s| s.role(SubsetRole::TestTarget));

    let cards = thresholds
        .entries()
        .into_iter()
        .map(|(metric, direction, threshold)| {
            let value = match metric {
                "collision_rate_pct" => reports.temporal.as_ref().map(|t| t.collision_rate_pct),
                "consecutive_repeats_pct" => reports.repeats.as_ref().map(|r| r.consecutive_repeats_pct),
                "leaked_target_pct" => leak.map(|l| l.leaked_target_pct()),
                "cold_items_pct" => cold.map(|c| c.cold_interactions.pct),
                "cold_users_pct" => cold.map(|c| c.cold_users.pct),
                "timegap_ks" => shift.and_then(|s| s.timegap_ks),
                "position_ks" => shift.and_then(|s| s.position_ks),
                "min_eval_users" => target.map(|t| t.n_users as f64),
                "min_eval_interactions" => target.map(|t| t.n_interactions as f64),
                other => unreachable!("unknown metric {other}"),
            };
            Card {
                metric: metric.to_owned(),
                value,
                status: evaluate(value, direction, threshold),
                link: metric_link(metric).to_owned(),
            }
        })
        .collect();

    SummaryReport {
        dataset: reports.dataset.clone(),
        provenance: reports
            .provenance
            .clone()
            .or_else(|| reports.split.as_ref().map(|s| s.provenance.clone())),
        split_label: reports.split.as_ref().map(|s| s.label.clone()),
        toolkit_version: TOOLKIT_VERSION.to_owned(),
        generated_at: None,
        thresholds: thresholds.clone(),
        cards,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_arithmetic() {
        let t = Threshold::new(1.0, 10.0);
        assert_eq!(evaluate(Some(89.0), Direction::HigherIsWorse, t), CardStatus::Alert);
        assert_eq!(evaluate(Some(10.0), Direction::HigherIsWorse, t), CardStatus::Alert);
        assert_eq!(evaluate(Some(1.0), Direction::HigherIsWorse, t), CardStatus::Warn);
        assert_eq!(evaluate(Some(0.0), Direction::HigherIsWorse, t), CardStatus::Ok);
        assert_eq!(evaluate(None, Direction::HigherIsWorse, t), CardStatus::NotApplicable);
        let low = Threshold::new(1000.0, 100.0);
        assert_eq!(evaluate(Some(99.0), Direction::LowerIsWorse, low), CardStatus::Alert);
        assert_eq!(evaluate(Some(100.0), Direction::LowerIsWorse, low), CardStatus::Warn);
        assert_eq!(evaluate(Some(1000.0), Direction::LowerIsWorse, low), CardStatus::Ok);
    }

    #[test]
    fn empty_reports_are_not_applicable() {
        let s = summarize(&AuditReports::default(), &ThresholdConfig::default());
        assert_eq!(s.cards.len(), 9);
        assert!(s.cards.iter().all(|c| c.status == CardStatus::NotApplicable));
        assert_eq!(s.cards[0].metric, "collision_rate_pct");
        assert_eq!(s.worst_status(), CardStatus::NotApplicable);
    }
}
