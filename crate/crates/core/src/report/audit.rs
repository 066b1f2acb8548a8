use super::schema::Document;
use super::summary::AuditReports;
use crate::diagnostics::{cold_start, distribution_shift, leakage};
use crate::error::{Error, Result};
use crate::model::InteractionLog;
use crate::split::{describe_split, EvalSide, SplitBundle};
use crate::stats::{core_stats, repeat_stats, temporal_stats, timeline};
use crate::time::Granularity;

/// Run every diagnostic on a bundle.
///
/// Dataset-level statistics and the shift reference use `dataset` (the log
/// the split was cut from); without it the training subset stands in.
/// Sides whose targets are empty get leakage and cold-start reports but no
/// shift report.
pub fn run_audit(
    bundle: &SplitBundle,
    dataset: Option<&InteractionLog>,
    name: Option<&str>,
    granularity: Granularity,
) -> Result<AuditReports> {
    let base = dataset.unwrap_or(&bundle.train);
    let mut logs = Vec::with_capacity(6);
    if let Some(d) = dataset {
        logs.push((d.role(), d));
    }
    logs.extend(bundle.subsets().map(|l| (l.role(), l)));

    let mut out = AuditReports {
        dataset: name.map(str::to_owned),
        provenance: Some(bundle.provenance.clone()),
        split: Some(describe_split(bundle)),
        timeline: Some(timeline(&logs, granularity, None)?),
        ..Default::default()
    };
    if !base.is_empty() {
        out.core = Some(core_stats(base)?);
        out.temporal = Some(temporal_stats(base)?);
        out.repeats = Some(repeat_stats(base)?);
    }
    for side in [EvalSide::Validation, EvalSide::Test] {
        out.leakage.push(leakage(bundle, side, granularity));
        out.cold_start.push(cold_start(bundle, side, granularity));
        match distribution_shift(bundle, base, side) {
            Ok(s) => out.shift.push(s),
            Err(Error::EmptyTargets(_) | Error::EmptyReference) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

impl AuditReports {
    /// Each contained report as a standalone document with a stable file
    /// stem, in a fixed order.
    pub fn documents(&self) -> Vec<(String, Document)> {
        let mut out = Vec::new();
        if let Some(r) = &self.core {
            out.push(("core_stats".to_owned(), Document::CoreStats(r.clone())));
        }
        if let Some(r) = &self.temporal {
            out.push(("temporal_stats".to_owned(), Document::TemporalStats(r.clone())));
        }
        if let Some(r) = &self.repeats {
            out.push(("repeat_stats".to_owned(), Document::RepeatStats(r.clone())));
        }
        if let Some(r) = &self.timeline {
            out.push(("timeline".to_owned(), Document::Timeline(r.clone())));
        }
        if let Some(r) = &self.split {
            out.push(("split_description".to_owned(), Document::SplitDescription(r.clone())));
        }
        for r in &self.leakage {
            out.push((format!("leakage_{}", r.side.as_str()), Document::Leakage(r.clone())));
        }
        for r in &self.cold_start {
            out.push((
                format!("cold_start_{}", r.side.as_str()),
                Document::ColdStart(r.clone()),
            ));
        }
        for r in &self.shift {
            out.push((format!("shift_{}", r.side.as_str()), Document::Shift(r.clone())));
        }
        out
    }
}
