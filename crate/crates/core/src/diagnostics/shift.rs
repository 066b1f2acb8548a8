use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ks::ks_statistic;
use crate::error::{Error, Result};
use crate::model::{align, InteractionLog, Record};
use crate::split::{EvalSide, SplitBundle};
use crate::stats::DistributionSummary;

/// Target time-gaps and target positions compared against a reference log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub side: EvalSide,
    /// KS between target gaps and the reference's consecutive gaps; absent
    /// when either gap sample is empty.
    pub timegap_ks: Option<f64>,
    /// KS between normalized target positions and reference positions.
    pub position_ks: Option<f64>,
    /// Gap from the user's last input interaction to the target (ms).
    pub target_gaps: DistributionSummary,
    pub reference_gaps: DistributionSummary,
    /// 1-based position within the user's input+target sequence divided by
    /// that sequence's length.
    pub target_positions: DistributionSummary,
    pub reference_positions: DistributionSummary,
    /// Targets whose user has no input; they have no gap.
    pub targets_without_input: usize,
}

/// Raw samples behind a [`ShiftReport`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShiftSamples {
    pub target_gaps: Vec<f64>,
    pub reference_gaps: Vec<f64>,
    pub target_positions: Vec<f64>,
    pub reference_positions: Vec<f64>,
    pub targets_without_input: usize,
}

pub fn distribution_shift(bundle: &SplitBundle, reference: &InteractionLog, side: EvalSide) -> Result<ShiftReport> {
    let s = shift_samples(bundle, reference, side)?;
    let ks = |a: &[f64], b: &[f64]| ks_statistic(a, b).ok();
    Ok(ShiftReport {
        side,
        timegap_ks: ks(&s.target_gaps, &s.reference_gaps),
        position_ks: ks(&s.target_positions, &s.reference_positions),
        target_gaps: DistributionSummary::from_durations(&s.target_gaps),
        reference_gaps: DistributionSummary::from_durations(&s.reference_gaps),
        target_positions: DistributionSummary::from_values(&s.target_positions),
        reference_positions: DistributionSummary::from_values(&s.reference_positions),
        targets_without_input: s.targets_without_input,
    })
}

pub fn shift_samples(bundle: &SplitBundle, reference: &InteractionLog, side: EvalSide) -> Result<ShiftSamples> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    let target = bundle.target(side);
    if target.is_empty() {
        return Err(Error::EmptyTargets(side.as_str()));
    }
    let aligned = align(&[bundle.input(side), target]);
    let (input, target) = (&aligned[0], &aligned[1]);
    let inputs: HashMap<u32, &[Record]> = input.sequences().collect();

    let mut out = ShiftSamples::default();
    for (user, targets) in target.sequences() {
        let history = inputs.get(&user).copied().unwrap_or(&[]);
        match history.last() {
            Some(last) => out
                .target_gaps
                .extend(targets.iter().map(|t| (t.timestamp - last.timestamp) as f64)),
            None => out.targets_without_input += targets.len(),
        }
        let mut full: Vec<Record> = history.iter().chain(targets).copied().collect();
        full.sort_unstable_by_key(Record::key);
        let len = full.len() as f64;
        for t in targets {
            let pos = full
                .binary_search_by_key(&t.key(), Record::key)
                .expect("target in its own sequence");
            out.target_positions.push((pos + 1) as f64 / len);
        }
    }

    for (_, seq) in reference.sequences() {
        let len = seq.len() as f64;
        out.reference_positions.extend((1..=seq.len()).map(|p| p as f64 / len));
        out.reference_gaps
            .extend(seq.windows(2).map(|w| (w[1].timestamp - w[0].timestamp) as f64));
    }
    Ok(out)
}
