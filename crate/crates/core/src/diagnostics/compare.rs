use serde::{Deserialize, Serialize};

use super::{cold_start, distribution_shift, leakage};
use crate::error::{Error, Result};
use crate::model::InteractionLog;
use crate::split::{describe_split, EvalSide, SplitBundle, SplitDescription};
use crate::time::Granularity;

#[derive(Debug, Clone, Default)]
pub struct CompareOptions<'a> {
    /// Reference for shift statistics; each bundle's train when absent.
    pub reference: Option<&'a InteractionLog>,
    /// Downgrade a provenance mismatch from an error to a warning.
    pub allow_provenance_mismatch: bool,
}

/// Headline numbers of one bundle, for the test side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitComparisonRow {
    pub label: String,
    pub description: SplitDescription,
    pub overlap_pct: f64,
    pub shared_interactions: usize,
    pub leaked_target_pct: f64,
    pub leaked_item_target_pct: f64,
    pub cold_users_pct: f64,
    pub cold_items_pct: f64,
    pub cold_interactions_pct: f64,
    pub timegap_ks: Option<f64>,
    pub position_ks: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitComparisonMatrix {
    pub rows: Vec<SplitComparisonRow>,
    pub warnings: Vec<String>,
}

pub fn compare_splits(bundles: &[&SplitBundle], options: &CompareOptions<'_>) -> Result<SplitComparisonMatrix> {
    if bundles.len() < 2 {
        return Err(Error::TooFewBundles(bundles.len()));
    }
    let mut warnings = Vec::new();
    let first = &bundles[0].provenance;
    for b in &bundles[1..] {
        if !b.provenance.same_origin(first) {
            let msg = format!(
                "`{}` ({}) and `{}` ({}) have different provenance",
                bundles[0].label(),
                first.source,
                b.label(),
                b.provenance.source
            );
            if options.allow_provenance_mismatch {
                warnings.push(msg);
            } else {
                return Err(Error::ProvenanceMismatch(msg));
            }
        }
    }

    let side = EvalSide::Test;
    let rows = bundles
        .iter()
        .map(|b| {
            let leak = leakage(b, side, Granularity::Day);
            let cold = cold_start(b, side, Granularity::Day);
            let shift = distribution_shift(b, options.reference.unwrap_or(&b.train), side).ok();
            SplitComparisonRow {
                label: b.label(),
                description: describe_split(b),
                overlap_pct: leak.overlap_pct,
                shared_interactions: leak.shared_interactions,
                leaked_target_pct: leak.leaked_target_pct(),
                leaked_item_target_pct: leak.leaked_item_target_pct(),
                cold_users_pct: cold.cold_users.pct,
                cold_items_pct: cold.cold_items.pct,
                cold_interactions_pct: cold.cold_interactions.pct,
                timegap_ks: shift.as_ref().and_then(|s| s.timegap_ks),
                position_ks: shift.as_ref().and_then(|s| s.position_ks),
            }
        })
        .collect();
    Ok(SplitComparisonMatrix { rows, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::log_from_rows;
    use crate::model::SubsetRole;
    use crate::preprocess::PreprocessSpec;
    use crate::split::{split, Provenance, SplitSpec, TargetMode};

    fn log() -> InteractionLog {
        let rows: Vec<_> = (0..60)
            .map(|k| (format!("u{}", k % 6), format!("i{}", k % 4), k as i64))
            .collect();
        log_from_rows(rows, SubsetRole::Raw).unwrap()
    }

    #[test]
    fn loo_and_gts_rows() {
        let l = log();
        let prov = Provenance::new("mem", PreprocessSpec::default(), l.len());
        let loo = split(&l, &SplitSpec::leave_one_out(), prov.clone()).unwrap();
        let gts = split(&l, &SplitSpec::global_temporal(0.8, 0.9, TargetMode::AllItems), prov).unwrap();
        let m = compare_splits(&[&loo, &gts], &CompareOptions::default()).unwrap();
        assert_eq!(m.rows.len(), 2);
        assert_eq!(m.rows[0].label, "loo");
        assert_eq!(m.rows[0].cold_users_pct, 0.0);
        assert_eq!(m.rows[1].leaked_target_pct, 0.0);
    }

    #[test]
    fn provenance_mismatch() {
        let l = log();
        let a = split(
            &l,
            &SplitSpec::leave_one_out(),
            Provenance::new("a", PreprocessSpec::default(), 1),
        )
        .unwrap();
        let b = split(
            &l,
            &SplitSpec::leave_one_out(),
            Provenance::new("b", PreprocessSpec::default(), 1),
        )
        .unwrap();
        assert!(matches!(
            compare_splits(&[&a, &b], &CompareOptions::default()),
            Err(Error::ProvenanceMismatch(_))
        ));
        let opts = CompareOptions {
            allow_provenance_mismatch: true,
            ..Default::default()
        };
        assert_eq!(compare_splits(&[&a, &b], &opts).unwrap().warnings.len(), 1);
        assert!(matches!(compare_splits(&[&a], &opts), Err(Error::TooFewBundles(1))));
    }
}
