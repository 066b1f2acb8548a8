use serde::{Deserialize, Serialize};

/// Quantile levels reported for every distribution.
pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

pub const MAX_BINS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub q: f64,
    pub value: f64,
}

/// Summary of a sample of per-entity aggregates.
///
/// Quantiles interpolate linearly between order statistics. Histogram bins
/// use the Freedman–Diaconis width (Sturges when the IQR is zero), capped
/// at [`MAX_BINS`]; the last bin is closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub count: usize,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub quantiles: Vec<Quantile>,
    pub histogram: Vec<HistogramBin>,
    /// Bins equally spaced in `ln(1 + x)`; only for non-negative durations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_histogram: Option<Vec<HistogramBin>>,
}

impl DistributionSummary {
    pub fn from_values(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Self::from_sorted(&sorted)
    }

    /// Like [`from_values`](Self::from_values) plus a logarithmic histogram.
    /// Values must be non-negative.
    pub fn from_durations(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let mut summary = Self::from_sorted(&sorted);
        debug_assert!(sorted.first().is_none_or(|&v| v >= 0.0));
        let logged: Vec<f64> = sorted.iter().map(|v| v.max(0.0).ln_1p()).collect();
        summary.log_histogram = Some(
            histogram(&logged)
                .into_iter()
                .map(|b| HistogramBin {
                    lower: b.lower.exp_m1(),
                    upper: b.upper.exp_m1(),
                    count: b.count,
                })
                .collect(),
        );
        summary
    }

    fn from_sorted(sorted: &[f64]) -> Self {
        let count = sorted.len();
        if count == 0 {
            return DistributionSummary {
                count,
                mean: None,
                min: None,
                max: None,
                quantiles: Vec::new(),
                histogram: Vec::new(),
                log_histogram: None,
            };
        }
        let sum: f64 = sorted.iter().sum();
        DistributionSummary {
            count,
            mean: Some(sum / count as f64),
            min: sorted.first().copied(),
            max: sorted.last().copied(),
            quantiles: QUANTILE_LEVELS
                .iter()
                .map(|&q| Quantile {
                    q,
                    value: quantile_sorted(sorted, q),
                })
                .collect(),
            histogram: histogram(sorted),
            log_histogram: None,
        }
    }

    pub fn quantile(&self, q: f64) -> Option<f64> {
        self.quantiles.iter().find(|x| x.q == q).map(|x| x.value)
    }

    pub fn median(&self) -> Option<f64> {
        self.quantile(0.5)
    }
}

/// Linear interpolation between order statistics (`h = (n - 1) q`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn bin_count(sorted: &[f64]) -> usize {
    let n = sorted.len();
    let (min, max) = (sorted[0], sorted[n - 1]);
    if n < 2 || max <= min {
        return 1;
    }
    let iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    let width = 2.0 * iqr / (n as f64).cbrt();
    let bins = if width > 0.0 {
        ((max - min) / width).ceil()
    } else {
        (n as f64).log2().ceil() + 1.0
    };
    (bins as usize).clamp(1, MAX_BINS)
}

fn histogram(sorted: &[f64]) -> Vec<HistogramBin> {
    if sorted.is_empty() {
        return Vec::new();
    }
    let bins = bin_count(sorted);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let span = max - min;
    let edge = |k: usize| {
        if k == bins {
            max
        } else {
            min + span * k as f64 / bins as f64
        }
    };
    let mut counts = vec![0usize; bins];
    for &v in sorted {
        let k = if span > 0.0 {
            (((v - min) / span) * bins as f64).floor() as usize
        } else {
            0
        };
        counts[k.min(bins - 1)] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            lower: edge(k),
            upper: edge(k + 1),
            count,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sample() {
        let s = DistributionSummary::from_values(&[]);
        assert_eq!(s.count, 0);
        assert!(s.mean.is_none() && s.histogram.is_empty() && s.quantiles.is_empty());
    }

    #[test]
    fn linear_quantiles() {
        let s = DistributionSummary::from_values(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!(s.median(), Some(2.5));
        assert_eq!(s.quantile(0.25), Some(1.75));
        assert_eq!(s.quantile(0.05), Some(1.15));
        assert_eq!(s.mean, Some(2.5));
        assert_eq!((s.min, s.max), (Some(1.0), Some(4.0)));
    }

    #[test]
    fn constant_sample_has_one_bin() {
        let s = DistributionSummary::from_values(&[7.0; 5]);
        assert_eq!(
            s.histogram,
            [HistogramBin {
                lower: 7.0,
                upper: 7.0,
                count: 5
            }]
        );
    }

    #[test]
    fn histograms_conserve_count_and_cap_bins() {
        let values: Vec<f64> = (0..5000).map(|i| ((i * 7919) % 10007) as f64).collect();
        let s = DistributionSummary::from_durations(&values);
        assert_eq!(s.histogram.iter().map(|b| b.count).sum::<usize>(), 5000);
        assert!(s.histogram.len() <= MAX_BINS);
        let log = s.log_histogram.unwrap();
        assert_eq!(log.iter().map(|b| b.count).sum::<usize>(), 5000);
        assert!((log.last().unwrap().upper - 10006.0).abs() < 1e-6);
    }

    #[test]
    fn zero_iqr_falls_back() {
        let mut values = vec![0.0; 100];
        values.push(50.0);
        let s = DistributionSummary::from_values(&values);
        assert_eq!(s.histogram.len(), 8);
        assert_eq!(s.histogram[0].count, 100);
        assert_eq!(s.histogram[7].count, 1);
    }
}
