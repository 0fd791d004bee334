//! Confusion counts, the five group performance metrics with Wilson 95%
//! confidence intervals, and the number-needed translations of PPV and NPV.

use crate::cohort::PredictionKind;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use serde::Serialize;

/// Two-sided 95% normal quantile used for every interval in the engine.
pub const Z_95: f64 = 1.959964;

/// Confusion counts for one group at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn n(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.fp + self.tn
    }
}

/// A point estimate with an optional 95% CI.
///
/// `defined == false` means the underlying denominator was zero; such
/// estimates carry no value and no CI, and must never be read as 0.
/// Derived quantities (BER, NNTP, NNTN) are defined without a CI.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricEstimate<F> {
    pub value: Option<F>,
    pub ci_low: Option<F>,
    pub ci_high: Option<F>,
    pub defined: bool,
}

impl<F: Real> MetricEstimate<F> {
    pub fn undefined() -> Self {
        Self {
            value: None,
            ci_low: None,
            ci_high: None,
            defined: false,
        }
    }

    pub fn point(value: F) -> Self {
        Self {
            value: Some(value),
            ci_low: None,
            ci_high: None,
            defined: true,
        }
    }

    pub fn with_ci(value: F, ci_low: F, ci_high: F) -> Self {
        Self {
            value: Some(value),
            ci_low: Some(ci_low),
            ci_high: Some(ci_high),
            defined: true,
        }
    }
}

/// Wilson score interval for `successes` out of `trials` at the 95% level.
/// Bounds are clamped to [0, 1]; `trials == 0` yields an undefined estimate.
pub fn wilson_ci<F: Real>(successes: usize, trials: usize) -> MetricEstimate<F> {
    wilson_ci_with_z(successes, trials, real::<F>(Z_95))
}

/// Wilson score interval with an explicit normal quantile.
pub fn wilson_ci_with_z<F: Real>(successes: usize, trials: usize, z: F) -> MetricEstimate<F> {
    if trials == 0 {
        return MetricEstimate::undefined();
    }
    debug_assert!(successes <= trials);
    let n = real::<F>(trials as f64);
    let p = real::<F>(successes as f64) / n;
    let z2 = z * z;
    let denom = F::one() + z2 / n;
    let center = (p + z2 / (real::<F>(2.0) * n)) / denom;
    let four = real::<F>(4.0);
    let half_width = z * (p * (F::one() - p) / n + z2 / (four * n * n)).sqrt() / denom;
    // the boundary cases are exactly 0 and 1 in the closed form; computing
    // them keeps roundoff from pushing a bound past the point estimate
    let low = if successes == 0 {
        F::zero()
    } else {
        (center - half_width).max(F::zero())
    };
    let high = if successes == trials {
        F::one()
    } else {
        (center + half_width).min(F::one())
    };
    MetricEstimate::with_ci(p, low, high)
}

/// All per-group summary metrics at one threshold.
#[derive(Debug, Clone, Serialize)]
pub struct GroupMetrics<F> {
    pub group: String,
    pub n: usize,
    pub counts: ConfusionCounts,
    pub accuracy: MetricEstimate<F>,
    pub tpr: MetricEstimate<F>,
    pub fpr: MetricEstimate<F>,
    pub ppv: MetricEstimate<F>,
    pub npv: MetricEstimate<F>,
    /// Balanced error rate, (FPR + 1 − TPR) / 2.
    pub ber: MetricEstimate<F>,
    /// Number of positive predictions per true positive, 1 / PPV.
    pub nntp: MetricEstimate<F>,
    /// Number of negative predictions per true negative, 1 / NPV.
    pub nntn: MetricEstimate<F>,
}

/// Thresholds predictions into 0/1 calls: `1` iff `prediction >= threshold`.
/// Binary predictions pass through unchanged.
pub fn classify<F: Real>(predictions: &[F], kind: PredictionKind, threshold: F) -> Vec<u8> {
    match kind {
        PredictionKind::Binary => predictions
            .iter()
            .map(|&p| u8::from(p == F::one()))
            .collect(),
        PredictionKind::Probability | PredictionKind::Score => predictions
            .iter()
            .map(|&p| u8::from(p >= threshold))
            .collect(),
    }
}

/// Tallies prediction/label pairs for the records selected by `mask`.
pub fn confusion_counts(
    binary_preds: &[u8],
    labels: &[u8],
    mask: &[bool],
) -> Result<ConfusionCounts> {
    if binary_preds.len() != labels.len() || labels.len() != mask.len() {
        return Err(Error::Shape("predictions/labels/mask lengths differ".into()));
    }
    let mut c = ConfusionCounts {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for ((&p, &y), &m) in binary_preds.iter().zip(labels).zip(mask) {
        if !m {
            continue;
        }
        match (p, y) {
            (1, 1) => c.tp += 1,
            (1, 0) => c.fp += 1,
            (0, 0) => c.tn += 1,
            (0, 1) => c.fn_ += 1,
            _ => return Err(Error::Validation("predictions/labels must be 0 or 1".into())),
        }
    }
    if c.n() == 0 {
        return Err(Error::EmptyGroup("mask selects no records".into()));
    }
    Ok(c)
}

/// Computes the five performance metrics (with Wilson CIs) plus BER, NNTP,
/// and NNTN from one group's confusion counts. Any zero denominator makes
/// the affected metric undefined rather than zero.
pub fn performance_metrics<F: Real>(group: &str, counts: ConfusionCounts) -> GroupMetrics<F> {
    let half = real::<F>(0.5);

    let accuracy = wilson_ci(counts.tp + counts.tn, counts.n());
    let tpr = wilson_ci(counts.tp, counts.positives());
    let fpr = wilson_ci(counts.fp, counts.negatives());
    let ppv = wilson_ci(counts.tp, counts.tp + counts.fp);
    let npv = wilson_ci(counts.tn, counts.tn + counts.fn_);

    let ber = match (tpr.value, fpr.value) {
        (Some(t), Some(f)) => MetricEstimate::point((f + (F::one() - t)) * half),
        _ => MetricEstimate::undefined(),
    };
    // (tp+fp)/tp rather than 1/ppv keeps the quotient exact in rationals.
    let nntp = if counts.tp > 0 {
        MetricEstimate::point(
            real::<F>((counts.tp + counts.fp) as f64) / real::<F>(counts.tp as f64),
        )
    } else {
        MetricEstimate::undefined()
    };
    let nntn = if counts.tn > 0 {
        MetricEstimate::point(
            real::<F>((counts.tn + counts.fn_) as f64) / real::<F>(counts.tn as f64),
        )
    } else {
        MetricEstimate::undefined()
    };

    GroupMetrics {
        group: group.to_string(),
        n: counts.n(),
        counts,
        accuracy,
        tpr,
        fpr,
        ppv,
        npv,
        ber,
        nntp,
        nntn,
    }
}
