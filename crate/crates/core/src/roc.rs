//! ROC curves, AUC (trapezoid and Mann-Whitney forms), DeLong confidence
//! intervals, and the Youden-J default threshold.

use crate::error::{Error, Result};
use crate::metrics::{MetricEstimate, Z_95};
use crate::scalar::{real, Real};
use serde::Serialize;

/// One operating point. `threshold` is `None` only for the (0, 0) anchor,
/// which corresponds to a threshold above every prediction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RocPoint<F> {
    pub threshold: Option<F>,
    pub fpr: F,
    pub tpr: F,
}

#[derive(Debug, Clone, Serialize)]
pub struct RocCurve<F> {
    /// Group name, or "pooled" for the whole cohort.
    pub group: String,
    /// Points in descending-threshold order from (0,0) to (1,1), one per
    /// distinct prediction value.
    pub points: Vec<RocPoint<F>>,
    pub auc: MetricEstimate<F>,
}

fn class_counts(labels: &[u8]) -> Result<(usize, usize)> {
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateLabels(
            "ROC requires both label classes".into(),
        ));
    }
    Ok((pos, neg))
}

/// Builds the ROC curve for `predictions` against 0/1 `labels` using the
/// same inclusive `>=` classification rule as the metrics engine. The AUC
/// attached here is the trapezoidal area; no CI.
pub fn roc_curve<F: Real>(group: &str, predictions: &[F], labels: &[u8]) -> Result<RocCurve<F>> {
    if predictions.len() != labels.len() {
        return Err(Error::Shape("predictions/labels lengths differ".into()));
    }
    let (pos, neg) = class_counts(labels)?;

    let mut order: Vec<usize> = (0..predictions.len()).collect();
    order.sort_by(|&a, &b| predictions[b].partial_cmp(&predictions[a]).unwrap());

    let mut points = vec![RocPoint {
        threshold: None,
        fpr: F::zero(),
        tpr: F::zero(),
    }];
    let (pos_f, neg_f) = (real::<F>(pos as f64), real::<F>(neg as f64));
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let value = predictions[order[i]];
        // absorb every record tied at this value before emitting a point
        while i < order.len() && predictions[order[i]] == value {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold: Some(value),
            fpr: real::<F>(fp as f64) / neg_f,
            tpr: real::<F>(tp as f64) / pos_f,
        });
    }

    let auc = trapezoid_area(&points);
    Ok(RocCurve {
        group: group.to_string(),
        points,
        auc: MetricEstimate::point(auc),
    })
}

fn trapezoid_area<F: Real>(points: &[RocPoint<F>]) -> F {
    let half = real::<F>(0.5);
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) * half)
        .sum()
}

/// AUC as the Mann-Whitney pair statistic:
/// (concordant pairs + 0.5 · tied pairs) / (positives · negatives),
/// computed from midranks in O(n log n).
pub fn auc_mann_whitney<F: Real>(predictions: &[F], labels: &[u8]) -> Result<F> {
    if predictions.len() != labels.len() {
        return Err(Error::Shape("predictions/labels lengths differ".into()));
    }
    let (pos, neg) = class_counts(labels)?;

    let mut order: Vec<usize> = (0..predictions.len()).collect();
    order.sort_by(|&a, &b| predictions[a].partial_cmp(&predictions[b]).unwrap());

    // midranks over the sorted order, 1-based
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let value = predictions[order[i]];
        let start = i;
        while i < order.len() && predictions[order[i]] == value {
            i += 1;
        }
        let midrank = (start + i + 1) as f64 / 2.0; // mean of ranks start+1 ..= i
        for &idx in &order[start..i] {
            if labels[idx] == 1 {
                rank_sum_pos += midrank;
            }
        }
    }

    let pos_f = pos as f64;
    let u = rank_sum_pos - pos_f * (pos_f + 1.0) / 2.0;
    Ok(real::<F>(u / (pos_f * neg as f64)))
}

/// DeLong 95% CI for the AUC via structural components. With fewer than two
/// records in either class the point estimate is kept but the CI is absent.
pub fn auc_ci_delong<F: Real>(predictions: &[F], labels: &[u8]) -> Result<MetricEstimate<F>> {
    if predictions.len() != labels.len() {
        return Err(Error::Shape("predictions/labels lengths differ".into()));
    }
    let (pos, neg) = class_counts(labels)?;
    let auc: F = auc_mann_whitney(predictions, labels)?;
    if pos < 2 || neg < 2 {
        return Ok(MetricEstimate::point(auc));
    }

    let pos_preds: Vec<F> = predictions
        .iter()
        .zip(labels)
        .filter(|(_, &y)| y == 1)
        .map(|(&p, _)| p)
        .collect();
    let neg_preds: Vec<F> = predictions
        .iter()
        .zip(labels)
        .filter(|(_, &y)| y == 0)
        .map(|(&p, _)| p)
        .collect();

    let half = real::<F>(0.5);
    let psi = |a: F, b: F| -> F {
        if a > b {
            F::one()
        } else if a == b {
            half
        } else {
            F::zero()
        }
    };

    // V10_i averages psi over negatives; V01_j averages psi over positives.
    let neg_f = real::<F>(neg as f64);
    let pos_f = real::<F>(pos as f64);
    let v10: Vec<F> = pos_preds
        .iter()
        .map(|&x| neg_preds.iter().map(|&y| psi(x, y)).sum::<F>() / neg_f)
        .collect();
    let v01: Vec<F> = neg_preds
        .iter()
        .map(|&y| pos_preds.iter().map(|&x| psi(x, y)).sum::<F>() / pos_f)
        .collect();

    let sample_var = |v: &[F], mean: F| -> F {
        let n1 = real::<F>((v.len() - 1) as f64);
        v.iter().map(|&x| (x - mean) * (x - mean)).sum::<F>() / n1
    };
    let s10 = sample_var(&v10, auc);
    let s01 = sample_var(&v01, auc);
    let se = (s10 / pos_f + s01 / neg_f).sqrt();

    let z = real::<F>(Z_95);
    Ok(MetricEstimate::with_ci(
        auc,
        (auc - z * se).max(F::zero()),
        (auc + z * se).min(F::one()),
    ))
}

/// The threshold maximizing Youden's J = TPR − FPR over the curve's points.
/// Ties resolve toward the smaller threshold (the more sensitive operating
/// point).
pub fn youden_threshold<F: Real>(curve: &RocCurve<F>) -> F {
    let mut best: Option<(F, F)> = None; // (J, threshold)
    for p in &curve.points {
        let Some(threshold) = p.threshold else {
            continue;
        };
        let j = p.tpr - p.fpr;
        best = match best {
            None => Some((j, threshold)),
            Some((bj, bt)) => {
                if j > bj || (j == bj && threshold < bt) {
                    Some((j, threshold))
                } else {
                    Some((bj, bt))
                }
            }
        };
    }
    best.expect("curve has at least one real point").1
}
