//! Conventional fairness table: equal opportunity (TPR), equalized odds
//! (TPR + FPR), and BER equality, reported as differences or ratios against
//! the reference group, plus the 0.8–1.25 disparity band.

use crate::error::{Error, Result};
use crate::metrics::{GroupMetrics, MetricEstimate};
use crate::scalar::{real, Real};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FairnessMode {
    /// group value − reference value (the default).
    Difference,
    /// group value / reference value; undefined when the reference is 0.
    Ratio,
}

/// One non-reference group's deltas. `None` marks an undefined cell
/// (an undefined underlying metric, or a ratio against zero).
#[derive(Debug, Clone, Serialize)]
pub struct FairnessRow<F> {
    pub group: String,
    pub n: usize,
    pub tpr_delta: Option<F>,
    pub fpr_delta: Option<F>,
    pub ber_delta: Option<F>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceInfo {
    pub group: String,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FairnessTable<F> {
    pub mode: FairnessMode,
    pub reference: ReferenceInfo,
    /// Non-reference groups, in assignment order.
    pub rows: Vec<FairnessRow<F>>,
}

fn delta<F: Real>(
    group: &MetricEstimate<F>,
    reference: &MetricEstimate<F>,
    mode: FairnessMode,
) -> Option<F> {
    let (g, r) = (group.value?, reference.value?);
    match mode {
        FairnessMode::Difference => Some(g - r),
        FairnessMode::Ratio => {
            if r == F::zero() {
                None
            } else {
                Some(g / r)
            }
        }
    }
}

/// Builds the fairness table from already-computed group metrics.
/// `metrics` must be in assignment order with the reference present.
pub fn fairness_table<F: Real>(
    metrics: &[GroupMetrics<F>],
    reference: &str,
    mode: FairnessMode,
) -> Result<FairnessTable<F>> {
    let ref_metrics = metrics
        .iter()
        .find(|m| m.group == reference)
        .ok_or_else(|| Error::Config(format!("reference group \"{reference}\" not in metrics")))?;
    if metrics.len() < 2 {
        return Err(Error::Config(
            "fairness table needs at least two groups".into(),
        ));
    }

    let rows = metrics
        .iter()
        .filter(|m| m.group != reference)
        .map(|m| FairnessRow {
            group: m.group.clone(),
            n: m.n,
            tpr_delta: delta(&m.tpr, &ref_metrics.tpr, mode),
            fpr_delta: delta(&m.fpr, &ref_metrics.fpr, mode),
            ber_delta: delta(&m.ber, &ref_metrics.ber, mode),
        })
        .collect();

    Ok(FairnessTable {
        mode,
        reference: ReferenceInfo {
            group: ref_metrics.group.clone(),
            n: ref_metrics.n,
        },
        rows,
    })
}

/// The 0.8–1.25 guidance band around a reference metric level. Rendered as
/// context only; nothing in the engine gates on it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DisparityBand<F> {
    pub metric: &'static str,
    pub low: F,
    pub high: F,
    /// True when the reference value is 0 and the band collapses.
    pub degenerate: bool,
}

/// Band endpoints at exactly 0.8× and 1.25× the reference value.
/// Returns `None` when the reference estimate is undefined.
pub fn disparity_band<F: Real>(
    metric: &'static str,
    reference: &MetricEstimate<F>,
) -> Option<DisparityBand<F>> {
    let r = reference.value?;
    Some(DisparityBand {
        metric,
        low: real::<F>(0.8) * r,
        high: real::<F>(1.25) * r,
        degenerate: r == F::zero(),
    })
}
