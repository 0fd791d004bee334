//! Rank-based summaries: prediction distributions by group × outcome
//! (Tukey boxplots) and NNTP/NNTN curves across thresholds.

use crate::cohort::GroupAssignment;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use serde::Serialize;

/// Five-number summary for one group × outcome cell. All stats are `None`
/// when the cell is empty (`n == 0`).
#[derive(Debug, Clone, Serialize)]
pub struct BoxplotStats<F> {
    pub group: String,
    /// Outcome label the cell conditions on.
    pub label: u8,
    pub n: usize,
    pub q1: Option<F>,
    pub median: Option<F>,
    pub q3: Option<F>,
    pub whisker_low: Option<F>,
    pub whisker_high: Option<F>,
    /// Points beyond the 1.5·IQR fences.
    pub outliers: Vec<F>,
}

/// Linear interpolation of order statistics: position (n−1)·q between the
/// surrounding sorted values. At q = 0.5 and even n this is the midpoint of
/// the two central values.
pub fn quantile<F: Real>(sorted: &[F], q: f64) -> F {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&q));
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 || lo + 1 == sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[lo + 1] - sorted[lo]) * real::<F>(frac)
    }
}

fn cell_stats<F: Real>(group: &str, label: u8, mut values: Vec<F>) -> BoxplotStats<F> {
    let n = values.len();
    if n == 0 {
        return BoxplotStats {
            group: group.to_string(),
            label,
            n: 0,
            q1: None,
            median: None,
            q3: None,
            whisker_low: None,
            whisker_high: None,
            outliers: vec![],
        };
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = quantile(&values, 0.25);
    let median = quantile(&values, 0.5);
    let q3 = quantile(&values, 0.75);
    let iqr = q3 - q1;
    let fence = real::<F>(1.5) * iqr;
    let (lo_fence, hi_fence) = (q1 - fence, q3 + fence);

    // whiskers clip to the extreme data points inside the fences
    let whisker_low = values.iter().cloned().find(|&v| v >= lo_fence).unwrap();
    let whisker_high = values
        .iter()
        .rev()
        .cloned()
        .find(|&v| v <= hi_fence)
        .unwrap();
    let outliers = values
        .iter()
        .cloned()
        .filter(|&v| v < lo_fence || v > hi_fence)
        .collect();

    BoxplotStats {
        group: group.to_string(),
        label,
        n,
        q1: Some(q1),
        median: Some(median),
        q3: Some(q3),
        whisker_low: Some(whisker_low),
        whisker_high: Some(whisker_high),
        outliers,
    }
}

/// Boxplot summaries for every group × outcome cell, in assignment order
/// with label 0 before label 1. Empty cells are emitted with `n = 0`.
pub fn boxplot_stats<F: Real>(
    predictions: &[F],
    labels: &[u8],
    groups: &GroupAssignment,
) -> Result<Vec<BoxplotStats<F>>> {
    if predictions.len() != labels.len() || labels.len() != groups.group_labels.len() {
        return Err(Error::Shape(
            "predictions/labels/groups lengths differ".into(),
        ));
    }
    let mut out = Vec::with_capacity(groups.groups.len() * 2);
    for group in &groups.groups {
        for label in [0u8, 1u8] {
            let values: Vec<F> = predictions
                .iter()
                .zip(labels)
                .zip(&groups.group_labels)
                .filter(|((_, &y), g)| y == label && *g == group)
                .map(|((&p, _), _)| p)
                .collect();
            out.push(cell_stats(group, label, values));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NumberNeededPoint<F> {
    pub threshold: F,
    /// (tp + fp) / tp; `None` when no true positives at this threshold.
    pub nntp: Option<F>,
    /// (tn + fn) / tn; `None` when no true negatives.
    pub nntn: Option<F>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NumberNeededCurve<F> {
    pub group: String,
    pub points: Vec<NumberNeededPoint<F>>,
}

/// Default sweep grid: deciles (10%..90%) of the pooled prediction
/// distribution plus the active threshold, ascending and deduplicated.
pub fn default_threshold_grid<F: Real>(pooled_predictions: &[F], active: F) -> Vec<F> {
    let mut sorted = pooled_predictions.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut grid: Vec<F> = (1..=9)
        .map(|d| quantile(&sorted, d as f64 / 10.0))
        .collect();
    grid.push(active);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    grid
}

/// NNTP/NNTN per group per threshold. Undefined values stay `None` and
/// render as gaps, never as 0 or a sentinel.
pub fn number_needed_curve<F: Real>(
    predictions: &[F],
    labels: &[u8],
    groups: &GroupAssignment,
    threshold_grid: &[F],
) -> Result<Vec<NumberNeededCurve<F>>> {
    if predictions.len() != labels.len() || labels.len() != groups.group_labels.len() {
        return Err(Error::Shape(
            "predictions/labels/groups lengths differ".into(),
        ));
    }
    if threshold_grid.is_empty() {
        return Err(Error::Config("threshold grid is empty".into()));
    }
    if threshold_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("threshold grid must be ascending".into()));
    }

    let mut curves = Vec::with_capacity(groups.groups.len());
    for group in &groups.groups {
        let member: Vec<(F, u8)> = predictions
            .iter()
            .zip(labels)
            .zip(&groups.group_labels)
            .filter(|(_, g)| *g == group)
            .map(|((&p, &y), _)| (p, y))
            .collect();
        let points = threshold_grid
            .iter()
            .map(|&t| {
                let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
                for &(p, y) in &member {
                    match (p >= t, y == 1) {
                        (true, true) => tp += 1,
                        (true, false) => fp += 1,
                        (false, false) => tn += 1,
                        (false, true) => fn_ += 1,
                    }
                }
                let nntp = (tp > 0)
                    .then(|| real::<F>((tp + fp) as f64) / real::<F>(tp as f64));
                let nntn = (tn > 0)
                    .then(|| real::<F>((tn + fn_) as f64) / real::<F>(tn as f64));
                NumberNeededPoint {
                    threshold: t,
                    nntp,
                    nntn,
                }
            })
            .collect();
        curves.push(NumberNeededCurve {
            group: group.clone(),
            points,
        });
    }
    Ok(curves)
}
