//! Platt scaling, logistic recalibration, calibration curves, and
//! calibration-in-the-large.

use crate::error::{Error, Result};
use crate::glm::{fit_logistic, intercept_design, LogisticFit};
use crate::metrics::{wilson_ci, ConfusionCounts, MetricEstimate};
use crate::scalar::{expit, logit, real, Real};
use serde::Serialize;

/// Probabilities are clamped to `[CLAMP, 1 − CLAMP]` before taking logits so
/// recalibration stays defined at 0 and 1.
pub const CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecalSource {
    /// Fit of labels on raw scores.
    PlattOnScores,
    /// Fit of labels on logits of predicted probabilities.
    RecalOnLogits,
}

/// Intercept/slope pair from a logistic fit; (0, 1) means perfectly
/// calibrated for the `RecalOnLogits` source.
#[derive(Debug, Clone, Serialize)]
pub struct RecalModel<F> {
    pub intercept: F,
    pub slope: F,
    pub source: RecalSource,
    pub fit: LogisticFit<F>,
}

impl<F: Real> RecalModel<F> {
    /// expit(a + b·x) with `x` on this model's input scale.
    pub fn transform(&self, x: F) -> F {
        expit(self.intercept + self.slope * x)
    }

    /// Observed proportion the model implies for a predicted probability.
    pub fn observed_for_probability(&self, p: F) -> F {
        self.transform(logit(clamp_probability(p)))
    }
}

pub fn clamp_probability<F: Real>(p: F) -> F {
    let lo = real::<F>(CLAMP);
    p.max(lo).min(F::one() - lo)
}

/// Fits labels on `(1, score)` and maps every score through the fitted
/// logistic, turning scores into probabilities. Constant scores degrade to
/// an intercept-only fit (slope 0) so the closed-form prevalence comes back.
pub fn platt_scale<F: Real>(scores: &[F], labels: &[u8]) -> Result<(RecalModel<F>, Vec<F>)> {
    if scores.is_empty() || scores.len() != labels.len() {
        return Err(Error::Shape("scores/labels lengths differ".into()));
    }
    let constant = scores.iter().all(|&s| s == scores[0]);
    let fit = if constant {
        let design: Vec<Vec<F>> = scores.iter().map(|_| vec![F::one()]).collect();
        let base = fit_logistic(&design, labels)?;
        LogisticFit {
            coefficients: vec![base.coefficients[0], F::zero()],
            ..base
        }
    } else {
        fit_logistic(&intercept_design(scores), labels)?
    };
    let model = RecalModel {
        intercept: fit.coefficients[0],
        slope: fit.coefficients[1],
        source: RecalSource::PlattOnScores,
        fit,
    };
    let probabilities = scores.iter().map(|&s| model.transform(s)).collect();
    Ok((model, probabilities))
}

/// Logistic recalibration: fit of labels on `(1, logit p)` with clamped
/// probabilities.
pub fn logistic_recalibration<F: Real>(
    probabilities: &[F],
    labels: &[u8],
) -> Result<RecalModel<F>> {
    if probabilities.is_empty() || probabilities.len() != labels.len() {
        return Err(Error::Shape("probabilities/labels lengths differ".into()));
    }
    let logits: Vec<F> = probabilities
        .iter()
        .map(|&p| logit(clamp_probability(p)))
        .collect();
    let fit = fit_logistic(&intercept_design(&logits), labels)?;
    Ok(RecalModel {
        intercept: fit.coefficients[0],
        slope: fit.coefficients[1],
        source: RecalSource::RecalOnLogits,
        fit,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CalibrationPoint<F> {
    pub predicted: F,
    pub observed: F,
}

/// A group's smooth calibration curve over its own prediction range.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationCurve<F> {
    pub group: String,
    pub points: Vec<CalibrationPoint<F>>,
    /// Set when the group's predictions span a single value and the curve
    /// collapses to one point.
    pub degenerate: bool,
}

/// Number of grid points per curve.
const GRID: usize = 100;

/// Evaluates `model` over a 100-point grid spanning the group's observed
/// prediction range. A zero-width range yields a single flagged point.
pub fn calibration_curve<F: Real>(
    model: &RecalModel<F>,
    group: &str,
    predictions: &[F],
) -> Result<CalibrationCurve<F>> {
    if predictions.is_empty() {
        return Err(Error::EmptyGroup(format!("group \"{group}\" has no records")));
    }
    let min = predictions.iter().cloned().fold(F::infinity(), F::min);
    let max = predictions.iter().cloned().fold(F::neg_infinity(), F::max);

    // a range too narrow to honor a strictly increasing grid collapses too
    if min == max || min + (max - min) / real::<F>((GRID - 1) as f64) == min {
        return Ok(CalibrationCurve {
            group: group.to_string(),
            points: vec![CalibrationPoint {
                predicted: min,
                observed: model.observed_for_probability(min),
            }],
            degenerate: true,
        });
    }

    let step = (max - min) / real::<F>((GRID - 1) as f64);
    let points = (0..GRID)
        .map(|i| {
            let predicted = min + step * real::<F>(i as f64);
            CalibrationPoint {
                predicted,
                observed: model.observed_for_probability(predicted),
            }
        })
        .collect();
    Ok(CalibrationCurve {
        group: group.to_string(),
        points,
        degenerate: false,
    })
}

/// Group-level agreement between the observed positive proportion (with
/// Wilson CI) and the proportion classified positive at the active threshold.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationInTheLarge<F> {
    pub group: String,
    pub n: usize,
    pub observed_rate: MetricEstimate<F>,
    pub predicted_positive_rate: F,
}

pub fn calibration_in_the_large<F: Real>(
    group: &str,
    counts: ConfusionCounts,
    labels: &[u8],
) -> Result<CalibrationInTheLarge<F>> {
    let n = counts.n();
    if n == 0 {
        return Err(Error::EmptyGroup(format!("group \"{group}\" has no records")));
    }
    if labels.len() != n {
        return Err(Error::Shape(format!(
            "{} labels for {n} counted records",
            labels.len()
        )));
    }
    let positives = labels.iter().filter(|&&y| y == 1).count();
    Ok(CalibrationInTheLarge {
        group: group.to_string(),
        n,
        observed_rate: wilson_ci(positives, n),
        predicted_positive_rate: real::<F>((counts.tp + counts.fp) as f64)
            / real::<F>(n as f64),
    })
}
