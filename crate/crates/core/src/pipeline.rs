//! Evaluation pipelines tying the engine together, one per prediction kind,
//! plus the markdown summary table.
//!
//! The pipelines degrade rather than abort: a group whose panel cannot be
//! computed (single-class labels, degenerate fits) loses that panel and the
//! result carries a warning, so one pathological group never suppresses the
//! audit of the others.

use crate::calibration::{
    calibration_curve, calibration_in_the_large, logistic_recalibration, platt_scale,
    CalibrationCurve, CalibrationInTheLarge, RecalModel,
};
use crate::cohort::{Cohort, GroupAssignment, PredictionKind};
use crate::distribution::{
    boxplot_stats, default_threshold_grid, number_needed_curve, BoxplotStats, NumberNeededCurve,
};
use crate::error::{Error, Result};
use crate::fairness::{fairness_table, FairnessMode, FairnessTable, ReferenceInfo};
use crate::metrics::{classify, confusion_counts, performance_metrics, GroupMetrics};
use crate::roc::{auc_ci_delong, roc_curve, youden_threshold, RocCurve};
use crate::scalar::Real;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdProvenance {
    UserSpecified,
    RocDerived,
    /// Binary predictions are evaluated at the fixed threshold 1.
    BinaryFixed,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdInfo<F> {
    pub value: F,
    pub provenance: ThresholdProvenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct RocPanel<F> {
    pub pooled: RocCurve<F>,
    /// Per-group curves; groups whose ROC is undefined are absent.
    pub groups: Vec<RocCurve<F>>,
}

/// Per-group recalibration coefficients, kept alongside the curves they
/// generate.
#[derive(Debug, Clone, Serialize)]
pub struct GroupRecal<F> {
    pub group: String,
    pub intercept: F,
    pub slope: F,
    pub converged: bool,
    pub separation: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationPanel<F> {
    pub curves: Vec<CalibrationCurve<F>>,
    pub models: Vec<GroupRecal<F>>,
    pub in_the_large: Vec<CalibrationInTheLarge<F>>,
}

/// Everything one evaluation run produces. All sub-results are computed at
/// the same threshold on the same cohort and group assignment; panels that
/// do not apply to the prediction kind (or could not be computed) are
/// `None`.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationResult<F> {
    pub threshold: ThresholdInfo<F>,
    #[serde(rename = "groups")]
    pub group_metrics: Vec<GroupMetrics<F>>,
    pub fairness: FairnessTable<F>,
    pub roc: Option<RocPanel<F>>,
    pub calibration: Option<CalibrationPanel<F>>,
    pub distribution: Option<Vec<BoxplotStats<F>>>,
    pub number_needed: Option<Vec<NumberNeededCurve<F>>>,
    pub warnings: Vec<String>,
}

fn check_alignment<F: Real>(cohort: &Cohort<F>, groups: &GroupAssignment) -> Result<()> {
    if cohort.len() != groups.group_labels.len() {
        return Err(Error::Shape(format!(
            "{} records vs {} group labels",
            cohort.len(),
            groups.group_labels.len()
        )));
    }
    Ok(())
}

fn group_metrics_at<F: Real>(
    cohort: &Cohort<F>,
    groups: &GroupAssignment,
    calls: &[u8],
) -> Result<Vec<GroupMetrics<F>>> {
    groups
        .groups
        .iter()
        .map(|g| {
            let counts = confusion_counts(calls, &cohort.labels, &groups.mask(g))?;
            Ok(performance_metrics(g, counts))
        })
        .collect()
}

fn fairness_or_empty<F: Real>(
    metrics: &[GroupMetrics<F>],
    groups: &GroupAssignment,
    warnings: &mut Vec<String>,
) -> FairnessTable<F> {
    if metrics.len() >= 2 {
        // reference is always present in metrics, so this cannot fail
        fairness_table(metrics, &groups.reference, FairnessMode::Difference)
            .expect("reference group present")
    } else {
        warnings.push("only one group: fairness table is empty".into());
        FairnessTable {
            mode: FairnessMode::Difference,
            reference: ReferenceInfo {
                group: groups.reference.clone(),
                n: metrics.first().map_or(0, |m| m.n),
            },
            rows: vec![],
        }
    }
}

fn roc_panel<F: Real>(
    cohort: &Cohort<F>,
    groups: &GroupAssignment,
    warnings: &mut Vec<String>,
) -> Option<RocPanel<F>> {
    let pooled = match roc_curve("pooled", &cohort.predictions, &cohort.labels) {
        Ok(mut curve) => {
            match auc_ci_delong(&cohort.predictions, &cohort.labels) {
                Ok(est) => curve.auc = est,
                Err(_) => warnings.push("pooled AUC CI unavailable".into()),
            }
            curve
        }
        Err(e) => {
            warnings.push(format!("ROC panel skipped: {e}"));
            return None;
        }
    };

    let mut group_curves = Vec::new();
    for g in &groups.groups {
        let mask = groups.mask(g);
        let preds: Vec<F> = cohort
            .predictions
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(&p, _)| p)
            .collect();
        let labels: Vec<u8> = cohort
            .labels
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(&y, _)| y)
            .collect();
        match roc_curve(g, &preds, &labels) {
            Ok(mut curve) => {
                if let Ok(est) = auc_ci_delong(&preds, &labels) {
                    curve.auc = est;
                }
                group_curves.push(curve);
            }
            Err(e) => warnings.push(format!("group \"{g}\": ROC skipped ({e})")),
        }
    }
    Some(RocPanel {
        pooled,
        groups: group_curves,
    })
}

fn calibration_panel<F: Real>(
    probabilities: &[F],
    cohort_labels: &[u8],
    groups: &GroupAssignment,
    metrics: &[GroupMetrics<F>],
    warnings: &mut Vec<String>,
) -> CalibrationPanel<F> {
    let mut curves = Vec::new();
    let mut models = Vec::new();
    for g in &groups.groups {
        let mask = groups.mask(g);
        let probs: Vec<F> = probabilities
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(&p, _)| p)
            .collect();
        let labels: Vec<u8> = cohort_labels
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(&y, _)| y)
            .collect();
        let model: RecalModel<F> = match logistic_recalibration(&probs, &labels) {
            Ok(m) => m,
            Err(e) => {
                warnings.push(format!("group \"{g}\": calibration curve skipped ({e})"));
                continue;
            }
        };
        if model.fit.separation_flag {
            warnings.push(format!(
                "group \"{g}\": recalibration shows quasi-separation"
            ));
        }
        match calibration_curve(&model, g, &probs) {
            Ok(curve) => {
                if curve.degenerate {
                    warnings.push(format!(
                        "group \"{g}\": calibration curve collapsed to a point"
                    ));
                }
                curves.push(curve);
            }
            Err(e) => warnings.push(format!("group \"{g}\": calibration curve skipped ({e})")),
        }
        models.push(GroupRecal {
            group: g.clone(),
            intercept: model.intercept,
            slope: model.slope,
            converged: model.fit.converged,
            separation: model.fit.separation_flag,
        });
    }

    let in_the_large = metrics
        .iter()
        .map(|m| {
            let mask = groups.mask(&m.group);
            let labels: Vec<u8> = cohort_labels
                .iter()
                .zip(&mask)
                .filter(|(_, &mk)| mk)
                .map(|(&y, _)| y)
                .collect();
            calibration_in_the_large(&m.group, m.counts, &labels)
                .expect("group metrics imply a non-empty group")
        })
        .collect();

    CalibrationPanel {
        curves,
        models,
        in_the_large,
    }
}

/// Full pipeline for probability predictions. Without a user threshold the
/// operating point comes from Youden's J on the pooled ROC curve.
pub fn evaluate_prediction_prob<F: Real>(
    cohort: &Cohort<F>,
    groups: &GroupAssignment,
    threshold: Option<F>,
) -> Result<EvaluationResult<F>> {
    if cohort.kind != PredictionKind::Probability {
        return Err(Error::Config(format!(
            "evaluate_prediction_prob requires probability predictions, got {:?}",
            cohort.kind
        )));
    }
    check_alignment(cohort, groups)?;
    let mut warnings = groups.warnings.clone();

    let threshold = resolve_threshold(cohort, threshold)?;
    let calls = classify(&cohort.predictions, cohort.kind, threshold.value);
    let metrics = group_metrics_at(cohort, groups, &calls)?;
    let fairness = fairness_or_empty(&metrics, groups, &mut warnings);
    let roc = roc_panel(cohort, groups, &mut warnings);
    let calibration = Some(calibration_panel(
        &cohort.predictions,
        &cohort.labels,
        groups,
        &metrics,
        &mut warnings,
    ));
    let distribution = Some(boxplot_stats(&cohort.predictions, &cohort.labels, groups)?);
    let grid = default_threshold_grid(&cohort.predictions, threshold.value);
    let number_needed = Some(number_needed_curve(
        &cohort.predictions,
        &cohort.labels,
        groups,
        &grid,
    )?);

    Ok(EvaluationResult {
        threshold,
        group_metrics: metrics,
        fairness,
        roc,
        calibration,
        distribution,
        number_needed,
        warnings,
    })
}

/// Full pipeline for risk scores. Classification, ROC, and distributions
/// stay on the raw score scale; calibration works on Platt-scaled
/// probabilities.
pub fn evaluate_prediction_score<F: Real>(
    cohort: &Cohort<F>,
    groups: &GroupAssignment,
    threshold: Option<F>,
) -> Result<EvaluationResult<F>> {
    if cohort.kind != PredictionKind::Score {
        return Err(Error::Config(format!(
            "evaluate_prediction_score requires score predictions, got {:?}",
            cohort.kind
        )));
    }
    check_alignment(cohort, groups)?;
    let mut warnings = groups.warnings.clone();

    let threshold = resolve_threshold(cohort, threshold)?;
    let calls = classify(&cohort.predictions, cohort.kind, threshold.value);
    let metrics = group_metrics_at(cohort, groups, &calls)?;
    let fairness = fairness_or_empty(&metrics, groups, &mut warnings);
    let roc = roc_panel(cohort, groups, &mut warnings);

    let calibration = match platt_scale(&cohort.predictions, &cohort.labels) {
        Ok((model, probabilities)) => {
            if model.fit.separation_flag {
                warnings.push("Platt scaling shows quasi-separation".into());
            }
            Some(calibration_panel(
                &probabilities,
                &cohort.labels,
                groups,
                &metrics,
                &mut warnings,
            ))
        }
        Err(e) => {
            warnings.push(format!("calibration panel skipped: {e}"));
            None
        }
    };

    let distribution = Some(boxplot_stats(&cohort.predictions, &cohort.labels, groups)?);
    let grid = default_threshold_grid(&cohort.predictions, threshold.value);
    let number_needed = Some(number_needed_curve(
        &cohort.predictions,
        &cohort.labels,
        groups,
        &grid,
    )?);

    Ok(EvaluationResult {
        threshold,
        group_metrics: metrics,
        fairness,
        roc,
        calibration,
        distribution,
        number_needed,
        warnings,
    })
}

/// Reduced pipeline for hard 0/1 predictions: group metrics, the fairness
/// table, and calibration-in-the-large.
pub fn evaluate_prediction_bin<F: Real>(
    cohort: &Cohort<F>,
    groups: &GroupAssignment,
) -> Result<EvaluationResult<F>> {
    if cohort.kind != PredictionKind::Binary {
        return Err(Error::Config(format!(
            "evaluate_prediction_bin requires binary predictions, got {:?}",
            cohort.kind
        )));
    }
    check_alignment(cohort, groups)?;
    let mut warnings = groups.warnings.clone();

    let threshold = ThresholdInfo {
        value: F::one(),
        provenance: ThresholdProvenance::BinaryFixed,
    };
    let calls = classify(&cohort.predictions, cohort.kind, threshold.value);
    let metrics = group_metrics_at(cohort, groups, &calls)?;
    let fairness = fairness_or_empty(&metrics, groups, &mut warnings);

    let in_the_large = metrics
        .iter()
        .map(|m| {
            let mask = groups.mask(&m.group);
            let labels: Vec<u8> = cohort
                .labels
                .iter()
                .zip(&mask)
                .filter(|(_, &mk)| mk)
                .map(|(&y, _)| y)
                .collect();
            calibration_in_the_large(&m.group, m.counts, &labels)
                .expect("group metrics imply a non-empty group")
        })
        .collect();

    Ok(EvaluationResult {
        threshold,
        group_metrics: metrics,
        fairness,
        roc: None,
        calibration: Some(CalibrationPanel {
            curves: vec![],
            models: vec![],
            in_the_large,
        }),
        distribution: None,
        number_needed: None,
        warnings,
    })
}

fn resolve_threshold<F: Real>(
    cohort: &Cohort<F>,
    user: Option<F>,
) -> Result<ThresholdInfo<F>> {
    match user {
        Some(value) => Ok(ThresholdInfo {
            value,
            provenance: ThresholdProvenance::UserSpecified,
        }),
        None => {
            let pooled = roc_curve("pooled", &cohort.predictions, &cohort.labels)?;
            Ok(ThresholdInfo {
                value: youden_threshold(&pooled),
                provenance: ThresholdProvenance::RocDerived,
            })
        }
    }
}

fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn format_cell<F: Real>(v: Option<F>) -> String {
    match v {
        Some(v) => format!("{:.3}", v.to_f64().unwrap()),
        None => "NA".to_string(),
    }
}

/// Renders the fairness evaluation table as markdown, recomputing the deltas
/// when `mode` differs from the mode stored in the result. Values round to
/// three decimals at this presentation step only.
pub fn summary_table<F: Real>(result: &EvaluationResult<F>, mode: FairnessMode) -> String {
    let table = if result.fairness.mode == mode || result.fairness.rows.is_empty() {
        result.fairness.clone()
    } else {
        fairness_table(&result.group_metrics, &result.fairness.reference.group, mode)
            .expect("result carries the reference group")
    };

    let metric_word = match mode {
        FairnessMode::Difference => "difference",
        FairnessMode::Ratio => "ratio",
    };
    let mut out = String::new();
    out.push_str(&format!(
        "| Group | Sample size | TPR {metric_word} | FPR {metric_word} | BER {metric_word} |\n"
    ));
    out.push_str("|---|---|---|---|---|\n");
    out.push_str(&format!(
        "| {} | {} | Reference | Reference | Reference |\n",
        table.reference.group,
        thousands(table.reference.n)
    ));
    for row in &table.rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            row.group,
            thousands(row.n),
            format_cell(row.tpr_delta),
            format_cell(row.fpr_delta),
            format_cell(row.ber_delta),
        ));
    }

    out.push_str("\nFairness metric definitions:\n");
    out.push_str("- Equal opportunity: equal true positive rate (TPR) across groups.\n");
    out.push_str(
        "- Equalized odds: equal TPR and equal false positive rate (FPR) across groups.\n",
    );
    out.push_str(
        "- Balanced error rate (BER) equality: equal BER across groups, \
         where BER = (FPR + FNR) / 2 and FNR = 1 - TPR.\n",
    );
    match mode {
        FairnessMode::Difference => {
            out.push_str("Values are metric differences from the reference group.\n");
        }
        FairnessMode::Ratio => {
            out.push_str("Values are metric ratios against the reference group.\n");
        }
    }
    out
}
