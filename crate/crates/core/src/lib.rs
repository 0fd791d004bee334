//! Group-fairness audit engine.
//!
//! Given model predictions, observed binary labels, and one or more sensitive
//! attributes, this crate computes group-wise performance metrics with 95%
//! confidence intervals, classification-based fairness tables (equal
//! opportunity, equalized odds, BER equality), ROC and calibration analyses,
//! prediction-distribution summaries, and number-needed translations of PPV
//! and NPV. Results serialize to JSON and render to deterministic SVG.
//!
//! The numeric core is generic over the scalar type via [`scalar::Real`];
//! the aliases at the crate root fix `f64`, which is what the CLI and the
//! JSON emitters use.

pub mod calibration;
pub mod cohort;
pub mod distribution;
pub mod error;
pub mod fairness;
pub mod glm;
pub mod metrics;
pub mod pipeline;
pub mod plot;
pub mod roc;
pub mod scalar;

pub use error::Error;
pub use scalar::Real;

/// `f64` instantiations of the generic core types.
pub type Cohort = cohort::Cohort<f64>;
pub type ParsedInput = cohort::ParsedInput<f64>;
pub type LogisticFit = glm::LogisticFit<f64>;
pub type MetricEstimate = metrics::MetricEstimate<f64>;
pub type GroupMetrics = metrics::GroupMetrics<f64>;
pub type FairnessTable = fairness::FairnessTable<f64>;
pub type DisparityBand = fairness::DisparityBand<f64>;
pub type RocCurve = roc::RocCurve<f64>;
pub type RecalModel = calibration::RecalModel<f64>;
pub type CalibrationCurve = calibration::CalibrationCurve<f64>;
pub type CalibrationInTheLarge = calibration::CalibrationInTheLarge<f64>;
pub type BoxplotStats = distribution::BoxplotStats<f64>;
pub type NumberNeededCurve = distribution::NumberNeededCurve<f64>;
pub type EvaluationResult = pipeline::EvaluationResult<f64>;
pub type PlotDocument = plot::PlotDocument<f64>;

pub use cohort::{GroupAssignment, PredictionKind};
pub use fairness::FairnessMode;
pub use metrics::ConfusionCounts;
pub use pipeline::ThresholdProvenance;
