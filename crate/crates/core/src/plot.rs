//! Plot-ready documents and deterministic SVG rendering.
//!
//! [`emit_plots`] turns an [`EvaluationResult`] into one JSON-serializable
//! document per available panel; [`render_svg`] draws a document as SVG 1.1
//! text with a fixed seven-color palette and no run-dependent content, so
//! identical inputs produce byte-identical output.

use crate::fairness::{disparity_band, DisparityBand};
use crate::pipeline::EvaluationResult;
use crate::scalar::Real;
use serde::Serialize;

/// Color cycle for up to seven groups; recycled (with a document warning)
/// beyond that.
pub const PALETTE: [&str; 7] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotId {
    GroupMetrics,
    Roc,
    CalibrationCurve,
    CalibrationLarge,
    Distribution,
    NumberNeeded,
}

impl PlotId {
    /// Stable identifier used for output file names.
    pub fn as_str(&self) -> &'static str {
        match self {
            PlotId::GroupMetrics => "group_metrics",
            PlotId::Roc => "roc",
            PlotId::CalibrationCurve => "calibration_curve",
            PlotId::CalibrationLarge => "calibration_large",
            PlotId::Distribution => "distribution",
            PlotId::NumberNeeded => "number_needed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Line,
    Points,
    Box,
}

/// Five-number summary payload for box series.
#[derive(Debug, Clone, Serialize)]
pub struct BoxData<F> {
    pub q1: Option<F>,
    pub median: Option<F>,
    pub q3: Option<F>,
    pub whisker_low: Option<F>,
    pub whisker_high: Option<F>,
    pub outliers: Vec<F>,
    pub n: usize,
}

/// One named data series. Numeric arrays are null-gapped: `None` marks an
/// undefined value and renders as a gap.
#[derive(Debug, Clone, Serialize)]
pub struct Series<F> {
    pub name: String,
    pub kind: SeriesKind,
    /// Palette slot; the renderer takes `PALETTE[color % 7]`.
    pub color: usize,
    pub dashed: bool,
    pub x: Vec<Option<F>>,
    pub y: Vec<Option<F>>,
    pub ci_low: Option<Vec<Option<F>>>,
    pub ci_high: Option<Vec<Option<F>>>,
    #[serde(rename = "box")]
    pub box_data: Option<BoxData<F>>,
    /// Extra legend text, e.g. a formatted AUC.
    pub annotation: Option<String>,
}

impl<F> Series<F> {
    fn new(name: impl Into<String>, kind: SeriesKind, color: usize) -> Self {
        Series {
            name: name.into(),
            kind,
            color,
            dashed: false,
            x: vec![],
            y: vec![],
            ci_low: None,
            ci_high: None,
            box_data: None,
            annotation: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxisMeta {
    pub label: String,
    /// Category names when the axis is categorical.
    pub categories: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Axes {
    pub x: AxisMeta,
    pub y: AxisMeta,
}

/// A single plot's data, axes metadata, and band annotations.
#[derive(Debug, Clone, Serialize)]
pub struct PlotDocument<F> {
    pub plot_id: PlotId,
    pub title: String,
    pub axes: Axes,
    pub series: Vec<Series<F>>,
    /// 0.8–1.25 guidance bands (group-metrics document only).
    pub bands: Vec<DisparityBand<F>>,
    pub warnings: Vec<String>,
}

impl<F: Real> PlotDocument<F> {
    /// Structural schema check: unique series names and every numeric entry
    /// finite or explicitly null.
    pub fn validate(&self) -> Result<(), String> {
        let mut names: Vec<&str> = self.series.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        let before = names.len();
        names.dedup();
        if names.len() != before {
            return Err(format!("{}: duplicate series names", self.plot_id.as_str()));
        }
        let check_arr = |arr: &[Option<F>], what: &str| -> Result<(), String> {
            for v in arr.iter().flatten() {
                if !v.is_finite() {
                    return Err(format!("{}: non-finite {what}", self.plot_id.as_str()));
                }
            }
            Ok(())
        };
        for s in &self.series {
            check_arr(&s.x, "x value")?;
            check_arr(&s.y, "y value")?;
            if let Some(ci) = &s.ci_low {
                check_arr(ci, "ci_low value")?;
            }
            if let Some(ci) = &s.ci_high {
                check_arr(ci, "ci_high value")?;
            }
            if let Some(b) = &s.box_data {
                for v in [b.q1, b.median, b.q3, b.whisker_low, b.whisker_high]
                    .into_iter()
                    .flatten()
                {
                    if !v.is_finite() {
                        return Err(format!("{}: non-finite box stat", self.plot_id.as_str()));
                    }
                }
                if b.outliers.iter().any(|v| !v.is_finite()) {
                    return Err(format!("{}: non-finite outlier", self.plot_id.as_str()));
                }
            }
        }
        for b in &self.bands {
            if !b.low.is_finite() || !b.high.is_finite() {
                return Err(format!("{}: non-finite band", self.plot_id.as_str()));
            }
        }
        Ok(())
    }
}

const METRIC_NAMES: [&str; 5] = ["Accuracy", "TPR", "FPR", "PPV", "NPV"];

fn fmt3(v: f64) -> String {
    format!("{v:.3}")
}

/// Builds one document per panel available in the result.
pub fn emit_plots<F: Real>(result: &EvaluationResult<F>) -> Vec<PlotDocument<F>> {
    let mut docs = Vec::new();
    let groups: Vec<&str> = result
        .group_metrics
        .iter()
        .map(|m| m.group.as_str())
        .collect();
    let palette_warning = (groups.len() > PALETTE.len())
        .then(|| format!("{} groups exceed the 7-color palette; colors recycle", groups.len()));
    let doc_warnings: Vec<String> = palette_warning.into_iter().collect();

    // group_metrics: the main panel, always present
    {
        let reference = result
            .group_metrics
            .iter()
            .find(|m| m.group == result.fairness.reference.group);
        let mut series = Vec::new();
        for (gi, m) in result.group_metrics.iter().enumerate() {
            let mut s = Series::new(m.group.clone(), SeriesKind::Points, gi);
            let estimates = [&m.accuracy, &m.tpr, &m.fpr, &m.ppv, &m.npv];
            let mut ci_low = Vec::new();
            let mut ci_high = Vec::new();
            for (i, est) in estimates.iter().enumerate() {
                s.x.push(F::from_usize(i));
                s.y.push(est.value);
                ci_low.push(est.ci_low);
                ci_high.push(est.ci_high);
            }
            s.ci_low = Some(ci_low);
            s.ci_high = Some(ci_high);
            series.push(s);
        }
        let bands = reference
            .map(|r| {
                let estimates = [
                    ("Accuracy", &r.accuracy),
                    ("TPR", &r.tpr),
                    ("FPR", &r.fpr),
                    ("PPV", &r.ppv),
                    ("NPV", &r.npv),
                ];
                estimates
                    .iter()
                    .filter_map(|(name, est)| disparity_band(name, est))
                    .collect()
            })
            .unwrap_or_default();
        docs.push(PlotDocument {
            plot_id: PlotId::GroupMetrics,
            title: "Performance metrics by group".into(),
            axes: Axes {
                x: AxisMeta {
                    label: "Metric".into(),
                    categories: Some(METRIC_NAMES.iter().map(|s| s.to_string()).collect()),
                },
                y: AxisMeta {
                    label: "Value".into(),
                    categories: None,
                },
            },
            series,
            bands,
            warnings: doc_warnings.clone(),
        });
    }

    if let Some(roc) = &result.roc {
        let mut series = Vec::new();
        let mut curves: Vec<(&str, &crate::roc::RocCurve<F>, usize)> = Vec::new();
        for (gi, g) in groups.iter().enumerate() {
            if let Some(curve) = roc.groups.iter().find(|c| c.group == *g) {
                curves.push((g, curve, gi));
            }
        }
        for (name, curve, color) in curves {
            let mut s = Series::new(name, SeriesKind::Line, color);
            for p in &curve.points {
                s.x.push(Some(p.fpr));
                s.y.push(Some(p.tpr));
            }
            s.annotation = curve.auc.value.map(|v| {
                let base = format!("AUC {}", fmt3(v.to_f64().unwrap()));
                match (curve.auc.ci_low, curve.auc.ci_high) {
                    (Some(lo), Some(hi)) => format!(
                        "{base} ({}-{})",
                        fmt3(lo.to_f64().unwrap()),
                        fmt3(hi.to_f64().unwrap())
                    ),
                    _ => base,
                }
            });
            series.push(s);
        }
        docs.push(PlotDocument {
            plot_id: PlotId::Roc,
            title: "ROC curves by group".into(),
            axes: Axes {
                x: AxisMeta {
                    label: "False positive rate".into(),
                    categories: None,
                },
                y: AxisMeta {
                    label: "True positive rate".into(),
                    categories: None,
                },
            },
            series,
            bands: vec![],
            warnings: doc_warnings.clone(),
        });
    }

    if let Some(cal) = &result.calibration {
        if !cal.curves.is_empty() {
            let mut series = Vec::new();
            for (gi, g) in groups.iter().enumerate() {
                if let Some(curve) = cal.curves.iter().find(|c| c.group == *g) {
                    let mut s = Series::new(*g, SeriesKind::Line, gi);
                    for p in &curve.points {
                        s.x.push(Some(p.predicted));
                        s.y.push(Some(p.observed));
                    }
                    series.push(s);
                }
            }
            docs.push(PlotDocument {
                plot_id: PlotId::CalibrationCurve,
                title: "Calibration curves by group".into(),
                axes: Axes {
                    x: AxisMeta {
                        label: "Predicted probability".into(),
                        categories: None,
                    },
                    y: AxisMeta {
                        label: "Observed proportion".into(),
                        categories: None,
                    },
                },
                series,
                bands: vec![],
                warnings: doc_warnings.clone(),
            });
        }

        if !cal.in_the_large.is_empty() {
            let mut observed = Series::new("Observed", SeriesKind::Points, 0);
            let mut predicted = Series::new("Predicted", SeriesKind::Points, 1);
            let mut ci_low = Vec::new();
            let mut ci_high = Vec::new();
            for (i, row) in cal.in_the_large.iter().enumerate() {
                observed.x.push(F::from_usize(i));
                observed.y.push(row.observed_rate.value);
                ci_low.push(row.observed_rate.ci_low);
                ci_high.push(row.observed_rate.ci_high);
                predicted.x.push(F::from_usize(i));
                predicted.y.push(Some(row.predicted_positive_rate));
            }
            observed.ci_low = Some(ci_low);
            observed.ci_high = Some(ci_high);
            docs.push(PlotDocument {
                plot_id: PlotId::CalibrationLarge,
                title: "Observed vs predicted positive proportion".into(),
                axes: Axes {
                    x: AxisMeta {
                        label: "Group".into(),
                        categories: Some(
                            cal.in_the_large.iter().map(|r| r.group.clone()).collect(),
                        ),
                    },
                    y: AxisMeta {
                        label: "Positive proportion".into(),
                        categories: None,
                    },
                },
                series: vec![observed, predicted],
                bands: vec![],
                warnings: doc_warnings.clone(),
            });
        }
    }

    if let Some(cells) = &result.distribution {
        let mut series = Vec::new();
        for cell in cells {
            let gi = groups.iter().position(|g| *g == cell.group).unwrap_or(0);
            let mut s = Series::new(
                format!("{} / outcome={}", cell.group, cell.label),
                SeriesKind::Box,
                gi,
            );
            s.dashed = cell.label == 0;
            s.box_data = Some(BoxData {
                q1: cell.q1,
                median: cell.median,
                q3: cell.q3,
                whisker_low: cell.whisker_low,
                whisker_high: cell.whisker_high,
                outliers: cell.outliers.clone(),
                n: cell.n,
            });
            series.push(s);
        }
        docs.push(PlotDocument {
            plot_id: PlotId::Distribution,
            title: "Prediction distribution by group and outcome".into(),
            axes: Axes {
                x: AxisMeta {
                    label: "Group".into(),
                    categories: Some(groups.iter().map(|g| g.to_string()).collect()),
                },
                y: AxisMeta {
                    label: "Prediction".into(),
                    categories: None,
                },
            },
            series,
            bands: vec![],
            warnings: doc_warnings.clone(),
        });
    }

    if let Some(curves) = &result.number_needed {
        let mut series = Vec::new();
        for (gi, g) in groups.iter().enumerate() {
            if let Some(curve) = curves.iter().find(|c| c.group == *g) {
                let mut nntp = Series::new(format!("{g} NNTP"), SeriesKind::Line, gi);
                let mut nntn = Series::new(format!("{g} NNTN"), SeriesKind::Line, gi);
                nntn.dashed = true;
                for p in &curve.points {
                    nntp.x.push(Some(p.threshold));
                    nntp.y.push(p.nntp);
                    nntn.x.push(Some(p.threshold));
                    nntn.y.push(p.nntn);
                }
                series.push(nntp);
                series.push(nntn);
            }
        }
        docs.push(PlotDocument {
            plot_id: PlotId::NumberNeeded,
            title: "Number needed per true positive / true negative".into(),
            axes: Axes {
                x: AxisMeta {
                    label: "Prediction threshold".into(),
                    categories: None,
                },
                y: AxisMeta {
                    label: "Number needed".into(),
                    categories: None,
                },
            },
            series,
            bands: vec![],
            warnings: doc_warnings,
        });
    }

    docs
}

// ---------------------------------------------------------------------------
// SVG rendering
// ---------------------------------------------------------------------------

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 180.0; // room for the legend
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn fmt_tick(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    format!("{r}")
}

fn esc(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn color_of(series: &Series<impl Real>) -> &'static str {
    PALETTE[series.color % PALETTE.len()]
}

/// Maps a data rectangle onto a pixel rectangle (y inverted).
struct Frame {
    px0: f64,
    py0: f64, // top
    px1: f64,
    py1: f64, // bottom
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        self.px0 + (v - self.x_min) / (self.x_max - self.x_min) * (self.px1 - self.px0)
    }

    fn y(&self, v: f64) -> f64 {
        self.py1 - (v - self.y_min) / (self.y_max - self.y_min) * (self.py1 - self.py0)
    }
}

fn nice_step(rough: f64) -> f64 {
    let exponent = rough.abs().log10().floor();
    let fraction = rough / 10f64.powf(exponent);
    let nice = if fraction <= 1.0 {
        1.0
    } else if fraction <= 2.0 {
        2.0
    } else if fraction <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * 10f64.powf(exponent)
}

fn nice_ticks(min: f64, max: f64, target: usize) -> Vec<f64> {
    if (max - min).abs() < 1e-12 {
        return vec![min];
    }
    let step = nice_step((max - min) / target as f64);
    let first = (min / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut v = first;
    while v <= max + step * 1e-9 {
        ticks.push(v);
        v += step;
    }
    ticks
}

fn open_svg(title: &str) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" \
         height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    ));
    s.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        px(WIDTH / 2.0),
        esc(title)
    ));
    s
}

fn draw_axes(s: &mut String, frame: &Frame, doc_axes: &Axes, y_ticks: &[f64]) {
    for &t in y_ticks {
        let y = frame.y(t);
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            px(frame.px0), px(y), px(frame.px1), px(y)
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            px(frame.px0 - 6.0),
            px(y + 4.0),
            fmt_tick(t)
        ));
    }
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        px(frame.px0), px(frame.py0), px(frame.px0), px(frame.py1)
    ));
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        px(frame.px0), px(frame.py1), px(frame.px1), px(frame.py1)
    ));
    // axis labels
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        px((frame.px0 + frame.px1) / 2.0),
        px(frame.py1 + 40.0),
        esc(&doc_axes.x.label)
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {})\">{}</text>\n",
        px((frame.py0 + frame.py1) / 2.0),
        px((frame.py0 + frame.py1) / 2.0),
        esc(&doc_axes.y.label)
    ));
}

fn draw_x_ticks(s: &mut String, frame: &Frame, ticks: &[f64]) {
    for &t in ticks {
        let x = frame.x(t);
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
            px(x), px(frame.py1), px(x), px(frame.py1 + 4.0)
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            px(x),
            px(frame.py1 + 18.0),
            fmt_tick(t)
        ));
    }
}

fn draw_categories(s: &mut String, frame: &Frame, categories: &[String]) {
    for (i, c) in categories.iter().enumerate() {
        let x = frame.x(i as f64 + 0.5);
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            px(x),
            px(frame.py1 + 18.0),
            esc(c)
        ));
    }
}

fn draw_legend(s: &mut String, entries: &[(String, &'static str, bool)]) {
    let x = WIDTH - MARGIN_RIGHT + 16.0;
    for (i, (name, color, dashed)) in entries.iter().enumerate() {
        let y = MARGIN_TOP + 16.0 + i as f64 * 18.0;
        if *dashed {
            s.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" \
                 stroke-width=\"2\" stroke-dasharray=\"4 3\"/>\n",
                px(x),
                px(y - 4.0),
                px(x + 12.0),
                px(y - 4.0),
                color
            ));
        } else {
            s.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
                px(x),
                px(y - 9.0),
                color
            ));
        }
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n",
            px(x + 16.0),
            px(y),
            esc(name)
        ));
    }
}

fn polyline_segments<F: Real>(series: &Series<F>, frame: &Frame) -> Vec<String> {
    // split at null gaps
    let mut segments = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    for (x, y) in series.x.iter().zip(&series.y) {
        match (x, y) {
            (Some(x), Some(y)) => {
                current.push((frame.x(x.to_f64().unwrap()), frame.y(y.to_f64().unwrap())));
            }
            _ => {
                if current.len() > 1 {
                    segments.push(current.clone());
                }
                current.clear();
            }
        }
    }
    if current.len() > 1 {
        segments.push(current);
    }
    segments
        .iter()
        .map(|pts| {
            pts.iter()
                .map(|(x, y)| format!("{},{}", px(*x), px(*y)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

fn draw_line_series<F: Real>(s: &mut String, series: &Series<F>, frame: &Frame) {
    let dash = if series.dashed {
        " stroke-dasharray=\"5 4\""
    } else {
        ""
    };
    for points in polyline_segments(series, frame) {
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{}/>\n",
            points,
            color_of(series),
            dash
        ));
    }
}

fn data_bounds<F: Real>(series: &[Series<F>]) -> (f64, f64, f64, f64) {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in series {
        xs.extend(s.x.iter().flatten().map(|v| v.to_f64().unwrap()));
        ys.extend(s.y.iter().flatten().map(|v| v.to_f64().unwrap()));
        for ci in [&s.ci_low, &s.ci_high].into_iter().flatten() {
            ys.extend(ci.iter().flatten().map(|v| v.to_f64().unwrap()));
        }
    }
    let fold = |v: &[f64], init: f64, f: fn(f64, f64) -> f64| v.iter().fold(init, |a, &b| f(a, b));
    (
        fold(&xs, f64::INFINITY, f64::min),
        fold(&xs, f64::NEG_INFINITY, f64::max),
        fold(&ys, f64::INFINITY, f64::min),
        fold(&ys, f64::NEG_INFINITY, f64::max),
    )
}

fn legend_entries<F: Real>(doc: &PlotDocument<F>) -> Vec<(String, &'static str, bool)> {
    doc.series
        .iter()
        .map(|s| {
            let name = match &s.annotation {
                Some(a) => format!("{} — {}", s.name, a),
                None => s.name.clone(),
            };
            (name, color_of(s), s.dashed)
        })
        .collect()
}

/// Renders a document as standalone SVG 1.1 text. Pure function of the
/// document: no timestamps, no randomness.
pub fn render_svg<F: Real>(doc: &PlotDocument<F>) -> String {
    match doc.plot_id {
        PlotId::Roc | PlotId::CalibrationCurve => render_unit_line_plot(doc),
        PlotId::NumberNeeded => render_number_needed(doc),
        PlotId::GroupMetrics => render_categorical_points(doc, true),
        PlotId::CalibrationLarge => render_categorical_points(doc, false),
        PlotId::Distribution => render_boxes(doc),
    }
}

/// ROC and calibration curves: fixed unit square with a gray diagonal.
fn render_unit_line_plot<F: Real>(doc: &PlotDocument<F>) -> String {
    let mut s = open_svg(&doc.title);
    let frame = Frame {
        px0: MARGIN_LEFT,
        py0: MARGIN_TOP,
        px1: WIDTH - MARGIN_RIGHT,
        py1: HEIGHT - MARGIN_BOTTOM,
        x_min: 0.0,
        x_max: 1.0,
        y_min: 0.0,
        y_max: 1.0,
    };
    let ticks = [0.0, 0.25, 0.5, 0.75, 1.0];
    draw_axes(&mut s, &frame, &doc.axes, &ticks);
    draw_x_ticks(&mut s, &frame, &ticks);
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" \
         stroke-width=\"1\" stroke-dasharray=\"4 4\"/>\n",
        px(frame.x(0.0)),
        px(frame.y(0.0)),
        px(frame.x(1.0)),
        px(frame.y(1.0))
    ));
    for series in &doc.series {
        draw_line_series(&mut s, series, &frame);
    }
    draw_legend(&mut s, &legend_entries(doc));
    s.push_str("</svg>\n");
    s
}

/// NNTP (solid) and NNTN (dashed) share one frame spanning the sweep grid.
fn render_number_needed<F: Real>(doc: &PlotDocument<F>) -> String {
    let mut s = open_svg(&doc.title);
    let (x_min, x_max, _, y_max) = data_bounds(&doc.series);
    let (x_min, x_max) = if x_min.is_finite() {
        (x_min, x_max.max(x_min + 1e-9))
    } else {
        (0.0, 1.0)
    };
    let y_max = if y_max.is_finite() { y_max * 1.05 } else { 2.0 };
    let frame = Frame {
        px0: MARGIN_LEFT,
        py0: MARGIN_TOP,
        px1: WIDTH - MARGIN_RIGHT,
        py1: HEIGHT - MARGIN_BOTTOM,
        x_min,
        x_max,
        // number-needed values are never below 1
        y_min: 1.0_f64.min(y_max - 1e-9),
        y_max,
    };
    let y_ticks = nice_ticks(frame.y_min, frame.y_max, 6);
    draw_axes(&mut s, &frame, &doc.axes, &y_ticks);
    draw_x_ticks(&mut s, &frame, &nice_ticks(x_min, x_max, 6));
    for series in &doc.series {
        draw_line_series(&mut s, series, &frame);
    }
    draw_legend(&mut s, &legend_entries(doc));
    s.push_str("</svg>\n");
    s
}

/// Categorical x axis with point markers and CI whiskers; used for the
/// group-metrics panel (with disparity bands) and calibration-in-the-large.
fn render_categorical_points<F: Real>(doc: &PlotDocument<F>, with_bands: bool) -> String {
    let mut s = open_svg(&doc.title);
    let categories = doc.axes.x.categories.clone().unwrap_or_default();
    let slots = categories.len().max(1) as f64;
    let (_, _, y_lo, y_hi) = data_bounds(&doc.series);
    let band_hi = doc
        .bands
        .iter()
        .map(|b| b.high.to_f64().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let y_max = y_hi.max(band_hi).max(1.0) * 1.02;
    let y_min = y_lo.min(0.0);
    let frame = Frame {
        px0: MARGIN_LEFT,
        py0: MARGIN_TOP,
        px1: WIDTH - MARGIN_RIGHT,
        py1: HEIGHT - MARGIN_BOTTOM,
        x_min: 0.0,
        x_max: slots,
        y_min,
        y_max,
    };

    if with_bands {
        // one 0.8–1.25 band rectangle per metric slot, clipped to the frame
        for (i, band) in doc.bands.iter().enumerate() {
            let slot = categories
                .iter()
                .position(|c| c == band.metric)
                .unwrap_or(i) as f64;
            let lo = band.low.to_f64().unwrap().max(frame.y_min);
            let hi = band.high.to_f64().unwrap().min(frame.y_max);
            if hi <= lo {
                continue;
            }
            let x0 = frame.x(slot + 0.12);
            let x1 = frame.x(slot + 0.88);
            s.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#b0b0b0\" \
                 fill-opacity=\"0.25\"/>\n",
                px(x0),
                px(frame.y(hi)),
                px(x1 - x0),
                px(frame.y(lo) - frame.y(hi)),
            ));
        }
    }

    let y_ticks = nice_ticks(frame.y_min, frame.y_max, 6);
    draw_axes(&mut s, &frame, &doc.axes, &y_ticks);
    draw_categories(&mut s, &frame, &categories);

    let n_series = doc.series.len().max(1) as f64;
    for (si, series) in doc.series.iter().enumerate() {
        let offset = (si as f64 + 1.0) / (n_series + 1.0);
        let color = color_of(series);
        for (i, y) in series.y.iter().enumerate() {
            let Some(y) = y else { continue };
            let cx = frame.x(i as f64 + offset);
            let cy = frame.y(y.to_f64().unwrap());
            // CI whisker behind the marker
            if let (Some(lo_arr), Some(hi_arr)) = (&series.ci_low, &series.ci_high) {
                if let (Some(lo), Some(hi)) = (lo_arr[i], hi_arr[i]) {
                    let (ylo, yhi) = (frame.y(lo.to_f64().unwrap()), frame.y(hi.to_f64().unwrap()));
                    s.push_str(&format!(
                        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\" \
                         stroke-width=\"1.5\"/>\n",
                        px(cx), px(ylo), px(yhi), color
                    ));
                    for yy in [ylo, yhi] {
                        s.push_str(&format!(
                            "<line x1=\"{}\" y1=\"{2}\" x2=\"{}\" y2=\"{2}\" stroke=\"{3}\" \
                             stroke-width=\"1.5\"/>\n",
                            px(cx - 4.0), px(cx + 4.0), px(yy), color
                        ));
                    }
                }
            }
            if series.name == "Predicted" {
                // hollow diamond to distinguish from the observed marker
                s.push_str(&format!(
                    "<path d=\"M {} {} l 5 5 l -5 5 l -5 -5 Z\" fill=\"none\" stroke=\"{}\" \
                     stroke-width=\"1.5\"/>\n",
                    px(cx),
                    px(cy - 5.0),
                    color
                ));
            } else {
                s.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{}\"/>\n",
                    px(cx),
                    px(cy),
                    color
                ));
            }
        }
    }
    draw_legend(&mut s, &legend_entries(doc));
    s.push_str("</svg>\n");
    s
}

fn render_boxes<F: Real>(doc: &PlotDocument<F>) -> String {
    let mut s = open_svg(&doc.title);
    let categories = doc.axes.x.categories.clone().unwrap_or_default();
    let slots = categories.len().max(1) as f64;

    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for series in &doc.series {
        if let Some(b) = &series.box_data {
            for v in [b.whisker_low, b.whisker_high].into_iter().flatten() {
                let v = v.to_f64().unwrap();
                y_lo = y_lo.min(v);
                y_hi = y_hi.max(v);
            }
            for v in &b.outliers {
                let v = v.to_f64().unwrap();
                y_lo = y_lo.min(v);
                y_hi = y_hi.max(v);
            }
        }
    }
    if !y_lo.is_finite() {
        y_lo = 0.0;
        y_hi = 1.0;
    }
    let pad = (y_hi - y_lo).max(1e-9) * 0.05;
    let frame = Frame {
        px0: MARGIN_LEFT,
        py0: MARGIN_TOP,
        px1: WIDTH - MARGIN_RIGHT,
        py1: HEIGHT - MARGIN_BOTTOM,
        x_min: 0.0,
        x_max: slots,
        y_min: y_lo - pad,
        y_max: y_hi + pad,
    };
    let y_ticks = nice_ticks(frame.y_min, frame.y_max, 6);
    draw_axes(&mut s, &frame, &doc.axes, &y_ticks);
    draw_categories(&mut s, &frame, &categories);

    for series in &doc.series {
        let Some(b) = &series.box_data else { continue };
        let Some(group) = series.name.split(" / ").next() else {
            continue;
        };
        let slot = categories.iter().position(|c| c == group).unwrap_or(0) as f64;
        // outcome 0 on the left half of the slot, outcome 1 on the right
        let offset = if series.name.ends_with("outcome=0") {
            0.28
        } else {
            0.72
        };
        let cx = frame.x(slot + offset);
        let half_w = (frame.x(0.16) - frame.x(0.0)).abs();
        let color = color_of(series);
        let opacity = if series.name.ends_with("outcome=0") {
            "0.35"
        } else {
            "0.8"
        };
        if let (Some(q1), Some(med), Some(q3), Some(wl), Some(wh)) =
            (b.q1, b.median, b.q3, b.whisker_low, b.whisker_high)
        {
            let (q1, med, q3, wl, wh) = (
                q1.to_f64().unwrap(),
                med.to_f64().unwrap(),
                q3.to_f64().unwrap(),
                wl.to_f64().unwrap(),
                wh.to_f64().unwrap(),
            );
            // whisker stem and caps
            s.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"1\"/>\n",
                px(cx), px(frame.y(wl)), px(frame.y(q1)), color
            ));
            s.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"1\"/>\n",
                px(cx), px(frame.y(q3)), px(frame.y(wh)), color
            ));
            for v in [wl, wh] {
                s.push_str(&format!(
                    "<line x1=\"{}\" y1=\"{2}\" x2=\"{}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"1\"/>\n",
                    px(cx - half_w * 0.5), px(cx + half_w * 0.5), px(frame.y(v)), color
                ));
            }
            // box and median line
            s.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" \
                 fill-opacity=\"{}\" stroke=\"{}\" stroke-width=\"1\"/>\n",
                px(cx - half_w),
                px(frame.y(q3)),
                px(2.0 * half_w),
                px((frame.y(q1) - frame.y(q3)).max(0.5)),
                color,
                opacity,
                color
            ));
            s.push_str(&format!(
                "<line x1=\"{}\" y1=\"{2}\" x2=\"{}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"1.8\"/>\n",
                px(cx - half_w), px(cx + half_w), px(frame.y(med)), color
            ));
        }
        for v in &b.outliers {
            s.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\"/>\n",
                px(cx),
                px(frame.y(v.to_f64().unwrap())),
                color
            ));
        }
    }
    draw_legend(&mut s, &legend_entries(doc));
    s.push_str("</svg>\n");
    s
}
