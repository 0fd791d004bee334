//! Command-line fairness audit: reads a prediction table, evaluates
//! group-wise performance and fairness, and writes a markdown summary,
//! a full JSON result, and plot-ready JSON/SVG files.

use clap::{Parser, Subcommand, ValueEnum};
use fairaudit_core::cohort::{build_groups, parse_cohort, ColumnSpec, PredictionKind};
use fairaudit_core::fairness::fairness_table;
use fairaudit_core::pipeline::{
    evaluate_prediction_bin, evaluate_prediction_prob, evaluate_prediction_score, summary_table,
};
use fairaudit_core::plot::{emit_plots, render_svg};
use fairaudit_core::{Error, EvaluationResult, FairnessMode};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fairaudit",
    version,
    about = "Group-fairness audit for binary prediction models",
    after_help = "Examples:\n  \
        fairaudit evaluate-prob --input scored.csv --pred-col prob --label-col outcome \\\n      \
        --positive 1 --group-col race --group-col sex --reference White --reference Male \\\n      \
        --out audit/\n  \
        fairaudit evaluate-score --input scores.csv --pred-col score --label-col y \\\n      \
        --positive yes --group-col site --threshold 51.5 --out audit/ --emit json,md"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate probability predictions (threshold from ROC analysis unless given)
    EvaluateProb(EvalArgs),
    /// Evaluate real-valued risk scores (Platt scaling backs the calibration panels)
    EvaluateScore(EvalArgs),
    /// Evaluate hard 0/1 predictions (classification-based panels only)
    EvaluateBin(EvalArgs),
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Input CSV (UTF-8, header row, comma-separated)
    #[arg(long, value_name = "PATH")]
    input: PathBuf,

    /// Column holding the model prediction
    #[arg(long = "pred-col", value_name = "NAME")]
    pred_col: String,

    /// Column holding the observed label
    #[arg(long = "label-col", value_name = "NAME")]
    label_col: String,

    /// Label value treated as the positive class
    #[arg(long, value_name = "VALUE")]
    positive: String,

    /// Sensitive attribute column; repeat for intersectional groups
    /// (order defines the intersection order)
    #[arg(long = "group-col", value_name = "NAME", required = true)]
    group_col: Vec<String>,

    /// Reference level per group column; repeat parallel to --group-col
    #[arg(long, value_name = "VALUE")]
    reference: Vec<String>,

    /// Classification threshold; derived from ROC analysis when omitted
    #[arg(long, value_name = "REAL")]
    threshold: Option<f64>,

    /// Report fairness as differences or ratios vs the reference group
    #[arg(long, value_enum, default_value_t = ModeArg::Diff)]
    mode: ModeArg,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Comma list of outputs to write: json, svg, md
    #[arg(long, value_name = "LIST", default_value = "json,svg,md")]
    emit: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Diff,
    Ratio,
}

impl From<ModeArg> for FairnessMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Diff => FairnessMode::Difference,
            ModeArg::Ratio => FairnessMode::Ratio,
        }
    }
}

struct EmitSet {
    json: bool,
    svg: bool,
    md: bool,
}

fn parse_emit(list: &str) -> Result<EmitSet, Error> {
    let mut set = EmitSet {
        json: false,
        svg: false,
        md: false,
    };
    for token in list.split(',') {
        match token.trim() {
            "json" => set.json = true,
            "svg" => set.svg = true,
            "md" => set.md = true,
            other => {
                return Err(Error::Config(format!(
                    "unknown emit target \"{other}\" (expected json, svg, md)"
                )))
            }
        }
    }
    Ok(set)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Io(_) => EXIT_CONFIG,
        Error::Validation(_)
        | Error::EmptyInput(_)
        | Error::DegenerateLabels(_)
        | Error::RankDeficient(_)
        | Error::Shape(_)
        | Error::EmptyGroup(_)
        | Error::Csv(_) => EXIT_DATA,
    }
}

fn run(command: Command) -> Result<(), Error> {
    let (args, kind) = match &command {
        Command::EvaluateProb(a) => (a, PredictionKind::Probability),
        Command::EvaluateScore(a) => (a, PredictionKind::Score),
        Command::EvaluateBin(a) => (a, PredictionKind::Binary),
    };
    if kind == PredictionKind::Binary && args.threshold.is_some() {
        return Err(Error::Config(
            "--threshold does not apply to evaluate-bin (binary predictions are \
             evaluated at the fixed threshold 1)"
                .into(),
        ));
    }
    if !args.reference.is_empty() && args.reference.len() != args.group_col.len() {
        return Err(Error::Config(format!(
            "{} --reference value(s) for {} --group-col column(s)",
            args.reference.len(),
            args.group_col.len()
        )));
    }
    let emit = parse_emit(&args.emit)?;

    let file = fs::File::open(&args.input)?;
    let spec = ColumnSpec {
        prediction: args.pred_col.clone(),
        label: args.label_col.clone(),
        groups: args.group_col.clone(),
    };
    let parsed = parse_cohort::<f64, _>(file, &spec, &args.positive, kind)?;
    let reference = (!args.reference.is_empty()).then(|| args.reference.clone());
    let groups = build_groups(&parsed.attributes, reference.as_deref())?;

    let mut result = match kind {
        PredictionKind::Probability => {
            evaluate_prediction_prob(&parsed.cohort, &groups, args.threshold)?
        }
        PredictionKind::Score => {
            evaluate_prediction_score(&parsed.cohort, &groups, args.threshold)?
        }
        PredictionKind::Binary => evaluate_prediction_bin(&parsed.cohort, &groups)?,
    };
    // input-stage warnings belong in the final result exactly once
    result.warnings.splice(0..0, parsed.warnings);

    let mode = FairnessMode::from(args.mode);
    if mode != result.fairness.mode && !result.fairness.rows.is_empty() {
        result.fairness =
            fairness_table(&result.group_metrics, &groups.reference, mode)?;
    }

    write_outputs(&args.out, &result, mode, &emit)?;

    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn write_outputs(
    out_dir: &Path,
    result: &EvaluationResult,
    mode: FairnessMode,
    emit: &EmitSet,
) -> Result<(), Error> {
    fs::create_dir_all(out_dir)?;

    if emit.md {
        fs::write(out_dir.join("summary.md"), summary_table(result, mode))?;
    }
    if emit.json {
        let json = serde_json::to_string_pretty(result)
            .expect("evaluation result serializes");
        fs::write(out_dir.join("metrics.json"), json + "\n")?;
    }
    if emit.json || emit.svg {
        let plots_dir = out_dir.join("plots");
        fs::create_dir_all(&plots_dir)?;
        for doc in emit_plots(result) {
            let stem = doc.plot_id.as_str();
            if emit.json {
                let json =
                    serde_json::to_string_pretty(&doc).expect("plot document serializes");
                fs::write(plots_dir.join(format!("{stem}.json")), json + "\n")?;
            }
            if emit.svg {
                fs::write(plots_dir.join(format!("{stem}.svg")), render_svg(&doc))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
