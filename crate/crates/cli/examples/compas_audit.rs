//! Demonstration audit on the bundled COMPAS extract.
//!
//! Fits a logistic regression of two-year recidivism on prior offenses,
//! misdemeanor charge, and the two age-band indicators, then audits the
//! fitted probabilities across race-by-sex groups with "White & Male" as
//! the reference. Writes a scored CSV plus the usual audit outputs.
//!
//! Run with:
//!
//! ```text
//! cargo run -p fairaudit --example compas_audit [-- OUT_DIR]
//! ```

use fairaudit_core::cohort::{build_groups, AttributeColumn, Cohort, PredictionKind};
use fairaudit_core::glm::{fit_logistic, predict_prob};
use fairaudit_core::pipeline::{evaluate_prediction_prob, summary_table};
use fairaudit_core::plot::{emit_plots, render_svg};
use fairaudit_core::FairnessMode;
use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};

fn main() -> Result<(), Box<dyn Error>> {
    let out_dir = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("compas_audit_out"), PathBuf::from);
    let data_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/compas.csv");

    // load the covariates
    let mut reader = csv::Reader::from_path(&data_path)?;
    let headers = reader.headers()?.clone();
    let idx = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("column {name} missing"))
    };
    let cols = (
        idx("two_year_recid"),
        idx("priors_count"),
        idx("misdemeanor"),
        idx("age_under_25"),
        idx("age_over_45"),
        idx("race"),
        idx("sex"),
    );
    let mut labels: Vec<u8> = Vec::new();
    let mut design: Vec<Vec<f64>> = Vec::new();
    let mut race: Vec<String> = Vec::new();
    let mut sex: Vec<String> = Vec::new();
    for record in reader.records() {
        let r = record?;
        let num = |i: usize| r.get(i).unwrap().parse::<f64>().unwrap();
        labels.push(num(cols.0) as u8);
        design.push(vec![1.0, num(cols.1), num(cols.2), num(cols.3), num(cols.4)]);
        race.push(r.get(cols.5).unwrap().to_string());
        sex.push(r.get(cols.6).unwrap().to_string());
    }

    // fit the demonstration model and score everyone
    let fit = fit_logistic(&design, &labels)?;
    println!(
        "logistic fit: converged={} iterations={} deviance={:.3}",
        fit.converged, fit.iterations, fit.deviance
    );
    println!("coefficients (intercept, priors, misdemeanor, age<25, age>45):");
    println!("  {:?}", fit.coefficients);
    let probs = predict_prob(&fit, &design)?;

    // audit the fitted probabilities across race x sex
    let attributes = [
        AttributeColumn {
            name: "race".into(),
            values: race.clone(),
        },
        AttributeColumn {
            name: "sex".into(),
            values: sex.clone(),
        },
    ];
    let reference = vec!["White".to_string(), "Male".to_string()];
    let groups = build_groups(&attributes, Some(&reference))?;
    let cohort = Cohort::new(probs.clone(), labels.clone(), PredictionKind::Probability)?;
    let result = evaluate_prediction_prob(&cohort, &groups, None)?;

    println!(
        "\nthreshold {:.6} ({:?})\n",
        result.threshold.value, result.threshold.provenance
    );
    println!("{}", summary_table(&result, FairnessMode::Difference));

    // write the scored table and every output artifact
    fs::create_dir_all(&out_dir)?;
    let mut scored = String::from("prob,outcome,race,sex\n");
    for i in 0..probs.len() {
        scored.push_str(&format!("{},{},{},{}\n", probs[i], labels[i], race[i], sex[i]));
    }
    fs::write(out_dir.join("compas_scored.csv"), scored)?;
    fs::write(
        out_dir.join("summary.md"),
        summary_table(&result, FairnessMode::Difference),
    )?;
    fs::write(
        out_dir.join("metrics.json"),
        serde_json::to_string_pretty(&result)? + "\n",
    )?;
    let plots = out_dir.join("plots");
    fs::create_dir_all(&plots)?;
    for doc in emit_plots(&result) {
        let stem = doc.plot_id.as_str();
        fs::write(
            plots.join(format!("{stem}.json")),
            serde_json::to_string_pretty(&doc)? + "\n",
        )?;
        fs::write(plots.join(format!("{stem}.svg")), render_svg(&doc))?;
    }
    println!("outputs written to {}", out_dir.display());
    Ok(())
}
