//! Input parsing, validation, and group construction.
//!
//! A [`Cohort`] holds validated predictions and recoded binary labels; a
//! [`GroupAssignment`] maps every record to one (possibly intersectional)
//! sensitive group with a designated reference group. Both are immutable
//! once built and safe to share across threads.

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::Serialize;
use std::collections::HashMap;
use std::io::Read;

/// How the prediction column is to be interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionKind {
    /// Probabilities in `[0, 1]`.
    Probability,
    /// Finite real-valued risk scores on an arbitrary scale.
    Score,
    /// Hard 0/1 predictions.
    Binary,
}

/// Validated prediction records.
#[derive(Debug, Clone, Serialize)]
pub struct Cohort<F> {
    pub predictions: Vec<F>,
    /// Labels recoded to 0/1 with 1 = positive class.
    pub labels: Vec<u8>,
    pub kind: PredictionKind,
}

impl<F: Real> Cohort<F> {
    pub fn new(predictions: Vec<F>, labels: Vec<u8>, kind: PredictionKind) -> Result<Self> {
        if predictions.is_empty() {
            return Err(Error::EmptyInput("cohort has no records".into()));
        }
        if predictions.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} predictions vs {} labels",
                predictions.len(),
                labels.len()
            )));
        }
        for (i, &p) in predictions.iter().enumerate() {
            validate_prediction(p, kind, i + 1)?;
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::Validation("labels must be 0 or 1".into()));
        }
        Ok(Self {
            predictions,
            labels,
            kind,
        })
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    /// True when both label classes occur (required by ROC and recalibration).
    pub fn has_both_classes(&self) -> bool {
        self.labels.contains(&1) && self.labels.contains(&0)
    }
}

fn validate_prediction<F: Real>(p: F, kind: PredictionKind, row: usize) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::Validation(format!(
            "row {row}: prediction is not finite"
        )));
    }
    match kind {
        PredictionKind::Probability => {
            if p < F::zero() || p > F::one() {
                return Err(Error::Validation(format!(
                    "row {row}: probability {p} outside [0, 1]"
                )));
            }
        }
        PredictionKind::Score => {}
        PredictionKind::Binary => {
            if p != F::zero() && p != F::one() {
                return Err(Error::Validation(format!(
                    "row {row}: binary prediction {p} is not 0 or 1"
                )));
            }
        }
    }
    Ok(())
}

/// One raw sensitive-attribute column, aligned with the kept cohort rows.
#[derive(Debug, Clone)]
pub struct AttributeColumn {
    pub name: String,
    pub values: Vec<String>,
}

/// Output of [`parse_cohort`]: the cohort plus the raw attribute columns
/// needed to build groups, and bookkeeping about rejected rows.
#[derive(Debug, Clone)]
pub struct ParsedInput<F> {
    pub cohort: Cohort<F>,
    pub attributes: Vec<AttributeColumn>,
    /// Rows dropped because a required column was missing ("" or "NA").
    pub rejected_rows: usize,
    pub warnings: Vec<String>,
}

/// Named columns to pull out of the input table.
#[derive(Debug, Clone)]
pub struct ColumnSpec {
    pub prediction: String,
    pub label: String,
    pub groups: Vec<String>,
}

fn is_missing(s: &str) -> bool {
    s.is_empty() || s == "NA"
}

/// Parses a CSV stream (UTF-8, header row, RFC-4180 quoting) into a cohort.
///
/// Labels are recoded so `positive_label` maps to 1 and everything else to 0.
/// Rows with a missing value in any named column are rejected and counted;
/// they are never imputed.
pub fn parse_cohort<F: Real, R: Read>(
    source: R,
    spec: &ColumnSpec,
    positive_label: &str,
    kind: PredictionKind,
) -> Result<ParsedInput<F>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);

    let headers = reader.headers()?.clone();
    let col_index = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("column \"{name}\" not found in header")))
    };
    let pred_idx = col_index(&spec.prediction)?;
    let label_idx = col_index(&spec.label)?;
    let group_idx: Vec<usize> = spec
        .groups
        .iter()
        .map(|g| col_index(g))
        .collect::<Result<_>>()?;

    let mut predictions: Vec<F> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    let mut attributes: Vec<AttributeColumn> = spec
        .groups
        .iter()
        .map(|g| AttributeColumn {
            name: g.clone(),
            values: Vec::new(),
        })
        .collect();
    let mut rejected = 0usize;

    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        let data_row = row_no + 1; // 1-based, excluding the header
        let fields: Vec<&str> = std::iter::once(record.get(pred_idx))
            .chain(std::iter::once(record.get(label_idx)))
            .chain(group_idx.iter().map(|&i| record.get(i)))
            .map(|f| f.unwrap_or(""))
            .collect();
        if fields.iter().any(|f| is_missing(f)) {
            rejected += 1;
            continue;
        }

        let raw_pred = fields[0];
        let value = raw_pred.parse::<f64>().map_err(|_| {
            Error::Validation(format!(
                "row {data_row}: prediction \"{raw_pred}\" is not numeric"
            ))
        })?;
        let value = F::from_f64(value).ok_or_else(|| {
            Error::Validation(format!("row {data_row}: prediction out of scalar range"))
        })?;
        validate_prediction(value, kind, data_row)?;

        predictions.push(value);
        labels.push(u8::from(fields[1] == positive_label));
        for (col, &field) in attributes.iter_mut().zip(&fields[2..]) {
            col.values.push(field.to_string());
        }
    }

    if predictions.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no usable rows ({rejected} rejected for missing values)"
        )));
    }

    let mut warnings = Vec::new();
    if rejected > 0 {
        warnings.push(format!(
            "{rejected} row(s) rejected for missing values in required columns"
        ));
    }

    Ok(ParsedInput {
        cohort: Cohort::new(predictions, labels, kind)?,
        attributes,
        rejected_rows: rejected,
        warnings,
    })
}

/// Record-to-group mapping with a designated reference group.
#[derive(Debug, Clone, Serialize)]
pub struct GroupAssignment {
    /// Group name per record, aligned with the cohort.
    pub group_labels: Vec<String>,
    /// Unique group names: reference first, then descending size
    /// (ties broken by name).
    pub groups: Vec<String>,
    pub reference: String,
    pub warnings: Vec<String>,
}

impl GroupAssignment {
    /// Membership mask for one group.
    pub fn mask(&self, group: &str) -> Vec<bool> {
        self.group_labels.iter().map(|g| g == group).collect()
    }

    pub fn group_size(&self, group: &str) -> usize {
        self.group_labels.iter().filter(|g| *g == group).count()
    }
}

/// Token joining per-attribute values into an intersectional group name.
pub const GROUP_JOIN: &str = " & ";

/// Builds (possibly intersectional) groups from one or more attribute columns.
///
/// Intersectional names join the per-attribute values with `" & "` in the
/// user-supplied attribute order. The reference group is the join of
/// `reference_spec` when a value is given for every attribute, otherwise the
/// largest group (ties to the lexicographically smallest name).
pub fn build_groups(
    attributes: &[AttributeColumn],
    reference_spec: Option<&[String]>,
) -> Result<GroupAssignment> {
    if attributes.is_empty() {
        return Err(Error::Config("at least one group column is required".into()));
    }
    let n = attributes[0].values.len();
    if n == 0 {
        return Err(Error::EmptyInput("attribute columns have no rows".into()));
    }
    if attributes.iter().any(|a| a.values.len() != n) {
        return Err(Error::Shape("attribute columns differ in length".into()));
    }

    if let Some(refs) = reference_spec {
        if refs.len() != attributes.len() {
            return Err(Error::Config(format!(
                "{} reference value(s) supplied for {} group column(s)",
                refs.len(),
                attributes.len()
            )));
        }
        for (col, r) in attributes.iter().zip(refs) {
            if !col.values.iter().any(|v| v == r) {
                return Err(Error::Config(format!(
                    "reference value \"{r}\" not present in column \"{}\"",
                    col.name
                )));
            }
        }
    }

    let group_labels: Vec<String> = (0..n)
        .map(|i| {
            attributes
                .iter()
                .map(|col| col.values[i].as_str())
                .collect::<Vec<_>>()
                .join(GROUP_JOIN)
        })
        .collect();

    let mut sizes: HashMap<&str, usize> = HashMap::new();
    for g in &group_labels {
        *sizes.entry(g.as_str()).or_insert(0) += 1;
    }

    let reference = match reference_spec {
        Some(refs) => {
            let name = refs.join(GROUP_JOIN);
            if !sizes.contains_key(name.as_str()) {
                return Err(Error::Config(format!(
                    "reference group \"{name}\" has no records"
                )));
            }
            name
        }
        None => {
            // Largest group; ties go to the lexicographically smallest name.
            let mut ordered: Vec<(&str, usize)> =
                sizes.iter().map(|(&g, &c)| (g, c)).collect();
            ordered.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            ordered[0].0.to_string()
        }
    };

    let mut groups: Vec<String> = sizes.keys().map(|g| g.to_string()).collect();
    groups.sort_by(|a, b| {
        let ref_a = *a == reference;
        let ref_b = *b == reference;
        ref_b
            .cmp(&ref_a)
            .then(sizes[b.as_str()].cmp(&sizes[a.as_str()]))
            .then(a.cmp(b))
    });

    let mut warnings = Vec::new();
    if groups.len() > 7 {
        warnings.push(format!(
            "{} groups found; comparisons are tuned for up to 7 groups",
            groups.len()
        ));
    }

    Ok(GroupAssignment {
        group_labels,
        groups,
        reference,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(name: &str, values: &[&str]) -> AttributeColumn {
        AttributeColumn {
            name: name.into(),
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }

    #[test]
    fn parse_basic_csv() {
        let data = "pred,label,race\n0.2,yes,A\n0.9,no,B\n";
        let spec = ColumnSpec {
            prediction: "pred".into(),
            label: "label".into(),
            groups: vec!["race".into()],
        };
        let parsed =
            parse_cohort::<f64, _>(data.as_bytes(), &spec, "yes", PredictionKind::Probability)
                .unwrap();
        assert_eq!(parsed.cohort.len(), 2);
        assert_eq!(parsed.cohort.labels, vec![1, 0]);
        assert_eq!(parsed.attributes[0].values, vec!["A", "B"]);
        assert_eq!(parsed.rejected_rows, 0);
    }

    #[test]
    fn parse_single_row_positive_label() {
        let data = "p,y\n0.5,1\n";
        let spec = ColumnSpec {
            prediction: "p".into(),
            label: "y".into(),
            groups: vec![],
        };
        let parsed =
            parse_cohort::<f64, _>(data.as_bytes(), &spec, "1", PredictionKind::Probability)
                .unwrap();
        assert_eq!(parsed.cohort.len(), 1);
        assert_eq!(parsed.cohort.labels, vec![1]);
    }

    #[test]
    fn parse_rejects_out_of_range_probability() {
        let data = "p,y\n0.5,1\n1.2,0\n";
        let spec = ColumnSpec {
            prediction: "p".into(),
            label: "y".into(),
            groups: vec![],
        };
        let err = parse_cohort::<f64, _>(data.as_bytes(), &spec, "1", PredictionKind::Probability)
            .unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains("row 2"), "{msg}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_non_numeric_prediction() {
        let data = "p,y\nabc,1\n";
        let spec = ColumnSpec {
            prediction: "p".into(),
            label: "y".into(),
            groups: vec![],
        };
        assert!(matches!(
            parse_cohort::<f64, _>(data.as_bytes(), &spec, "1", PredictionKind::Probability),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn parse_missing_column_names_it() {
        let data = "p,y\n0.5,1\n";
        let spec = ColumnSpec {
            prediction: "pred".into(),
            label: "y".into(),
            groups: vec![],
        };
        match parse_cohort::<f64, _>(data.as_bytes(), &spec, "1", PredictionKind::Probability) {
            Err(Error::Config(msg)) => assert!(msg.contains("pred")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn parse_drops_missing_rows_and_counts_them() {
        let data = "p,y,g\n0.5,1,A\n,1,A\n0.2,NA,B\n0.7,0,B\n";
        let spec = ColumnSpec {
            prediction: "p".into(),
            label: "y".into(),
            groups: vec!["g".into()],
        };
        let parsed =
            parse_cohort::<f64, _>(data.as_bytes(), &spec, "1", PredictionKind::Probability)
                .unwrap();
        assert_eq!(parsed.cohort.len(), 2);
        assert_eq!(parsed.rejected_rows, 2);
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn parse_empty_input_errors() {
        let data = "p,y\n";
        let spec = ColumnSpec {
            prediction: "p".into(),
            label: "y".into(),
            groups: vec![],
        };
        assert!(matches!(
            parse_cohort::<f64, _>(data.as_bytes(), &spec, "1", PredictionKind::Probability),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn binary_kind_rejects_fractional_values() {
        let err = Cohort::new(vec![0.0, 0.5], vec![0, 1], PredictionKind::Binary).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn build_groups_intersection_and_reference() {
        let race = col("race", &["White", "Black", "Black", "White", "Black"]);
        let sex = col("sex", &["Male", "Female", "Male", "Female", "Male"]);
        let refs = vec!["White".to_string(), "Male".to_string()];
        let ga = build_groups(&[race, sex], Some(&refs)).unwrap();
        assert_eq!(ga.reference, "White & Male");
        assert_eq!(ga.groups[0], "White & Male");
        assert_eq!(ga.group_labels[1], "Black & Female");
        assert_eq!(ga.groups.len(), 4);
    }

    #[test]
    fn build_groups_majority_reference() {
        let g = col("g", &["A", "A", "B"]);
        let ga = build_groups(&[g], None).unwrap();
        assert_eq!(ga.reference, "A");
        assert_eq!(ga.groups, vec!["A", "B"]);
    }

    #[test]
    fn build_groups_majority_tie_lexicographic() {
        let g = col("g", &["B", "A", "A", "B"]);
        let ga = build_groups(&[g], None).unwrap();
        assert_eq!(ga.reference, "A");
    }

    #[test]
    fn build_groups_warns_beyond_seven() {
        let values: Vec<String> = (0..8).map(|i| format!("L{i}")).collect();
        let g = AttributeColumn {
            name: "g".into(),
            values,
        };
        let ga = build_groups(&[g], None).unwrap();
        assert_eq!(ga.groups.len(), 8);
        assert_eq!(ga.warnings.len(), 1);
    }

    #[test]
    fn build_groups_absent_reference_errors() {
        let g = col("g", &["A", "B"]);
        let refs = vec!["C".to_string()];
        assert!(matches!(
            build_groups(&[g], Some(&refs)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn group_sizes_sum_to_n() {
        let race = col("race", &["W", "B", "B", "W", "B", "W", "W"]);
        let sex = col("sex", &["M", "F", "M", "F", "M", "M", "M"]);
        let ga = build_groups(&[race, sex], None).unwrap();
        let total: usize = ga.groups.iter().map(|g| ga.group_size(g)).sum();
        assert_eq!(total, 7);
    }

    #[test]
    fn build_groups_deterministic() {
        let race = col("race", &["W", "B", "B", "W", "B"]);
        let sex = col("sex", &["M", "F", "M", "F", "M"]);
        let a = build_groups(&[race.clone(), sex.clone()], None).unwrap();
        let b = build_groups(&[race, sex], None).unwrap();
        assert_eq!(a.groups, b.groups);
        assert_eq!(a.reference, b.reference);
    }

    #[test]
    fn join_order_follows_attribute_order() {
        let a = col("a", &["x"]);
        let b = col("b", &["y"]);
        let ga = build_groups(&[b.clone(), a.clone()], None).unwrap();
        assert_eq!(ga.groups[0], "y & x");
        let ga = build_groups(&[a, b], None).unwrap();
        assert_eq!(ga.groups[0], "x & y");
    }

    #[test]
    fn has_both_classes_reports_correctly() {
        let c = Cohort::new(vec![0.5, 0.6], vec![1, 0], PredictionKind::Probability).unwrap();
        assert!(c.has_both_classes());
        let c = Cohort::new(vec![0.5], vec![1], PredictionKind::Probability).unwrap();
        assert!(!c.has_both_classes());
    }

    #[test]
    fn intersection_membership_is_exact() {
        let race = col("race", &["White", "Black", "Black", "White", "Black"]);
        let sex = col("sex", &["Male", "Female", "Male", "Female", "Male"]);
        let refs = vec!["White".to_string(), "Male".to_string()];
        let ga = build_groups(&[race, sex], Some(&refs)).unwrap();
        let mut others: Vec<&str> = ga.groups[1..].iter().map(|g| g.as_str()).collect();
        others.sort_unstable();
        assert_eq!(
            others,
            vec!["Black & Female", "Black & Male", "White & Female"]
        );
    }

    mod properties {
        use super::*;
        use proptest::{prop_assert, prop_assert_eq, proptest};

        fn arbitrary_assignment(values: Vec<u8>) -> GroupAssignment {
            let col = AttributeColumn {
                name: "g".into(),
                values: values.iter().map(|v| format!("L{v}")).collect(),
            };
            build_groups(&[col], None).unwrap()
        }

        proptest! {
            #[test]
            fn sizes_sum_to_n(values in proptest::collection::vec(0u8..6, 1..120)) {
                let ga = arbitrary_assignment(values.clone());
                let total: usize = ga.groups.iter().map(|g| ga.group_size(g)).sum();
                prop_assert_eq!(total, values.len());
                // every group is non-empty and every record maps to a known group
                prop_assert!(ga.groups.iter().all(|g| ga.group_size(g) > 0));
                prop_assert!(ga.group_labels.iter().all(|l| ga.groups.contains(l)));
            }

            #[test]
            fn order_is_reference_first_then_size(values in proptest::collection::vec(0u8..6, 2..120)) {
                let ga = arbitrary_assignment(values);
                prop_assert_eq!(&ga.groups[0], &ga.reference);
                // the reference (largest, ties lexicographic) is at least as big
                for g in &ga.groups[1..] {
                    prop_assert!(ga.group_size(&ga.reference) >= ga.group_size(g));
                }
                // descending size after the reference, names break ties
                for w in ga.groups[1..].windows(2) {
                    let (a, b) = (ga.group_size(&w[0]), ga.group_size(&w[1]));
                    prop_assert!(a > b || (a == b && w[0] < w[1]));
                }
            }
        }
    }
}
