//! Evaluation reports as `key = value` text and as a CSV row.
//!
//! The CSV columns are the ten measures in the fixed order of
//! [`CSV_COLUMNS`], then the example counts. Bipartition cells are empty
//! when the model had no threshold predictor.

use std::collections::HashMap;

use mlnn_core::metrics::{BipartitionScores, EvaluationReport};

use crate::{format_f64, FormatError};

pub const CSV_COLUMNS: [&str; 12] = [
    "rankloss",
    "oneError",
    "Coverage",
    "MAP",
    "miP",
    "miR",
    "miF",
    "maP",
    "maR",
    "maF",
    "examples",
    "skipped_examples",
];

fn cells(r: &EvaluationReport) -> Vec<String> {
    let mut out: Vec<String> = [r.rank_loss, r.one_error, r.coverage, r.map]
        .into_iter()
        .map(format_f64)
        .collect();
    match &r.bipartition {
        Some(b) => out.extend(
            [
                b.micro_precision,
                b.micro_recall,
                b.micro_f1,
                b.macro_precision,
                b.macro_recall,
                b.macro_f1,
            ]
            .into_iter()
            .map(format_f64),
        ),
        None => out.extend(std::iter::repeat_n(String::new(), 6)),
    }
    out.push(r.examples.to_string());
    out.push(r.skipped_examples.to_string());
    out
}

fn from_cells(get: impl Fn(&str) -> Option<String>) -> Result<EvaluationReport, FormatError> {
    let field = |k: &str| get(k).ok_or_else(|| FormatError::Invalid(format!("missing {k}")));
    let float = |k: &str| -> Result<f64, FormatError> {
        let v = field(k)?;
        v.parse()
            .map_err(|_| FormatError::Invalid(format!("{k}: bad number {v:?}")))
    };
    let count = |k: &str| -> Result<usize, FormatError> {
        let v = field(k)?;
        v.parse()
            .map_err(|_| FormatError::Invalid(format!("{k}: bad count {v:?}")))
    };
    let bip_cols = &CSV_COLUMNS[4..10];
    let present: Vec<bool> = bip_cols
        .iter()
        .map(|k| get(k).is_some_and(|v| !v.is_empty()))
        .collect();
    let bipartition = if present.iter().all(|p| *p) {
        Some(BipartitionScores {
            micro_precision: float("miP")?,
            micro_recall: float("miR")?,
            micro_f1: float("miF")?,
            macro_precision: float("maP")?,
            macro_recall: float("maR")?,
            macro_f1: float("maF")?,
        })
    } else if present.iter().any(|p| *p) {
        return Err(FormatError::Invalid("partial bipartition section".into()));
    } else {
        None
    };
    Ok(EvaluationReport {
        examples: count("examples")?,
        skipped_examples: count("skipped_examples")?,
        rank_loss: float("rankloss")?,
        one_error: float("oneError")?,
        coverage: float("Coverage")?,
        map: float("MAP")?,
        bipartition,
    })
}

pub fn to_csv(r: &EvaluationReport) -> String {
    format!("{}\n{}\n", CSV_COLUMNS.join(","), cells(r).join(","))
}

pub fn from_csv(text: &str) -> Result<EvaluationReport, FormatError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| FormatError::Invalid("empty report".into()))?
        .split(',')
        .collect();
    let row: Vec<&str> = lines
        .next()
        .ok_or_else(|| FormatError::Invalid("report has no data row".into()))?
        .split(',')
        .collect();
    if header.len() != row.len() {
        return Err(FormatError::syntax(2, "column count differs from header"));
    }
    let map: HashMap<&str, &str> = header.into_iter().zip(row).collect();
    from_cells(|k| map.get(k).map(|v| v.trim().to_string()))
}

/// `key = value` lines; the bipartition keys are replaced by
/// `bipartition = absent` when there is no threshold predictor.
pub fn to_text(r: &EvaluationReport) -> String {
    let mut out = String::new();
    for (k, v) in CSV_COLUMNS[10..].iter().zip(&cells(r)[10..]) {
        out.push_str(&format!("{k} = {v}\n"));
    }
    let values = cells(r);
    let keys = if r.bipartition.is_some() { 10 } else { 4 };
    for (k, v) in CSV_COLUMNS[..keys].iter().zip(&values) {
        out.push_str(&format!("{k} = {v}\n"));
    }
    if r.bipartition.is_none() {
        out.push_str("bipartition = absent\n");
    }
    out
}

pub fn from_text(text: &str) -> Result<EvaluationReport, FormatError> {
    let mut map = HashMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| FormatError::syntax(n + 1, "expected key = value"))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    from_cells(|k| map.get(k).cloned())
}
