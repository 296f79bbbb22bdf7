//! Multi-label svmlight text format.
//!
//! ```text
//! #D=6 #L=4
//! # any other line starting with '#' is a comment
//! 0,3 0:0.5 3:1.25
//! 2 5:-1
//! 1:0.75
//! 0:0
//! ```
//!
//! Each data line starts with a comma-separated list of label ids, followed
//! by `index:value` pairs. Label ids and feature indices are both 0-based.
//! A line whose first token contains a colon has no relevant labels. Zero
//! values are accepted and dropped, so `0:0` is an instance with neither
//! labels nor features. Text after a `#` on a data line is ignored. Without
//! a header each dimension is one more than the largest index seen.

use std::fmt::Write as _;

use mlnn_core::data::{Dataset, Instance, LabelSet, SparseVector};

use crate::{format_f64, FormatError};

/// Explicit dimensions; they take precedence over a header.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Shape {
    pub dim: Option<usize>,
    pub label_count: Option<usize>,
}

struct Row {
    line: usize,
    labels: Vec<usize>,
    features: Vec<(usize, f64)>,
}

fn parse_header(body: &str, line: usize, shape: &mut Shape) -> Result<bool, FormatError> {
    let mut seen = false;
    for tok in body.split_whitespace() {
        let tok = tok.trim_start_matches('#');
        let Some((key, value)) = tok.split_once('=') else {
            return Ok(false);
        };
        let slot = match key {
            "D" => &mut shape.dim,
            "L" => &mut shape.label_count,
            _ => return Ok(false),
        };
        let n = value
            .parse()
            .map_err(|_| FormatError::syntax(line, format!("bad header value {value:?}")))?;
        *slot = Some(n);
        seen = true;
    }
    Ok(seen)
}

fn parse_row(text: &str, line: usize) -> Result<Row, FormatError> {
    let mut tokens = text.split_whitespace().peekable();
    let mut labels = Vec::new();
    if let Some(first) = tokens.peek() {
        if !first.contains(':') {
            for part in first.split(',') {
                let id = part
                    .parse()
                    .map_err(|_| FormatError::syntax(line, format!("bad label {part:?}")))?;
                labels.push(id);
            }
            tokens.next();
        }
    }
    let mut features = Vec::new();
    for tok in tokens {
        let (i, v) = tok.split_once(':').ok_or_else(|| {
            FormatError::syntax(line, format!("expected index:value, got {tok:?}"))
        })?;
        let index: usize = i
            .parse()
            .map_err(|_| FormatError::syntax(line, format!("bad feature index {i:?}")))?;
        let value: f64 = v
            .parse()
            .map_err(|_| FormatError::syntax(line, format!("bad feature value {v:?}")))?;
        if !value.is_finite() {
            return Err(FormatError::syntax(line, "non-finite feature value"));
        }
        features.push((index, value));
    }
    Ok(Row {
        line,
        labels,
        features,
    })
}

pub fn read_svmlight(text: &str, shape: Shape) -> Result<Dataset, FormatError> {
    let mut header = Shape::default();
    let mut rows = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(body) = trimmed.strip_prefix('#') {
            if rows.is_empty() {
                parse_header(body, line, &mut header)?;
            }
            continue;
        }
        let data = trimmed.split('#').next().unwrap_or("");
        rows.push(parse_row(data, line)?);
    }
    if rows.is_empty() {
        return Err(FormatError::Core(mlnn_core::Error::EmptyDataset));
    }
    let dim = shape.dim.or(header.dim).unwrap_or_else(|| {
        rows.iter()
            .flat_map(|r| r.features.iter().map(|f| f.0 + 1))
            .max()
            .unwrap_or(0)
    });
    let label_count = shape.label_count.or(header.label_count).unwrap_or_else(|| {
        rows.iter()
            .flat_map(|r| r.labels.iter().map(|l| l + 1))
            .max()
            .unwrap_or(0)
    });
    let mut instances = Vec::with_capacity(rows.len());
    for row in rows {
        let at = |e: mlnn_core::Error| FormatError::syntax(row.line, e.to_string());
        let features = SparseVector::from_unsorted(dim, row.features).map_err(at)?;
        let labels = LabelSet::new(label_count, row.labels).map_err(at)?;
        instances.push(Instance::new(features, labels));
    }
    Ok(Dataset::new(dim, label_count, instances)?)
}

/// Writes a header and one line per instance. Reading the result back gives
/// an identical dataset, and writing that again gives identical text.
pub fn write_svmlight(data: &Dataset) -> String {
    let mut out = format!("#D={} #L={}\n", data.dim(), data.label_count());
    for inst in data {
        let labels: Vec<String> = inst
            .labels
            .relevant()
            .iter()
            .map(|l| l.to_string())
            .collect();
        let mut line = labels.join(",");
        for (i, v) in inst.features.iter() {
            if !line.is_empty() {
                line.push(' ');
            }
            let _ = write!(line, "{i}:{}", format_f64(v));
        }
        if line.is_empty() {
            line.push_str("0:0");
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}
