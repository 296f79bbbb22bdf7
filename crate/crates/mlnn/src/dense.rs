//! Dense comma-separated datasets: `L` label indicator columns (0 or 1)
//! followed by `D` feature columns. A first line that does not start with
//! a number is taken as a header; `#` lines are comments.

use mlnn_core::data::{Dataset, Instance, LabelSet, SparseVector};

use crate::FormatError;

pub fn read_dense_csv(text: &str, label_count: usize) -> Result<Dataset, FormatError> {
    let mut width = None;
    let mut instances = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if instances.is_empty() && width.is_none() && fields[0].parse::<f64>().is_err() {
            width = Some(fields.len());
            continue;
        }
        match width {
            Some(w) if w != fields.len() => {
                return Err(FormatError::syntax(
                    line,
                    format!("expected {w} columns, found {}", fields.len()),
                ))
            }
            None => width = Some(fields.len()),
            _ => {}
        }
        if fields.len() <= label_count {
            return Err(FormatError::syntax(
                line,
                format!("need more than {label_count} columns"),
            ));
        }
        let mut values = Vec::with_capacity(fields.len() - label_count);
        for f in &fields[label_count..] {
            let v: f64 = f
                .parse()
                .map_err(|_| FormatError::syntax(line, format!("bad number {f:?}")))?;
            values.push(v);
        }
        let mut indicator = Vec::with_capacity(label_count);
        for f in &fields[..label_count] {
            indicator.push(match *f {
                "0" => false,
                "1" => true,
                _ => {
                    return Err(FormatError::syntax(
                        line,
                        format!("bad label indicator {f:?}"),
                    ))
                }
            });
        }
        let features = SparseVector::from_dense(&values)
            .map_err(|e| FormatError::syntax(line, e.to_string()))?;
        instances.push(Instance::new(
            features,
            LabelSet::from_indicator(&indicator),
        ));
    }
    let dim = match (width, instances.first()) {
        (Some(w), Some(_)) => w - label_count,
        _ => return Err(FormatError::Core(mlnn_core::Error::EmptyDataset)),
    };
    Ok(Dataset::new(dim, label_count, instances)?)
}
