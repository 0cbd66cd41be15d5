//! Dataset CSV files: a header of variable names, one time step per row and
//! an optional 0/1 `mask` column (1 = usable). Cells of masked rows may be
//! empty.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use causal_pathways_core::TimeSeriesDataset;

use crate::error::{AppError, Context, Result};

pub const MASK_COLUMN: &str = "mask";

pub fn load_csv(path: &Path) -> Result<TimeSeriesDataset> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    read_csv(file, &path.display().to_string())
}

/// Parses dataset CSV from any reader; `origin` names the source in errors.
pub fn read_csv<R: Read>(input: R, origin: &str) -> Result<TimeSeriesDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| AppError::parse(origin, 1, e.to_string()))?
        .clone();
    let mask_col = header.iter().position(|h| h == MASK_COLUMN);
    let names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != mask_col)
        .map(|(_, h)| h.to_string())
        .collect();
    if names.is_empty() {
        return Err(AppError::parse(origin, 1, "header names no variables"));
    }
    if let Some(empty) = names.iter().position(String::is_empty) {
        return Err(AppError::parse(origin, 1, format!("column {} has an empty name", empty + 1)));
    }
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(AppError::parse(origin, 1, format!("duplicate variable name `{name}`")));
        }
    }
    let mut values = Vec::new();
    let mut mask = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            let message = match e.kind() {
                csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                    format!("ragged row: {len} fields, expected {expected_len}")
                }
                _ => e.to_string(),
            };
            AppError::parse(origin, line, message)
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let usable = match mask_col {
            None => true,
            Some(c) => match &record[c] {
                "1" | "true" => true,
                "0" | "false" => false,
                other => {
                    return Err(AppError::parse(
                        origin,
                        line,
                        format!("mask value `{other}` is not 0 or 1"),
                    ))
                }
            },
        };
        mask.push(usable);
        for (i, cell) in record.iter().enumerate() {
            if Some(i) == mask_col {
                continue;
            }
            let v = if cell.is_empty() && !usable {
                f64::NAN
            } else {
                cell.parse::<f64>().map_err(|_| {
                    AppError::parse(origin, line, format!("non-numeric value `{cell}` in column `{}`", &header[i]))
                })?
            };
            if usable && !v.is_finite() {
                return Err(AppError::parse(
                    origin,
                    line,
                    format!("non-finite value in column `{}`", &header[i]),
                ));
            }
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(AppError::parse(origin, 2, "no data rows"));
    }
    TimeSeriesDataset::new_masked(names, values, mask_col.map(|_| mask)).context(|| origin.to_string())
}

/// Writes `ds` as CSV; values use the shortest representation that reads
/// back to the same number.
pub fn write_csv<W: Write>(ds: &TimeSeriesDataset, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = ds.names().iter().map(String::as_str).collect();
    if ds.mask().is_some() {
        header.push(MASK_COLUMN);
    }
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for t in 0..ds.n_rows() {
        row.clear();
        let usable = ds.is_usable(t);
        for &v in ds.row(t) {
            row.push(if v.is_finite() || usable { v.to_string() } else { String::new() });
        }
        if ds.mask().is_some() {
            row.push(if usable { "1".into() } else { "0".into() });
        }
        w.write_record(&row)?;
    }
    w.flush()
}
