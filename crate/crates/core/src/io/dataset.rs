use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::data::Dataset;
use crate::error::{Error, Result};

use super::fmt_f64;

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line().saturating_sub(1) as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            row,
            column: len as usize,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        other => Error::Parse {
            row,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Rows of numeric cells; `row` in errors counts data rows from 1 (the
/// header is row 0), `column` counts from 1.
fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = reader(path)?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(Error::Parse {
            row: 0,
            column: 1,
            message: "missing header row".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = i + 1;
        if record.len() != header.len() {
            return Err(Error::Parse {
                row,
                column: record.len().min(header.len()) + 1,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(j, cell)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(_) => Err(Error::Parse {
                    row,
                    column: j + 1,
                    message: format!("non-finite value `{cell}`"),
                }),
                Err(_) => Err(Error::Parse {
                    row,
                    column: j + 1,
                    message: format!("not a number: `{cell}`"),
                }),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    Ok((header, rows))
}

/// Load a dataset whose last column is named `y`.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let (header, rows) = read_table(path)?;
    if header.len() < 2 || header.last().map(String::as_str) != Some("y") {
        return Err(Error::MissingResponseColumn);
    }
    let d = header.len() - 1;
    let mut points = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for mut row in rows {
        ys.push(row.pop().expect("row has d + 1 fields"));
        points.push(row);
    }
    if points.is_empty() {
        return Err(Error::InsufficientData {
            requested: 1,
            available: 0,
        });
    }
    Dataset::new(points, ys)?.with_names(header[..d].to_vec())
}

/// Load input points only; a trailing `y` column is ignored if present.
pub fn load_points(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let (header, mut rows) = read_table(path.as_ref())?;
    if header.last().map(String::as_str) == Some("y") {
        if header.len() == 1 {
            return Err(Error::invalid("input file has no feature columns"));
        }
        for row in &mut rows {
            row.pop();
        }
    }
    Ok(rows)
}

fn write_all(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn save_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = data.column_names().join(",");
    out.push_str(",y\n");
    for (x, y) in data.points().iter().zip(data.responses()) {
        for v in x {
            out.push_str(&fmt_f64(*v));
            out.push(',');
        }
        out.push_str(&fmt_f64(*y));
        out.push('\n');
    }
    write_all(path.as_ref(), &out)
}

/// One-column CSV with header `prediction`.
pub fn save_predictions(predictions: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("prediction\n");
    for v in predictions {
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    write_all(path.as_ref(), &out)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    write_all(path, text)
}
