//! CSV ingestion: regression tables with a named response column and
//! plain point sets for the location evaluators.

use nalgebra::{DMatrix, DVector};
use std::io::Read;
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

fn parse_field(raw: &str, row: usize, col: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| Error::Csv(format!("row {row}, column '{col}': cannot parse '{raw}' as a number")))
}

/// Read a regression dataset. The header is required; `response` names
/// the y column and every other column becomes a carrier in header
/// order. With `add_intercept` a leading column of ones is prepended.
pub fn read_regression_csv(
    path: impl AsRef<Path>,
    response: &str,
    add_intercept: bool,
) -> Result<Dataset> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Csv(format!("{}: {e}", path.as_ref().display())))?;
    parse_regression(file, response, add_intercept)
}

/// [`read_regression_csv`] over any reader.
pub fn parse_regression(reader: impl Read, response: &str, add_intercept: bool) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let y_idx = headers
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| {
            Error::Csv(format!(
                "response column '{response}' not found; header has {:?}",
                headers
            ))
        })?;
    let carrier_idx: Vec<usize> = (0..headers.len()).filter(|i| *i != y_idx).collect();
    if carrier_idx.is_empty() && !add_intercept {
        return Err(Error::Csv(
            "no carrier columns and no intercept requested".to_string(),
        ));
    }
    let mut ys: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::Csv(format!(
                "row {}: expected {} fields, found {}",
                r + 1,
                headers.len(),
                record.len()
            )));
        }
        ys.push(parse_field(&record[y_idx], r + 1, response)?);
        let mut row = Vec::with_capacity(carrier_idx.len() + usize::from(add_intercept));
        if add_intercept {
            row.push(1.0);
        }
        for &c in &carrier_idx {
            row.push(parse_field(&record[c], r + 1, &headers[c])?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Csv("no data rows".to_string()));
    }
    let p = rows[0].len();
    let x = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
    Dataset::new(x, DVector::from_vec(ys), add_intercept)
}

/// Read a point set: every column is a coordinate, header required.
pub fn read_points_csv(path: impl AsRef<Path>) -> Result<Vec<DVector<f64>>> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Csv(format!("{}: {e}", path.as_ref().display())))?;
    parse_points(file)
}

/// [`read_points_csv`] over any reader.
pub fn parse_points(reader: impl Read) -> Result<Vec<DVector<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut points = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::Csv(format!(
                "row {}: expected {} fields, found {}",
                r + 1,
                headers.len(),
                record.len()
            )));
        }
        let coords: Result<Vec<f64>> = record
            .iter()
            .zip(&headers)
            .map(|(raw, h)| parse_field(raw, r + 1, h))
            .collect();
        points.push(DVector::from_vec(coords?));
    }
    if points.is_empty() {
        return Err(Error::Csv("no data rows".to_string()));
    }
    Ok(points)
}
