//! CSV and JSON renderings of coefficient tables, grid functions and
//! trajectories.

use std::io::{Read, Write};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::coeffs::{CoeffTable, PoleSeries};
use crate::ode::Trajectory;
use crate::prec::BigRational;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("row {row}: cannot parse rational {text:?}")]
    BadRational { row: usize, text: String },
    #[error("row {row}: expected index {expected}, found {found}")]
    BadIndex { row: usize, expected: usize, found: usize },
}

#[derive(Serialize)]
struct CoeffRow<'a> {
    index: usize,
    numerator: &'a str,
    denominator: &'a str,
}

/// Writes `index,numerator,denominator` rows with a header.
pub fn write_table_csv<W: Write>(table: &CoeffTable, out: W) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    for (index, c) in table.coeffs.iter().enumerate() {
        let (num, den) = (c.numer().to_string(), c.denom().to_string());
        w.serialize(CoeffRow {
            index,
            numerator: &num,
            denominator: &den,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back the output of [`write_table_csv`].
pub fn read_table_csv<R: Read>(input: R) -> Result<Vec<BigRational>, ExportError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let index: usize = rec[0].parse().map_err(|_| ExportError::BadRational {
            row,
            text: rec[0].to_string(),
        })?;
        if index != row {
            return Err(ExportError::BadIndex {
                row,
                expected: row,
                found: index,
            });
        }
        let text = format!("{}/{}", &rec[1], &rec[2]);
        let q = BigRational::parse(&text)
            .map(BigRational::from)
            .map_err(|_| ExportError::BadRational { row, text })?;
        out.push(q);
    }
    Ok(out)
}

pub fn table_to_json(table: &CoeffTable) -> Value {
    let coeffs: Vec<Value> = table
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            json!({
                "index": i,
                "numerator": c.numer().to_string(),
                "denominator": c.denom().to_string(),
            })
        })
        .collect();
    json!({
        "n_power": table.n_power,
        "sector": table.sector.short_name(),
        "coeffs": coeffs,
    })
}

/// Pole expansion rows `(power, coefficient polynomial)`.
pub fn write_pole_csv<W: Write>(series: &PoleSeries, out: W) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["power", "coefficient"])?;
    for j in series.first_index()..=series.last_index() {
        let c = series.laurent(j).expect("index in range");
        w.write_record([j.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn pole_to_json(series: &PoleSeries) -> Value {
    let coeffs: Vec<Value> = (series.first_index()..=series.last_index())
        .map(|j| json!({"power": j, "coefficient": series.laurent(j).expect("in range").to_string()}))
        .collect();
    json!({
        "n_power": series.n_power,
        "resonance": series.resonance,
        "compatibility": series.compatibility.to_string(),
        "coeffs": coeffs,
    })
}

/// Two-column `x,y` CSV with the given header names.
pub fn write_xy_csv<W: Write>(
    header: [&str; 2],
    xs: &[f64],
    ys: &[f64],
    sig: usize,
    out: W,
) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for (x, y) in xs.iter().zip(ys) {
        w.write_record([format_sig(*x, sig), format_sig(*y, sig)])?;
    }
    w.flush()?;
    Ok(())
}

/// `x,y,yp` rows of a trajectory.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, sig: usize, out: W) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "yp"])?;
    for s in &traj.samples {
        w.write_record([
            format_sig(s.x.to_f64(), sig),
            format_sig(s.y.to_f64(), sig),
            format_sig(s.yp.to_f64(), sig),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Scientific notation with `sig` significant digits.
pub fn format_sig(v: f64, sig: usize) -> String {
    format!("{:.*e}", sig.saturating_sub(1), v)
}
