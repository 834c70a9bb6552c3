//! Text formats: grid functions and matrix dumps as CSV.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::circle::{grid_angle, GridFunction};
use crate::error::{Error, Result};

pub const GRID_HEADER: &str = "index,theta,re,im";
pub const MATRIX_HEADER: &str = "row,col,re,im";

/// One row per sample, 17 significant digits.
pub fn grid_to_csv(f: &GridFunction) -> String {
    let m = f.len();
    let mut out = String::with_capacity(80 * (m + 1));
    out.push_str(GRID_HEADER);
    out.push('\n');
    for (j, z) in f.samples().iter().enumerate() {
        writeln!(
            out,
            "{j},{:.16e},{:.16e},{:.16e}",
            grid_angle(m, j),
            z.re,
            z.im
        )
        .unwrap();
    }
    out
}

fn field<T: std::str::FromStr>(line: usize, raw: Option<&str>) -> Result<T> {
    raw.map(str::trim)
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| Error::InvalidArgument(format!("line {line}: malformed field")))
}

/// Parses [`grid_to_csv`] output; rows must be in index order and the
/// row count must be a valid grid size. The theta column is not used.
pub fn grid_from_csv(text: &str) -> Result<GridFunction> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == GRID_HEADER => {}
        _ => {
            return Err(Error::InvalidArgument(format!(
                "grid CSV must start with the header `{GRID_HEADER}`"
            )))
        }
    }
    let mut samples = Vec::new();
    for (k, line) in lines {
        let mut cols = line.split(',');
        let index: usize = field(k + 1, cols.next())?;
        let _theta: f64 = field(k + 1, cols.next())?;
        let re: f64 = field(k + 1, cols.next())?;
        let im: f64 = field(k + 1, cols.next())?;
        if cols.next().is_some() {
            return Err(Error::InvalidArgument(format!(
                "line {}: too many fields",
                k + 1
            )));
        }
        if index != samples.len() {
            return Err(Error::InvalidArgument(format!(
                "line {}: expected index {}, found {index}",
                k + 1,
                samples.len()
            )));
        }
        samples.push(Complex64::new(re, im));
    }
    GridFunction::new(samples)
}

/// Nonzero entries as `row,col,re,im`.
pub fn entries_to_csv(entries: &[(usize, usize, Complex64)]) -> String {
    let mut out = String::from(MATRIX_HEADER);
    out.push('\n');
    for (r, c, z) in entries {
        writeln!(out, "{r},{c},{:.16e},{:.16e}", z.re, z.im).unwrap();
    }
    out
}
