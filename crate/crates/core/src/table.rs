//! Plain CSV tables with a fixed numeric format.
//!
//! Every float is written with 17 significant digits in scientific notation
//! (Rust's formatter rounds to nearest, ties to even), `.` as the decimal
//! separator and LF line endings, so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use nalgebra::DMatrix;

/// Format one number the way every CSV file in this crate does.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // Normalise -0 so that sign-of-zero noise never changes a file.
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// A CSV table built in memory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push_str(&fmt_num(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

/// Write a matrix as headerless row-major CSV.
pub fn write_matrix_csv<W: Write>(matrix: &DMatrix<f64>, mut out: W) -> io::Result<()> {
    let mut line = String::new();
    for i in 0..matrix.nrows() {
        line.clear();
        for j in 0..matrix.ncols() {
            if j > 0 {
                line.push(',');
            }
            let _ = write!(line, "{}", fmt_num(matrix[(i, j)]));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits_roundtrip() {
        for x in [1.0 / 3.0, std::f64::consts::PI, -2.5e-300, 6.02214076e23] {
            let s = fmt_num(x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(-0.0), fmt_num(0.0));
    }

    #[test]
    fn matrix_csv_layout() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let mut buf = Vec::new();
        write_matrix_csv(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("3.0000000000000000e0,"));
    }
}
