//! Plain-text covariance snapshots.
//!
//! ```text
//! # modes A B
//! 3 0 2.8284271247461903 0
//! 0 3 0 -2.8284271247461903
//! ...
//! ```
//!
//! The header names the modes in order; each following line is one row of the
//! covariance matrix in `(x1, p1, x2, p2, ...)` order. Numbers use the shortest
//! decimal form that parses back to the same `f64`. Blank lines and other `#`
//! lines are ignored.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::Error;
use crate::gaussian::{GaussianState, ModeId};
use crate::linalg::Matrix;
use crate::Result;

const HEADER: &str = "# modes";

pub fn to_snapshot(state: &GaussianState) -> String {
    let mut out = String::from(HEADER);
    for l in state.labels() {
        out.push(' ');
        out.push_str(l.as_str());
    }
    out.push('\n');
    let cm = state.covariance();
    for i in 0..cm.rows() {
        for j in 0..cm.cols() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", cm[(i, j)]);
        }
        out.push('\n');
    }
    out
}

pub fn from_snapshot(text: &str) -> Result<GaussianState> {
    let mut labels: Option<Vec<ModeId>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix(HEADER) {
            if labels.is_some() {
                return Err(Error::Dimension(format!("line {}: second mode header", n + 1)));
            }
            labels = Some(rest.split_whitespace().map(|s| ModeId::from(String::from(s))).collect());
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::Dimension(format!("line {}: bad number {t:?}", n + 1))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let labels = labels.ok_or_else(|| Error::Dimension(String::from("missing mode header")))?;
    let dim = 2 * labels.len();
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Dimension(format!("expected {dim} rows of {dim} numbers")));
    }
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    GaussianState::from_covariance(labels, Matrix::from_row_major(dim, dim, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let st = GaussianState::empty()
            .attach_epr("A", "B", 3.0)
            .unwrap()
            .attach_squeezed("L", 0.3)
            .unwrap()
            .apply_beamsplitter("B", "L", 0.37)
            .unwrap();
        let text = to_snapshot(&st);
        assert!(text.starts_with("# modes A B L\n"));
        let back = from_snapshot(&text).unwrap();
        assert_eq!(back.labels(), st.labels());
        assert_eq!(back.covariance().max_abs_diff(st.covariance()), 0.0);
    }

    #[test]
    fn malformed_input() {
        assert!(from_snapshot("1 0\n0 1\n").is_err());
        assert!(from_snapshot("# modes A\n1 0\n").is_err());
        assert!(from_snapshot("# modes A\n1 x\n0 1\n").is_err());
        assert!(from_snapshot("# modes A\n1 0.5\n0 1\n").is_err());
    }
}
