//! Per-node solution tables and matrix series, with CSV and JSON output.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{QdetError, Result};
use crate::linalg::QMatrix;
use crate::quat::Quaternion;
use crate::timescale::{MatrixFunction, QFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionRow {
    pub t: f64,
    pub y: Vec<Quaternion>,
    #[serde(default)]
    pub residual: Option<f64>,
}

/// Values of a scalar or vector solution at grid nodes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionTable {
    pub rows: Vec<SolutionRow>,
}

impl SolutionTable {
    pub fn new(rows: Vec<SolutionRow>) -> Self {
        Self { rows }
    }

    pub fn from_values(times: &[f64], values: Vec<Vec<Quaternion>>) -> Self {
        let rows = times.iter().zip(values).map(|(&t, y)| SolutionRow { t, y, residual: None }).collect();
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.y.len())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn values(&self) -> Vec<QMatrix> {
        self.rows.iter().map(|r| QMatrix::column_vector(&r.y)).collect()
    }

    /// Row at time `t` (exact match up to membership tolerance).
    pub fn at(&self, t: f64) -> Option<&SolutionRow> {
        let eps = crate::tol::get().membership * t.abs().max(1.0);
        self.rows.iter().find(|r| (r.t - t).abs() <= eps)
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.residual).reduce(f64::max)
    }

    pub fn mean_residual(&self) -> Option<f64> {
        let v: Vec<f64> = self.rows.iter().filter_map(|r| r.residual).collect();
        if v.is_empty() {
            None
        } else {
            Some(v.iter().sum::<f64>() / v.len() as f64)
        }
    }

    /// Componentwise right multiplication `y(t) a`.
    pub fn mul_right(&self, a: Quaternion) -> Self {
        self.map(|q| q * a)
    }

    /// Componentwise left multiplication `a y(t)`.
    pub fn mul_left(&self, a: Quaternion) -> Self {
        self.map(|q| a * q)
    }

    fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| SolutionRow { t: r.t, y: r.y.iter().map(|&q| f(q)).collect(), residual: None })
            .collect();
        Self { rows }
    }

    /// Row-wise sum; the tables must share their time column.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() || self.rows.iter().zip(&other.rows).any(|(a, b)| a.t != b.t || a.y.len() != b.y.len()) {
            return Err(QdetError::DimensionMismatch("tables differ in times or dimension".into()));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| SolutionRow { t: a.t, y: a.y.iter().zip(&b.y).map(|(x, y)| *x + *y).collect(), residual: None })
            .collect();
        Ok(Self { rows })
    }

    /// Component `k` as a tabulated function.
    pub fn component(&self, k: usize) -> QFunction {
        QFunction::tabulated(self.rows.iter().map(|r| (r.t, r.y[k])).collect())
    }

    /// The whole table as a tabulated column function.
    pub fn as_function(&self) -> MatrixFunction {
        MatrixFunction::column((0..self.dim()).map(|k| self.component(k)).collect())
    }

    /// CSV with columns `t`, then `y_w,y_x,y_y,y_z` (scalar) or `y1_w,...` (vector), then `residual`.
    pub fn to_csv(&self) -> String {
        let dim = self.dim();
        let mut out = String::from("t");
        for k in 0..dim {
            let stem = if dim == 1 { "y".to_string() } else { format!("y{}", k + 1) };
            for c in ["w", "x", "y", "z"] {
                let _ = write!(out, ",{stem}_{c}");
            }
        }
        out.push_str(",residual\n");
        for r in &self.rows {
            let _ = write!(out, "{}", r.t);
            for q in &r.y {
                let _ = write!(out, ",{},{},{},{}", q.w, q.x, q.y, q.z);
            }
            match r.residual {
                Some(v) => {
                    let _ = writeln!(out, ",{v:e}");
                }
                None => out.push_str(",\n"),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }
}

/// A quaternion matrix at each grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSample {
    pub t: f64,
    pub matrix: QMatrix,
}

/// Newline-delimited JSON, one `{"t": ..., "matrix": ...}` object per node.
pub fn matrices_to_jsonl(times: &[f64], mats: &[QMatrix]) -> String {
    let mut out = String::new();
    for (&t, m) in times.iter().zip(mats) {
        let s = serde_json::to_string(&MatrixSample { t, matrix: m.clone() }).expect("matrix serializes");
        out.push_str(&s);
        out.push('\n');
    }
    out
}

/// Wide CSV: `t` then `m{r}{c}_{w,x,y,z}` for every entry.
pub fn matrices_to_csv(times: &[f64], mats: &[QMatrix]) -> String {
    let mut out = String::from("t");
    if let Some(m) = mats.first() {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                for p in ["w", "x", "y", "z"] {
                    let _ = write!(out, ",m{}{}_{p}", r + 1, c + 1);
                }
            }
        }
    }
    out.push('\n');
    for (&t, m) in times.iter().zip(mats) {
        let _ = write!(out, "{t}");
        for q in m.entries() {
            let _ = write!(out, ",{},{},{},{}", q.w, q.x, q.y, q.z);
        }
        out.push('\n');
    }
    out
}
