use serde::{Deserialize, Serialize};

use super::TimeScaleGrid;
use crate::error::{QdetError, Result};
use crate::linalg::QMatrix;
use crate::quat::Quaternion;
use crate::tol;

/// A quaternion-valued function of real time.
///
/// JSON: a bare `[w,x,y,z]` is a constant, `{"polynomial": [c0, c1, ...]}`
/// means `Σ c_k t^k`, `{"tabulated": [[t, [w,x,y,z]], ...]}` lists node values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QFunction {
    Constant(Quaternion),
    Polynomial { polynomial: Vec<Quaternion> },
    Tabulated { tabulated: Vec<(f64, Quaternion)> },
}

impl From<Quaternion> for QFunction {
    fn from(q: Quaternion) -> Self {
        QFunction::Constant(q)
    }
}

impl QFunction {
    pub fn constant(q: Quaternion) -> Self {
        QFunction::Constant(q)
    }

    /// `Σ coeffs[k] t^k`.
    pub fn polynomial(coeffs: Vec<Quaternion>) -> Self {
        QFunction::Polynomial { polynomial: coeffs }
    }

    /// Values at the given times; sorted by time.
    pub fn tabulated(mut points: Vec<(f64, Quaternion)>) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        QFunction::Tabulated { tabulated: points }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            QFunction::Constant(_) => true,
            QFunction::Polynomial { polynomial } => polynomial.iter().skip(1).all(|c| *c == Quaternion::ZERO),
            QFunction::Tabulated { .. } => false,
        }
    }

    /// True iff every value has zero `j` and `k` parts.
    pub fn is_complex_valued(&self) -> bool {
        let cx = |q: &Quaternion| q.y == 0.0 && q.z == 0.0;
        match self {
            QFunction::Constant(q) => cx(q),
            QFunction::Polynomial { polynomial } => polynomial.iter().all(cx),
            QFunction::Tabulated { tabulated } => tabulated.iter().all(|(_, q)| cx(q)),
        }
    }

    /// True iff every value is real.
    pub fn is_real_valued(&self) -> bool {
        match self {
            QFunction::Constant(q) => q.is_real(),
            QFunction::Polynomial { polynomial } => polynomial.iter().all(|q| q.is_real()),
            QFunction::Tabulated { tabulated } => tabulated.iter().all(|(_, q)| q.is_real()),
        }
    }

    /// Value at `t`; a tabulated function must list `t` itself.
    pub fn eval(&self, t: f64) -> Result<Quaternion> {
        match self {
            QFunction::Constant(q) => Ok(*q),
            QFunction::Polynomial { polynomial } => {
                Ok(polynomial.iter().rev().fold(Quaternion::ZERO, |acc, &c| acc * t + c))
            }
            QFunction::Tabulated { tabulated } => {
                let eps = tol::get().membership * t.abs().max(1.0);
                let i = tabulated.partition_point(|(s, _)| *s < t - eps);
                match tabulated.get(i) {
                    Some((s, q)) if (s - t).abs() <= eps => Ok(*q),
                    _ => Err(QdetError::NotTabulated { t }),
                }
            }
        }
    }

    /// Like [`QFunction::eval`], but linearly interpolates tabulated values between entries.
    pub fn eval_interp(&self, t: f64) -> Result<Quaternion> {
        match self {
            QFunction::Tabulated { tabulated } => {
                if let Ok(q) = self.eval(t) {
                    return Ok(q);
                }
                let i = tabulated.partition_point(|(s, _)| *s < t);
                if i == 0 || i == tabulated.len() {
                    return Err(QdetError::NotTabulated { t });
                }
                let (t0, q0) = tabulated[i - 1];
                let (t1, q1) = tabulated[i];
                let w = (t - t0) / (t1 - t0);
                Ok(q0 * (1.0 - w) + q1 * w)
            }
            _ => self.eval(t),
        }
    }

    /// Fails unless a tabulated function lists every grid node.
    pub fn check_covers(&self, grid: &TimeScaleGrid) -> Result<()> {
        if let QFunction::Tabulated { tabulated } = self {
            if tabulated.iter().any(|(t, q)| !t.is_finite() || !q.is_finite()) {
                return Err(QdetError::InvalidInput("tabulated values must be finite".into()));
            }
            for n in grid.nodes() {
                self.eval(n.t)?;
            }
        }
        Ok(())
    }
}

/// A matrix of quaternion functions, row-major. Vectors are `n × 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFunction {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<QFunction>,
}

impl From<&QMatrix> for MatrixFunction {
    fn from(m: &QMatrix) -> Self {
        MatrixFunction::constant(m)
    }
}

impl MatrixFunction {
    pub fn new(rows: usize, cols: usize, entries: Vec<QFunction>) -> Result<Self> {
        let m = MatrixFunction { rows, cols, entries };
        m.validate()?;
        Ok(m)
    }

    pub fn constant(m: &QMatrix) -> Self {
        MatrixFunction {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|&q| QFunction::Constant(q)).collect(),
        }
    }

    pub fn column(entries: Vec<QFunction>) -> Self {
        MatrixFunction { rows: entries.len(), cols: 1, entries }
    }

    pub fn scalar(f: QFunction) -> Self {
        MatrixFunction { rows: 1, cols: 1, entries: vec![f] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.len() != self.rows * self.cols {
            return Err(QdetError::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix function",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(QFunction::is_constant)
    }

    pub fn eval(&self, t: f64) -> Result<QMatrix> {
        let v = self.entries.iter().map(|f| f.eval(t)).collect::<Result<Vec<_>>>()?;
        QMatrix::from_vec(self.rows, self.cols, v)
    }

    pub fn eval_interp(&self, t: f64) -> Result<QMatrix> {
        let v = self.entries.iter().map(|f| f.eval_interp(t)).collect::<Result<Vec<_>>>()?;
        QMatrix::from_vec(self.rows, self.cols, v)
    }

    pub fn check_covers(&self, grid: &TimeScaleGrid) -> Result<()> {
        self.entries.iter().try_for_each(|f| f.check_covers(grid))
    }
}
