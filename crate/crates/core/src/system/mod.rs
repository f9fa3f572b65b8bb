//! Linear systems `φ^Δ = A(t) φ + f(t)`: regressivity, Wronskians, Liouville's formula,
//! fundamental and state-transition matrices, and variation of constants.

mod fundamental;
mod solve;

pub use fundamental::{
    columnwise, default_alphas, fundamental_by_eigen, putzer, state_transition,
    FundamentalMatrix, FundamentalSource, PutzerData,
};
pub use solve::{
    cocycle_residual, left_combination_check, solve_system, solve_system_with, superposition_check,
    verify_matrix_solution, verify_solution, wronskian_dichotomy, Method, SolveOptions, SystemSolution,
};

use crate::error::{QdetError, Result};
use crate::linalg::{charpoly, QMatrix, QVector};
use crate::quat::Quaternion;
use crate::scalar::{cylinder, Regressivity};
use crate::timescale::{running_integral, MatrixFunction, TimeScaleGrid};
use crate::tol;

/// The initial value problem `φ^Δ = A φ + f`, `φ(t0) = η`, on a grid starting at `t0`.
#[derive(Debug, Clone)]
pub struct SystemProblem {
    pub grid: TimeScaleGrid,
    pub a: MatrixFunction,
    pub eta: QVector,
    pub forcing: Option<MatrixFunction>,
}

impl SystemProblem {
    pub fn new(grid: TimeScaleGrid, a: MatrixFunction, eta: QVector) -> Result<Self> {
        let p = Self { grid, a, eta, forcing: None };
        p.validate()?;
        Ok(p)
    }

    pub fn constant(grid: TimeScaleGrid, a: &QMatrix, eta: QVector) -> Result<Self> {
        Self::new(grid, MatrixFunction::constant(a), eta)
    }

    pub fn with_forcing(mut self, f: MatrixFunction) -> Result<Self> {
        self.forcing = Some(f);
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.a.rows
    }

    pub fn validate(&self) -> Result<()> {
        self.a.validate()?;
        if self.a.rows != self.a.cols {
            return Err(QdetError::NotSquare { rows: self.a.rows, cols: self.a.cols });
        }
        if self.eta.len() != self.a.rows {
            return Err(QdetError::DimensionMismatch(format!(
                "initial vector has {} entries for a {}x{} system",
                self.eta.len(),
                self.a.rows,
                self.a.rows
            )));
        }
        if let Some(f) = &self.forcing {
            f.validate()?;
            if f.rows != self.a.rows || f.cols != 1 {
                return Err(QdetError::DimensionMismatch(format!(
                    "forcing is {}x{}, expected {}x1",
                    f.rows, f.cols, self.a.rows
                )));
            }
        }
        Ok(())
    }

    /// `A` as a matrix when it does not depend on time.
    pub fn constant_matrix(&self) -> Option<QMatrix> {
        if self.a.is_constant() {
            self.a.eval(self.grid.t0()).ok()
        } else {
            None
        }
    }

    pub(crate) fn a_at(&self, t: f64) -> Result<QMatrix> {
        self.a.eval_interp(t)
    }

    pub(crate) fn f_at(&self, t: f64) -> Result<QMatrix> {
        match &self.forcing {
            Some(f) => f.eval_interp(t),
            None => Ok(QMatrix::zeros(self.dim(), 1)),
        }
    }
}

/// Checks that `I + μ(t) A(t)` is invertible at every node of `𝕋^κ`.
///
/// Invertibility is judged by `pdet / hadamard_bound` against the regressivity tolerance.
pub fn is_regressive_matrix(grid: &TimeScaleGrid, a: &MatrixFunction) -> Result<Regressivity> {
    let tol = tol::get().regressive;
    let mut min_margin = f64::INFINITY;
    let mut offender = None;
    for (i, node) in grid.nodes().iter().enumerate() {
        if !grid.in_kappa(i) || node.mu == 0.0 {
            continue;
        }
        let m = QMatrix::identity(a.rows).add(&a.eval(node.t)?.scale(node.mu))?;
        let ratio = m.pdet_ratio()?;
        min_margin = min_margin.min(ratio);
        if ratio <= tol && offender.is_none() {
            offender = Some(node.t);
        }
    }
    if min_margin == f64::INFINITY {
        min_margin = 1.0;
    }
    Ok(Regressivity { regressive: offender.is_none(), offender, min_margin })
}

/// Wronskian `W = pdet(M)`.
pub fn wronskian(m: &QMatrix) -> Result<f64> {
    m.pdet()
}

/// `u = Σ_{k=1}^{2n} μ^{k−1} V_k(χ_A)` for a given matrix and graininess.
pub fn liouville_u_of(a: &QMatrix, mu: f64) -> Result<f64> {
    let cp = charpoly(a)?;
    let mut acc = 0.0;
    let mut pw = 1.0;
    for k in 1..=cp.degree() {
        acc += pw * cp.v(k);
        pw *= mu;
    }
    Ok(acc)
}

/// Liouville exponent `u(t)` at node `i`.
pub fn liouville_u(grid: &TimeScaleGrid, a: &MatrixFunction, i: usize) -> Result<f64> {
    let n = grid.nodes()[i];
    liouville_u_of(&a.eval(n.t)?, n.mu)
}

/// `E_u(t_i, t_0)` at every node, with `u` the Liouville exponent of `A`.
pub fn liouville_exponential(grid: &TimeScaleGrid, a: &MatrixFunction) -> Result<Vec<f64>> {
    let integrals = running_integral(grid, |t, mu| {
        let u = liouville_u_of(&a.eval_interp(t)?, mu)?;
        cylinder(mu, Quaternion::real(u))
    })?;
    Ok(integrals.into_iter().map(|q| q.exp().re()).collect())
}

/// `|W(t) − E_u(t, t0) W(t0)| / max(1, W(t0))` between nodes `from` and `to`.
pub fn liouville_check(fm: &FundamentalMatrix, a: &MatrixFunction, from: usize, to: usize) -> Result<f64> {
    let grid = fm.grid();
    let eu = liouville_exponential(grid, a)?;
    let ratio = eu[to] / eu[from];
    let (w0, w) = (fm.wronskian(from), fm.wronskian(to));
    Ok((w - ratio * w0).abs() / w0.max(1.0))
}

/// Largest Liouville residual over all nodes, measured from the grid start.
pub fn liouville_max_residual(fm: &FundamentalMatrix, a: &MatrixFunction) -> Result<f64> {
    let eu = liouville_exponential(fm.grid(), a)?;
    let w0 = fm.wronskian(0);
    Ok((0..fm.len()).map(|i| (fm.wronskian(i) - eu[i] * w0).abs() / w0.max(1.0)).fold(0.0, f64::max))
}

/// Liouville residual scaled by `max(1, W(t0), W(t))`, for solutions that grow or decay strongly.
pub fn liouville_relative_residual(fm: &FundamentalMatrix, a: &MatrixFunction) -> Result<f64> {
    let eu = liouville_exponential(fm.grid(), a)?;
    let w0 = fm.wronskian(0);
    Ok((0..fm.len())
        .map(|i| {
            let w = fm.wronskian(i);
            (w - eu[i] * w0).abs() / w0.max(w).max(1.0)
        })
        .fold(0.0, f64::max))
}
