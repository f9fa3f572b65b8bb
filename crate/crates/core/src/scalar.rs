//! First-order scalar equations `y^Δ = p(t) y + f(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{QdetError, Result};
use crate::linalg::QMatrix;
use crate::ode::march;
use crate::quat::Quaternion;
use crate::table::{SolutionRow, SolutionTable};
use crate::timescale::{delta_integral, derivative_at_nodes, QFunction, TimeScaleGrid};
use crate::tol;

/// Outcome of a regressivity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regressivity {
    pub regressive: bool,
    /// First node where the condition fails.
    pub offender: Option<f64>,
    /// Smallest `|1 + μ p|` (scalar) or `pdet` ratio (matrix) seen.
    pub min_margin: f64,
}

impl Regressivity {
    pub(crate) fn into_result(self) -> Result<()> {
        match self.offender {
            None => Ok(()),
            Some(t) => Err(QdetError::NotRegressive {
                t,
                detail: format!("margin {:e} at or below tolerance", self.min_margin),
            }),
        }
    }
}

/// Checks `|1 + μ(t) p(t)| > tol` at every node of `𝕋^κ`.
pub fn is_regressive_scalar(grid: &TimeScaleGrid, p: &QFunction) -> Result<Regressivity> {
    let tol = tol::get().regressive;
    let mut min_margin = f64::INFINITY;
    let mut offender = None;
    for (i, n) in grid.nodes().iter().enumerate() {
        if !grid.in_kappa(i) {
            continue;
        }
        let m = (Quaternion::ONE + p.eval(n.t)? * n.mu).norm();
        min_margin = min_margin.min(m);
        if m <= tol && offender.is_none() {
            offender = Some(n.t);
        }
    }
    Ok(Regressivity { regressive: offender.is_none(), offender, min_margin })
}

/// `(p ⊕ q)(t) = p + q + μ p q` at node `i`.
pub fn circle_plus(grid: &TimeScaleGrid, p: &QFunction, q: &QFunction, i: usize) -> Result<Quaternion> {
    let n = grid.nodes()[i];
    let (a, b) = (p.eval(n.t)?, q.eval(n.t)?);
    Ok(a + b + a * b * n.mu)
}

/// Cylinder transformation `ξ_h(q) = Ln(1 + q h)/h`, and `q` itself at `h = 0`.
pub fn cylinder(h: f64, q: Quaternion) -> Result<Quaternion> {
    if h == 0.0 {
        return Ok(q);
    }
    let z = Quaternion::ONE + q * h;
    if z.norm() <= tol::get().regressive {
        return Err(QdetError::NotRegressive { t: f64::NAN, detail: format!("|1 + {h} q| = {:e}", z.norm()) });
    }
    Ok(z.ln()? / h)
}

/// Generalized exponential `E_p(t, s) = exp(∫_s^t ξ_μ(p) Δτ)` between nodes `s` and `t`.
pub fn exponential_e(grid: &TimeScaleGrid, p: &QFunction, t: usize, s: usize) -> Result<Quaternion> {
    let (lo, hi) = (t.min(s), t.max(s));
    for i in lo..hi {
        let n = grid.nodes()[i];
        if n.mu > 0.0 && (Quaternion::ONE + p.eval(n.t)? * n.mu).norm() <= tol::get().regressive {
            return Err(QdetError::NotRegressive { t: n.t, detail: "1 + μ p vanishes".into() });
        }
    }
    let integral = delta_integral(grid, s, t, |tau, mu| cylinder(mu, p.eval_interp(tau)?))?;
    Ok(integral.exp())
}

/// The initial value problem `y^Δ = p y + f`, `y(t0) = c0` on a grid starting at `t0`.
#[derive(Debug, Clone)]
pub struct ScalarProblem {
    pub grid: TimeScaleGrid,
    pub p: QFunction,
    pub c0: Quaternion,
    pub forcing: Option<QFunction>,
}

impl ScalarProblem {
    pub fn new(grid: TimeScaleGrid, p: QFunction, c0: Quaternion) -> Self {
        Self { grid, p, c0, forcing: None }
    }

    pub fn with_forcing(mut self, f: QFunction) -> Self {
        self.forcing = Some(f);
        self
    }

    fn check(&self) -> Result<()> {
        self.p.check_covers(&self.grid)?;
        if let Some(f) = &self.forcing {
            f.check_covers(&self.grid)?;
        }
        is_regressive_scalar(&self.grid, &self.p)?.into_result()
    }

    /// Residual `|y^Δ − p y − f|` at each node of a table of values.
    pub fn residuals(&self, values: &[Quaternion]) -> Result<Vec<Option<f64>>> {
        let mats: Vec<QMatrix> = values.iter().map(|&q| QMatrix::column_vector(&[q])).collect();
        (0..values.len())
            .map(|i| {
                if !self.grid.in_kappa(i) {
                    return Ok(None);
                }
                let Some(d) = derivative_at_nodes(&self.grid, &mats, i)? else { return Ok(None) };
                let t = self.grid.t(i);
                let mut r = d[(0, 0)] - self.p.eval(t)? * values[i];
                if let Some(f) = &self.forcing {
                    r -= f.eval(t)?;
                }
                Ok(Some(r.norm()))
            })
            .collect()
    }
}

/// Solution values at nodes `0..=up_to`; exact jumps on scattered steps, RK4 on dense ones.
pub fn solve_scalar(problem: &ScalarProblem, up_to: usize) -> Result<SolutionTable> {
    let values = scalar_values(problem, up_to)?;
    let residuals = problem.residuals(&values)?;
    let rows = values
        .into_iter()
        .zip(residuals)
        .enumerate()
        .map(|(i, (y, residual))| SolutionRow { t: problem.grid.t(i), y: vec![y], residual })
        .collect();
    Ok(SolutionTable::new(rows))
}

fn scalar_values(problem: &ScalarProblem, up_to: usize) -> Result<Vec<Quaternion>> {
    if up_to >= problem.grid.len() {
        return Err(QdetError::InvalidInput(format!("node index {up_to} outside the grid")));
    }
    problem.check()?;
    let a = |t: f64| Ok(QMatrix::column_vector(&[problem.p.eval_interp(t)?]));
    let f = |t: f64| Ok(QMatrix::column_vector(&[problem.forcing.as_ref().unwrap().eval_interp(t)?]));
    let forcing: Option<&dyn Fn(f64) -> Result<QMatrix>> = if problem.forcing.is_some() { Some(&f) } else { None };
    let xs = march(&problem.grid, 0, up_to, QMatrix::column_vector(&[problem.c0]), &a, forcing)?;
    Ok(xs.into_iter().map(|m| m[(0, 0)]).collect())
}

/// `ψ_p(t, s) = φ(t) φ(s)^{-1}` where `φ` solves `φ^Δ = p φ`, `φ(t0) = 1`.
pub fn psi(grid: &TimeScaleGrid, p: &QFunction, t: usize, s: usize) -> Result<Quaternion> {
    let problem = ScalarProblem::new(grid.clone(), p.clone(), Quaternion::ONE);
    let phi = scalar_values(&problem, t.max(s))?;
    Ok(phi[t] * phi[s].inverse()?)
}

/// `|ψ_p(t, t0) − E_p(t, t0)|`.
pub fn compare_psi_vs_e(grid: &TimeScaleGrid, p: &QFunction, t: usize) -> Result<f64> {
    Ok((psi(grid, p, t, 0)? - exponential_e(grid, p, t, 0)?).norm())
}
