use serde::{Deserialize, Serialize};

use super::fundamental::{fundamental_by_eigen, putzer, FundamentalMatrix, PutzerData};
use super::{is_regressive_matrix, SystemProblem};
use crate::error::{QdetError, Result};
use crate::linalg::QMatrix;
use crate::ode::march;
use crate::quat::Quaternion;
use crate::table::{SolutionRow, SolutionTable};
use crate::timescale::{cumulative_integral, MatrixFunction, TimeScaleGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Eigenpairs when `A` is constant and non-defective, Putzer when constant
    /// and defective, time marching otherwise.
    #[default]
    Auto,
    Eigen,
    Putzer,
    Step,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Eigen => "eigen",
            Method::Putzer => "putzer",
            Method::Step => "step",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub method: Method,
    pub alphas: Option<Vec<Quaternion>>,
}

#[derive(Debug)]
pub struct SystemSolution {
    pub table: SolutionTable,
    /// The method actually used (never `Auto`).
    pub method: Method,
    pub fundamental: Option<FundamentalMatrix>,
    pub putzer: Option<PutzerData>,
}

/// Solves the problem on nodes `0..=up_to` with the automatic method.
pub fn solve_system(problem: &SystemProblem, up_to: usize) -> Result<SolutionTable> {
    Ok(solve_system_with(problem, up_to, &SolveOptions::default())?.table)
}

pub fn solve_system_with(problem: &SystemProblem, up_to: usize, opts: &SolveOptions) -> Result<SystemSolution> {
    problem.validate()?;
    let grid = &problem.grid;
    if up_to >= grid.len() {
        return Err(QdetError::InvalidInput(format!("node index {up_to} outside the grid")));
    }
    problem.a.check_covers(grid)?;
    if let Some(f) = &problem.forcing {
        f.check_covers(grid)?;
    }
    let reg = is_regressive_matrix(grid, &problem.a)?;
    if let Some(t) = reg.offender {
        return Err(QdetError::NotRegressive {
            t,
            detail: format!("I + μA(t) is singular (pdet ratio {:e})", reg.min_margin),
        });
    }

    let constant = problem.constant_matrix();
    let method = match (opts.method, &constant) {
        (Method::Eigen | Method::Putzer, None) => {
            return Err(QdetError::TimeVarying("eigen and putzer methods need a constant coefficient matrix"))
        }
        (Method::Auto, None) => Method::Step,
        (Method::Auto, Some(_)) if opts.alphas.is_some() => Method::Putzer,
        (m, _) => m,
    };

    let (method, fundamental, putzer_data) = match (method, constant) {
        (Method::Step, _) => (Method::Step, None, None),
        (Method::Eigen, Some(a)) => (Method::Eigen, Some(fundamental_by_eigen(grid, &a)?), None),
        (Method::Putzer, Some(a)) => {
            let (d, fm) = putzer(grid, &a, opts.alphas.as_deref())?;
            (Method::Putzer, Some(fm), Some(d))
        }
        (Method::Auto, Some(a)) => match fundamental_by_eigen(grid, &a) {
            Ok(fm) => (Method::Eigen, Some(fm), None),
            Err(QdetError::Defective { .. } | QdetError::DefectiveDirection { .. }) => {
                let (d, fm) = putzer(grid, &a, None)?;
                (Method::Putzer, Some(fm), Some(d))
            }
            Err(e) => return Err(e),
        },
        (_, None) => unreachable!("time-varying coefficients resolved to stepping above"),
    };

    let values = match &fundamental {
        Some(fm) => variation_of_constants(problem, fm)?,
        None => step_values(problem)?,
    };
    let values: Vec<QMatrix> = values.into_iter().take(up_to + 1).collect();
    let residuals = node_residuals(grid, &problem.a, problem.forcing.as_ref(), &values)?;
    let rows = values
        .iter()
        .zip(residuals)
        .enumerate()
        .map(|(i, (v, residual))| SolutionRow { t: grid.t(i), y: v.column(0), residual })
        .collect();
    Ok(SystemSolution { table: SolutionTable::new(rows), method, fundamental, putzer: putzer_data })
}

fn step_values(problem: &SystemProblem) -> Result<Vec<QMatrix>> {
    let a = |t: f64| problem.a_at(t);
    let f = |t: f64| problem.f_at(t);
    let forcing: Option<&dyn Fn(f64) -> Result<QMatrix>> = if problem.forcing.is_some() { Some(&f) } else { None };
    march(&problem.grid, 0, problem.grid.len() - 1, QMatrix::column_vector(&problem.eta), &a, forcing)
}

/// `φ(t) = M(t) [M(t0)^{-1} η + ∫_{t0}^t M^{-1}(σ(τ)) f(τ) Δτ]`.
fn variation_of_constants(problem: &SystemProblem, fm: &FundamentalMatrix) -> Result<Vec<QMatrix>> {
    let grid = &problem.grid;
    let eta = QMatrix::column_vector(&problem.eta);
    let base = fm.inverse(0)?.mul(&eta)?;
    let integrals = match &problem.forcing {
        None => vec![QMatrix::zeros(problem.dim(), 1); grid.len()],
        Some(f) => cumulative_integral(
            grid,
            |i| fm.inverse(i)?.mul(&f.eval(grid.t(i))?),
            |i| fm.inverse(i + 1)?.mul(&f.eval(grid.t(i))?),
        )?,
    };
    (0..grid.len()).map(|i| fm.value(i).mul(&base.add(&integrals[i])?)).collect()
}

fn derivative_in_range(grid: &TimeScaleGrid, values: &[QMatrix], i: usize) -> Result<Option<QMatrix>> {
    let Some(w) = grid.derivative_weights(i)? else { return Ok(None) };
    if w.iter().any(|&(j, _)| j >= values.len()) {
        return Ok(None);
    }
    let mut acc = values[i].scale(0.0);
    for (j, c) in w {
        acc = acc.add(&values[j].scale(c))?;
    }
    Ok(Some(acc))
}

/// `‖X^Δ − A X − F‖_F` at each node, `None` where the delta derivative is unavailable.
fn node_residuals(
    grid: &TimeScaleGrid,
    a: &MatrixFunction,
    f: Option<&MatrixFunction>,
    values: &[QMatrix],
) -> Result<Vec<Option<f64>>> {
    (0..values.len())
        .map(|i| {
            if !grid.in_kappa(i) {
                return Ok(None);
            }
            let Some(d) = derivative_in_range(grid, values, i)? else { return Ok(None) };
            let t = grid.t(i);
            let mut r = d.sub(&a.eval(t)?.mul(&values[i])?)?;
            if let Some(f) = f {
                r = r.sub(&f.eval(t)?)?;
            }
            Ok(Some(r.norm_fro()))
        })
        .collect()
}

fn check_alignment(grid: &TimeScaleGrid, times: &[f64]) -> Result<()> {
    if times.len() > grid.len() {
        return Err(QdetError::DimensionMismatch(format!(
            "table has {} rows for {} grid nodes",
            times.len(),
            grid.len()
        )));
    }
    for (i, &t) in times.iter().enumerate() {
        let g = grid.t(i);
        if (g - t).abs() > crate::tol::get().membership * g.abs().max(1.0) {
            return Err(QdetError::DimensionMismatch(format!("table row {i} at t = {t}, grid node at {g}")));
        }
    }
    Ok(())
}

/// Largest `‖φ^Δ − Aφ − f‖` over nodes of a table aligned with the problem grid.
pub fn verify_solution(problem: &SystemProblem, table: &SolutionTable) -> Result<f64> {
    check_alignment(&problem.grid, &table.times())?;
    if table.dim() != problem.dim() {
        return Err(QdetError::DimensionMismatch(format!(
            "table has dimension {}, system has {}",
            table.dim(),
            problem.dim()
        )));
    }
    let r = node_residuals(&problem.grid, &problem.a, problem.forcing.as_ref(), &table.values())?;
    Ok(r.into_iter().flatten().fold(0.0, f64::max))
}

/// Largest `‖M^Δ − A M‖_F` for a table of matrices aligned with the grid.
pub fn verify_matrix_solution(grid: &TimeScaleGrid, a: &MatrixFunction, mats: &[QMatrix]) -> Result<f64> {
    if mats.len() > grid.len() {
        return Err(QdetError::DimensionMismatch("more matrices than grid nodes".into()));
    }
    let r = node_residuals(grid, a, None, mats)?;
    Ok(r.into_iter().flatten().fold(0.0, f64::max))
}

fn homogeneous(problem: &SystemProblem) -> SystemProblem {
    SystemProblem { forcing: None, ..problem.clone() }
}

/// Residual of the right combination `x1 a1 + x2 a2` for the homogeneous system.
pub fn superposition_check(
    problem: &SystemProblem,
    x1: &SolutionTable,
    x2: &SolutionTable,
    a1: Quaternion,
    a2: Quaternion,
) -> Result<f64> {
    let combo = x1.mul_right(a1).add(&x2.mul_right(a2))?;
    verify_solution(&homogeneous(problem), &combo)
}

/// Residual of the left combination `a1 x1 + a2 x2`; generally not a solution.
pub fn left_combination_check(
    problem: &SystemProblem,
    x1: &SolutionTable,
    x2: &SolutionTable,
    a1: Quaternion,
    a2: Quaternion,
) -> Result<f64> {
    let combo = x1.mul_left(a1).add(&x2.mul_left(a2))?;
    verify_solution(&homogeneous(problem), &combo)
}

/// True iff the Wronskian is either below `1e-10` at every node or above it at every node,
/// matching its value at the first node.
pub fn wronskian_dichotomy(fm: &FundamentalMatrix) -> bool {
    const ZERO: f64 = 1e-10;
    let w = fm.wronskians();
    if w[0] <= ZERO {
        w.iter().all(|&x| x <= ZERO)
    } else {
        w.iter().all(|&x| x > ZERO)
    }
}

/// Largest relative violation of `Ψ(t,s)Ψ(s,r) = Ψ(t,r)` and `Ψ(t,s)^{-1} = Ψ(s,t)`
/// over a spread of up to `samples` nodes.
pub fn cocycle_residual(fm: &FundamentalMatrix, samples: usize) -> Result<f64> {
    let n = fm.len();
    let k = samples.clamp(2, n.max(2)).min(n);
    let idx: Vec<usize> = if n <= k {
        (0..n).collect()
    } else {
        let mut v: Vec<usize> = (0..k).map(|j| j * (n - 1) / (k - 1)).collect();
        v.dedup();
        v
    };
    let mut worst: f64 = 0.0;
    for &t in &idx {
        for &s in &idx {
            let ts = fm.transition(t, s)?;
            let st = fm.transition(s, t)?;
            let scale = ts.norm_fro().max(st.norm_fro()).max(1.0);
            worst = worst.max(ts.inverse()?.max_abs_diff(&st) / scale);
            for &r in &idx {
                let tr = fm.transition(t, r)?;
                let lhs = ts.mul(&fm.transition(s, r)?)?;
                worst = worst.max(lhs.max_abs_diff(&tr) / tr.norm_fro().max(1.0));
            }
        }
    }
    Ok(worst)
}
