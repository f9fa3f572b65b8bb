//! Problem files (`qdets/1`) and run reports.

use serde::{Deserialize, Serialize};

use crate::error::{QdetError, Result};
use crate::linalg::QMatrix;
use crate::quat::Quaternion;
use crate::scalar::{Regressivity, ScalarProblem};
use crate::system::{Method, SystemProblem};
use crate::table::SolutionTable;
use crate::timescale::{MatrixFunction, QFunction, TimeScaleGrid, TimeScaleSpec, DEFAULT_SUBSTEP};
use crate::tol::Tolerances;

pub const SCHEMA: &str = "qdets/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub t0: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    #[serde(rename = "denseSubstep", default, skip_serializing_if = "Option::is_none")]
    pub dense_substep: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Scalar,
    System,
}

/// A coefficient or forcing term: one function, a column of functions, or a matrix given by rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Scalar(QFunction),
    Column(Vec<QFunction>),
    Rows(Vec<Vec<QFunction>>),
}

impl Coefficient {
    pub fn to_matrix_function(&self) -> Result<MatrixFunction> {
        match self {
            Coefficient::Scalar(f) => Ok(MatrixFunction::scalar(f.clone())),
            Coefficient::Column(v) => Ok(MatrixFunction::column(v.clone())),
            Coefficient::Rows(rows) => {
                let cols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != cols) {
                    return Err(QdetError::InvalidInput("coefficient rows have unequal lengths".into()));
                }
                MatrixFunction::new(rows.len(), cols, rows.concat())
            }
        }
    }
}

/// A Putzer parameter: complex `[re, im]` (meaning `re + im i`) or a full quaternion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alpha {
    Complex([f64; 2]),
    Quaternion(Quaternion),
}

impl Alpha {
    pub fn to_quaternion(&self) -> Quaternion {
        match *self {
            Alpha::Complex([re, im]) => Quaternion::new(re, im, 0.0, 0.0),
            Alpha::Quaternion(q) => q,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Initial {
    Scalar(Quaternion),
    Vector(Vec<Quaternion>),
}

/// Optional overrides of the library tolerances; camelCase keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ToleranceOverrides {
    pub algebraic: Option<f64>,
    pub transcendental: Option<f64>,
    pub real_axis: Option<f64>,
    pub regressive: Option<f64>,
    pub membership: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            algebraic: self.algebraic.unwrap_or(base.algebraic),
            transcendental: self.transcendental.unwrap_or(base.transcendental),
            real_axis: self.real_axis.unwrap_or(base.real_axis),
            regressive: self.regressive.unwrap_or(base.regressive),
            membership: self.membership.unwrap_or(base.membership),
        }
    }

    fn validate(&self) -> Result<()> {
        let all = [
            ("algebraic", self.algebraic),
            ("transcendental", self.transcendental),
            ("realAxis", self.real_axis),
            ("regressive", self.regressive),
            ("membership", self.membership),
        ];
        for (name, v) in all {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(QdetError::InvalidInput(format!("tolerances.{name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: String,
    pub timescale: TimeScaleSpec,
    pub window: Window,
    pub kind: ProblemKind,
    pub coefficient: Coefficient,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forcing: Option<Coefficient>,
    pub initial: Initial,
    #[serde(default)]
    pub method: Method,
    /// Putzer `α`s, each `[re, im]` or `[w, x, y, z]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<Alpha>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    /// A claimed solution, checked by `qdets check`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionTable>,
}

/// A problem ready to solve.
#[derive(Debug, Clone)]
pub enum Problem {
    Scalar(ScalarProblem),
    System(SystemProblem),
}

impl Problem {
    pub fn grid(&self) -> &TimeScaleGrid {
        match self {
            Problem::Scalar(p) => &p.grid,
            Problem::System(p) => &p.grid,
        }
    }

    /// The problem as an `n×n` system; a scalar equation becomes `1×1`.
    pub fn as_system(&self) -> Result<SystemProblem> {
        match self {
            Problem::System(p) => Ok(p.clone()),
            Problem::Scalar(p) => {
                let sys = SystemProblem::new(p.grid.clone(), MatrixFunction::scalar(p.p.clone()), vec![p.c0])?;
                match &p.forcing {
                    Some(f) => sys.with_forcing(MatrixFunction::scalar(f.clone())),
                    None => Ok(sys),
                }
            }
        }
    }
}

impl ProblemFile {
    /// Parses and validates a problem file.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(s).map_err(|e| QdetError::InvalidInput(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("problem file serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(QdetError::InvalidInput(m));
        if self.schema != SCHEMA {
            return bad(format!("schema must be \"{SCHEMA}\", got \"{}\"", self.schema));
        }
        self.timescale.validate()?;
        let w = &self.window;
        if !(w.t0.is_finite() && w.t_end.is_finite()) || w.t_end < w.t0 {
            return bad(format!("window [{}, {}] is not a finite interval", w.t0, w.t_end));
        }
        if let Some(h) = w.dense_substep {
            if !(h.is_finite() && h > 0.0) {
                return bad(format!("window.denseSubstep must be positive, got {h}"));
            }
        }
        if let Some(t) = &self.tolerances {
            t.validate()?;
        }
        if let Some(alphas) = &self.alphas {
            if alphas.is_empty() {
                return bad("alphas must not be empty".into());
            }
            if let Some(k) = alphas.iter().position(|a| !a.to_quaternion().is_finite()) {
                return bad(format!("alphas[{k}] is not finite"));
            }
        }
        let a = self.coefficient.to_matrix_function()?;
        a.validate()?;
        match self.kind {
            ProblemKind::Scalar => {
                if !matches!(self.coefficient, Coefficient::Scalar(_)) {
                    return bad("coefficient of a scalar problem must be a single function".into());
                }
                if !matches!(self.initial, Initial::Scalar(_)) {
                    return bad("initial value of a scalar problem must be a quaternion".into());
                }
                if matches!(self.forcing, Some(Coefficient::Column(_) | Coefficient::Rows(_))) {
                    return bad("forcing of a scalar problem must be a single function".into());
                }
                if !matches!(self.method, Method::Auto | Method::Step) {
                    return bad(format!("method \"{}\" applies to systems only", self.method.as_str()));
                }
                if self.alphas.is_some() {
                    return bad("alphas apply to systems only".into());
                }
            }
            ProblemKind::System => {
                let n = a.rows;
                if !matches!(self.coefficient, Coefficient::Rows(_)) || a.cols != n {
                    return bad(format!("coefficient of a system must be a square matrix given by rows, got {}x{}", a.rows, a.cols));
                }
                let Initial::Vector(eta) = &self.initial else {
                    return bad("initial value of a system must be a list of quaternions".into());
                };
                if eta.len() != n {
                    return bad(format!("initial has {} entries for a {n}x{n} system", eta.len()));
                }
                if let Some(f) = &self.forcing {
                    let Coefficient::Column(v) = f else {
                        return bad("forcing of a system must be a list of functions".into());
                    };
                    if v.len() != n {
                        return bad(format!("forcing has {} entries for a {n}x{n} system", v.len()));
                    }
                }
            }
        }
        if let Some(sol) = &self.solution {
            let dim = match &self.initial {
                Initial::Scalar(_) => 1,
                Initial::Vector(v) => v.len(),
            };
            if sol.rows.iter().any(|r| r.y.len() != dim) {
                return bad(format!("solution rows must have {dim} entries"));
            }
        }
        Ok(())
    }

    /// Library tolerances with this file's overrides applied.
    pub fn tolerances(&self, base: Tolerances) -> Tolerances {
        self.tolerances.as_ref().map_or(base, |o| o.apply(base))
    }

    pub fn alphas(&self) -> Option<Vec<Quaternion>> {
        self.alphas.as_ref().map(|v| v.iter().map(Alpha::to_quaternion).collect())
    }

    /// Grid over the window; `substep` overrides `window.denseSubstep`.
    pub fn grid(&self, substep: Option<f64>) -> Result<TimeScaleGrid> {
        let h = substep.or(self.window.dense_substep).unwrap_or(DEFAULT_SUBSTEP);
        TimeScaleGrid::build(&self.timescale, self.window.t0, self.window.t_end, h)
    }

    pub fn problem(&self, substep: Option<f64>) -> Result<Problem> {
        let grid = self.grid(substep)?;
        match (&self.kind, &self.coefficient, &self.initial) {
            (ProblemKind::Scalar, Coefficient::Scalar(p), Initial::Scalar(c0)) => {
                let mut pb = ScalarProblem::new(grid, p.clone(), *c0);
                if let Some(Coefficient::Scalar(f)) = &self.forcing {
                    pb = pb.with_forcing(f.clone());
                }
                Ok(Problem::Scalar(pb))
            }
            (ProblemKind::System, c, Initial::Vector(eta)) => {
                let pb = SystemProblem::new(grid, c.to_matrix_function()?, eta.clone())?;
                match &self.forcing {
                    Some(f) => Ok(Problem::System(pb.with_forcing(f.to_matrix_function()?)?)),
                    None => Ok(Problem::System(pb)),
                }
            }
            _ => Err(QdetError::InvalidInput("kind, coefficient and initial value disagree".into())),
        }
    }

    /// A constant system file.
    pub fn constant_system(timescale: TimeScaleSpec, window: Window, a: &QMatrix, eta: Vec<Quaternion>) -> Self {
        let rows = (0..a.rows())
            .map(|r| (0..a.cols()).map(|c| QFunction::constant(a[(r, c)])).collect())
            .collect();
        ProblemFile {
            schema: SCHEMA.into(),
            timescale,
            window,
            kind: ProblemKind::System,
            coefficient: Coefficient::Rows(rows),
            forcing: None,
            initial: Initial::Vector(eta),
            method: Method::Auto,
            alphas: None,
            tolerances: None,
            solution: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WronskianSample {
    pub t: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PutzerReport {
    pub alphas: Vec<Quaternion>,
    /// `‖P_m‖_F`, which should vanish.
    pub p_m_norm: f64,
    pub bound: f64,
    pub max_derivative_residual: f64,
}

/// Summary of one `qdets solve` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub schema: String,
    pub kind: ProblemKind,
    pub method: Method,
    pub nodes: usize,
    /// File name of the solution table, relative to the report.
    pub solution: String,
    pub residual: ResidualSummary,
    pub regressivity: Regressivity,
    pub liouville_residual: Option<f64>,
    pub wronskian: Vec<WronskianSample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub putzer: Option<PutzerReport>,
    pub wall_time_seconds: f64,
}

impl RunReport {
    pub fn is_finite(&self) -> bool {
        let mut v = vec![self.residual.max, self.residual.mean, self.regressivity.min_margin, self.wall_time_seconds];
        v.extend(self.liouville_residual);
        v.extend(self.wronskian.iter().flat_map(|s| [s.t, s.w]));
        if let Some(p) = &self.putzer {
            v.extend([p.p_m_norm, p.bound, p.max_derivative_residual]);
            v.extend(p.alphas.iter().flat_map(|q| [q.w, q.x, q.y, q.z]));
        }
        v.iter().all(|x| x.is_finite())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
