use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use qdets_core::io::{Problem, PutzerReport, ResidualSummary, WronskianSample, SCHEMA};
use qdets_core::scalar::{exponential_e, is_regressive_scalar, psi, solve_scalar, Regressivity};
use qdets_core::system::{
    cocycle_residual, columnwise, is_regressive_matrix, liouville_relative_residual, solve_system_with,
    verify_solution, wronskian_dichotomy, FundamentalMatrix, SolveOptions,
};
use qdets_core::table::{matrices_to_csv, matrices_to_jsonl};
use qdets_core::{tol, Method, ProblemFile, QMatrix, QdetError, Quaternion, RunReport, SolutionTable};
use serde::Serialize;

use crate::{Common, Format};

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<QdetError> for CliError {
    fn from(e: QdetError) -> Self {
        use QdetError::*;
        let code = match e {
            InvalidInput(_) | NotInScale { .. } | EmptyWindow { .. } | NotRegressive { .. } | DimensionMismatch(_)
            | NotSquare { .. } | TimeVarying(_) | NotTabulated { .. } | OutOfKappa { .. } | TooLarge { .. } => 2,
            _ => 3,
        };
        CliError { code, message: e.to_string() }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError { code: 2, message: format!("{}: {e}", path.display()) }
}

/// Liouville residual ceiling (relative).
const LIOUVILLE_TOL: f64 = 1e-6;
/// Cocycle and inverse identities (relative).
const COCYCLE_TOL: f64 = 1e-8;
const COCYCLE_SAMPLES: usize = 12;

fn load(c: &Common) -> Result<(ProblemFile, Problem), CliError> {
    let text = fs::read_to_string(&c.file).map_err(|e| io_error(&c.file, e))?;
    let file = ProblemFile::from_json(&text)
        .map_err(|e| CliError { code: 2, message: format!("{}: {e}", c.file.display()) })?;
    if let Some(t) = c.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError { code: 2, message: format!("--tol must be positive, got {t}") });
        }
    }
    if let Some(h) = c.substep {
        if !(h.is_finite() && h > 0.0) {
            return Err(CliError { code: 2, message: format!("--substep must be positive, got {h}") });
        }
    }
    tol::set(file.tolerances(tol::Tolerances::DEFAULT));
    let problem = file.problem(c.substep)?;
    Ok((file, problem))
}

/// Default residual tolerance: tight on purely discrete grids, looser where finite differences
/// of a numerically integrated solution are involved.
fn residual_tol(c: &Common, problem: &Problem) -> f64 {
    c.tol.unwrap_or(if problem.grid().is_discrete() { 1e-8 } else { 1e-5 })
}

struct Solved {
    table: SolutionTable,
    method: Method,
    regressivity: Regressivity,
    fundamental: FundamentalMatrix,
    putzer: Option<PutzerReport>,
}

fn solve_problem(file: &ProblemFile, problem: &Problem) -> Result<Solved, CliError> {
    let grid = problem.grid();
    let last = grid.len() - 1;
    let sys = problem.as_system()?;
    let (table, method, regressivity, fundamental, putzer) = match problem {
        Problem::Scalar(p) => {
            let reg = is_regressive_scalar(grid, &p.p)?;
            (solve_scalar(p, last)?, Method::Step, reg, None, None)
        }
        Problem::System(p) => {
            let reg = is_regressive_matrix(grid, &p.a)?;
            let opts = SolveOptions { method: file.method, alphas: file.alphas() };
            let s = solve_system_with(p, last, &opts)?;
            let putzer = s.putzer.map(|d| PutzerReport {
                alphas: d.alphas.clone(),
                p_m_norm: d.residual,
                bound: d.bound,
                max_derivative_residual: d.max_derivative_residual,
            });
            (s.table, s.method, reg, s.fundamental, putzer)
        }
    };
    let fundamental = match fundamental {
        Some(fm) => fm,
        None => columnwise(grid, &sys.a, &QMatrix::identity(sys.dim()))?,
    };
    Ok(Solved { table, method, regressivity, fundamental, putzer })
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_error(&path, e))
}

fn finite_margin(mut r: Regressivity) -> Regressivity {
    if !r.min_margin.is_finite() {
        r.min_margin = f64::MAX;
    }
    r
}

pub fn solve(c: &Common) -> Result<(), CliError> {
    let start = Instant::now();
    let (file, problem) = load(c)?;
    let s = solve_problem(&file, &problem)?;
    let sys = problem.as_system()?;
    let liouville = liouville_relative_residual(&s.fundamental, &sys.a)?;
    let format = c.format.unwrap_or(Format::Csv);

    let solution_name = if format == Format::Json { "solution.json" } else { "solution.csv" };
    let solution = if format == Format::Json { s.table.to_json() } else { s.table.to_csv() };
    write(&c.out, solution_name, &solution)?;

    let grid = problem.grid();
    let times = grid.times();
    if matches!(problem, Problem::System(_)) {
        write(&c.out, "fundamental.jsonl", &matrices_to_jsonl(&times, s.fundamental.values()))?;
        if format != Format::Json {
            write(&c.out, "fundamental.csv", &matrices_to_csv(&times, s.fundamental.values()))?;
        }
    }

    let report = RunReport {
        schema: SCHEMA.into(),
        kind: file.kind,
        method: s.method,
        nodes: grid.len(),
        solution: solution_name.into(),
        residual: ResidualSummary {
            max: s.table.max_residual().unwrap_or(0.0),
            mean: s.table.mean_residual().unwrap_or(0.0),
        },
        regressivity: finite_margin(s.regressivity),
        liouville_residual: Some(liouville),
        wronskian: times.iter().zip(s.fundamental.wronskians()).map(|(&t, &w)| WronskianSample { t, w }).collect(),
        putzer: s.putzer,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    if !report.is_finite() {
        return Err(CliError { code: 3, message: "run produced non-finite values".into() });
    }
    write(&c.out, "report.json", &report.to_json())?;

    if format == Format::Json {
        print!("{}", report.to_json());
    } else {
        println!("method      {}", report.method.as_str());
        println!("nodes       {}", report.nodes);
        println!("residual    max {:e}  mean {:e}", report.residual.max, report.residual.mean);
        println!("liouville   {liouville:e}");
        if let Some(p) = &report.putzer {
            println!("putzer      |P_m| {:e}", p.p_m_norm);
        }
        println!("output      {}", c.out.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct ExpOutput {
    t: f64,
    s: f64,
    #[serde(rename = "E")]
    e: Quaternion,
    psi: Quaternion,
    difference: Quaternion,
    gap: f64,
}

pub fn exp(c: &Common, t: f64, s: Option<f64>) -> Result<(), CliError> {
    let (_, problem) = load(c)?;
    let Problem::Scalar(p) = &problem else {
        return Err(CliError { code: 2, message: "exp needs a scalar problem file".into() });
    };
    let grid = &p.grid;
    let s = s.unwrap_or(grid.t0());
    let (ti, si) = (grid.index_of(t)?, grid.index_of(s)?);
    let e = exponential_e(grid, &p.p, ti, si)?;
    let ps = psi(grid, &p.p, ti, si)?;
    let out = ExpOutput { t: grid.t(ti), s: grid.t(si), e, psi: ps, difference: ps - e, gap: (ps - e).norm() };
    if c.format == Some(Format::Json) {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    } else {
        let q = |q: Quaternion| format!("{:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}", q.w, q.x, q.y, q.z);
        println!("t     {}", out.t);
        println!("s     {}", out.s);
        println!("E     {}", q(out.e));
        println!("psi   {}", q(out.psi));
        println!("diff  {}", q(out.difference));
        println!("gap   {:e}", out.gap);
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckLine {
    name: &'static str,
    value: f64,
    tol: f64,
    pass: bool,
}

pub fn check(c: &Common) -> Result<(), CliError> {
    let (file, problem) = load(c)?;
    let sys = problem.as_system()?;
    let s = solve_problem(&file, &problem)?;
    let res_tol = residual_tol(c, &problem);

    let table = file.solution.as_ref().unwrap_or(&s.table);
    let residual = supplied_residual(&problem, table)?;
    let scale = table.rows.iter().flat_map(|r| r.y.iter().map(|q| q.norm())).fold(1.0, f64::max);

    let liouville = liouville_relative_residual(&s.fundamental, &sys.a)?;
    let cocycle = cocycle_residual(&s.fundamental, COCYCLE_SAMPLES)?;
    let dichotomy = wronskian_dichotomy(&s.fundamental);

    let lines = [
        CheckLine { name: "residual", value: residual / scale, tol: res_tol, pass: residual / scale <= res_tol },
        CheckLine { name: "liouville", value: liouville, tol: LIOUVILLE_TOL, pass: liouville <= LIOUVILLE_TOL },
        CheckLine { name: "cocycle", value: cocycle, tol: COCYCLE_TOL, pass: cocycle <= COCYCLE_TOL },
        CheckLine { name: "wronskian-dichotomy", value: f64::from(u8::from(!dichotomy)), tol: 0.0, pass: dichotomy },
    ];
    if c.format == Some(Format::Json) {
        println!("{}", serde_json::to_string_pretty(&lines).expect("serializes"));
    } else {
        let mut out = String::new();
        for l in &lines {
            let verdict = if l.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{verdict} {:<20} {:e} (tol {:e})", l.name, l.value, l.tol);
        }
        print!("{out}");
    }
    let failed: Vec<&str> = lines.iter().filter(|l| !l.pass).map(|l| l.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError { code: 4, message: format!("check failed: {}", failed.join(", ")) })
    }
}

/// Equation residual of a table, plus its mismatch with the initial value.
fn supplied_residual(problem: &Problem, table: &SolutionTable) -> Result<f64, CliError> {
    let sys = problem.as_system()?;
    let Some(first) = table.rows.first() else {
        return Err(CliError { code: 2, message: "solution table is empty".into() });
    };
    let initial = first.y.iter().zip(&sys.eta).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
    Ok(verify_solution(&sys, table)?.max(initial))
}
