use super::{QFunction, TimeScaleGrid};
use crate::error::Result;
use crate::linalg::QMatrix;
use crate::quat::Quaternion;

/// Delta derivative of `f` at node `i`.
pub fn delta_derivative(grid: &TimeScaleGrid, f: &QFunction, i: usize) -> Result<Quaternion> {
    match grid.derivative_weights(i)? {
        Some(w) => w.iter().try_fold(Quaternion::ZERO, |acc, &(j, c)| Ok(acc + f.eval(grid.t(j))? * c)),
        None => {
            // scattered last node: σ(t) lies beyond the window
            let n = grid.nodes()[i];
            Ok((f.eval(n.t + n.mu)? - f.eval(n.t)?) / n.mu)
        }
    }
}

/// Delta derivative of node-tabulated matrix values; `None` where `σ(t)` is off the grid.
pub fn derivative_at_nodes(grid: &TimeScaleGrid, values: &[QMatrix], i: usize) -> Result<Option<QMatrix>> {
    let Some(w) = grid.derivative_weights(i)? else { return Ok(None) };
    let mut acc = values[i].scale(0.0);
    for (j, c) in w {
        acc = acc.add(&values[j].scale(c))?;
    }
    Ok(Some(acc))
}

/// `∫_a^b f(τ) Δτ` over grid nodes `a` and `b` (indices); the integrand receives `(t, μ(t))`.
///
/// Scattered steps contribute `μ f(t)`; dense steps use Simpson's rule with `μ = 0`.
pub fn delta_integral<F>(grid: &TimeScaleGrid, a: usize, b: usize, f: F) -> Result<Quaternion>
where
    F: Fn(f64, f64) -> Result<Quaternion>,
{
    if a > b {
        return Ok(-delta_integral(grid, b, a, f)?);
    }
    let mut acc = Quaternion::ZERO;
    for i in a..b {
        let n = grid.nodes()[i];
        if grid.step_is_dense(i) {
            let t1 = grid.t(i + 1);
            let h = t1 - n.t;
            let mid = 0.5 * (n.t + t1);
            acc += (f(n.t, 0.0)? + f(mid, 0.0)? * 4.0 + f(t1, 0.0)?) * (h / 6.0);
        } else {
            acc += f(n.t, n.mu)? * n.mu;
        }
    }
    Ok(acc)
}

/// `∫_{t(a)}^{t(b)} f Δτ` for a function spec.
pub fn delta_integral_fn(grid: &TimeScaleGrid, f: &QFunction, a: usize, b: usize) -> Result<Quaternion> {
    delta_integral(grid, a, b, |t, _| f.eval_interp(t))
}

/// Running integrals `∫_{t_0}^{t_i} g Δτ` from node values.
///
/// `jump(i)` is the integrand on the scattered step leaving node `i`
/// (weighted by `μ`); `dense(i)` is its value at node `i` seen from a
/// continuous run. Each dense step integrates the quadratic through three
/// neighbouring run nodes, falling back to the trapezoid rule on runs of a
/// single step.
pub fn cumulative_integral<D, J>(grid: &TimeScaleGrid, dense: D, jump: J) -> Result<Vec<QMatrix>>
where
    D: Fn(usize) -> Result<QMatrix>,
    J: Fn(usize) -> Result<QMatrix>,
{
    let n = grid.len();
    let mut out: Vec<QMatrix> = Vec::with_capacity(n);
    for i in 0..n.saturating_sub(1) {
        let h1 = grid.t(i + 1) - grid.t(i);
        let inc = if !grid.step_is_dense(i) {
            jump(i)?.scale(grid.nodes()[i].mu)
        } else if i + 2 < n && grid.step_is_dense(i + 1) {
            let h2 = grid.t(i + 2) - grid.t(i + 1);
            let w0 = h1 * (2.0 * h1 + 3.0 * h2) / (6.0 * (h1 + h2));
            let w1 = h1 * (h1 + 3.0 * h2) / (6.0 * h2);
            let w2 = -h1 * h1 * h1 / (6.0 * h2 * (h1 + h2));
            dense(i)?.scale(w0).add(&dense(i + 1)?.scale(w1))?.add(&dense(i + 2)?.scale(w2))?
        } else if i > 0 && grid.step_is_dense(i - 1) {
            let h0 = grid.t(i) - grid.t(i - 1);
            let w0 = -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
            let w1 = h1 * (h1 + 3.0 * h0) / (6.0 * h0);
            let w2 = h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
            dense(i - 1)?.scale(w0).add(&dense(i)?.scale(w1))?.add(&dense(i + 1)?.scale(w2))?
        } else {
            dense(i)?.add(&dense(i + 1)?)?.scale(0.5 * h1)
        };
        if out.is_empty() {
            out.push(inc.scale(0.0));
        }
        let next = out[i].add(&inc)?;
        out.push(next);
    }
    if out.is_empty() {
        out.push(dense(0)?.scale(0.0));
    }
    Ok(out)
}

/// Running scalar integrals `∫_{t_0}^{t_i} f Δτ` with the rules of [`delta_integral`].
pub fn running_integral<F>(grid: &TimeScaleGrid, f: F) -> Result<Vec<Quaternion>>
where
    F: Fn(f64, f64) -> Result<Quaternion>,
{
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = Quaternion::ZERO;
    out.push(acc);
    for i in 0..grid.len() - 1 {
        acc += delta_integral(grid, i, i + 1, &f)?;
        out.push(acc);
    }
    Ok(out)
}
