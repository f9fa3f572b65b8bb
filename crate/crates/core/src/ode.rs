//! Time marching for `X^Δ = A(t) X + F(t)` on a grid.

use crate::error::{QdetError, Result};
use crate::linalg::QMatrix;
use crate::timescale::TimeScaleGrid;

pub(crate) type MatFn<'a> = &'a dyn Fn(f64) -> Result<QMatrix>;

fn rhs(a: MatFn, f: Option<MatFn>, t: f64, x: &QMatrix) -> Result<QMatrix> {
    let ax = a(t)?.mul(x)?;
    match f {
        Some(f) => ax.add(&f(t)?),
        None => Ok(ax),
    }
}

/// Values at nodes `from..=to`, starting from `x0` at node `from`.
///
/// Scattered steps are the exact jump `X + μ(AX + F)`; dense steps are
/// classical RK4 with the grid step.
pub(crate) fn march(
    grid: &TimeScaleGrid,
    from: usize,
    to: usize,
    x0: QMatrix,
    a: MatFn,
    f: Option<MatFn>,
) -> Result<Vec<QMatrix>> {
    let mut out = Vec::with_capacity(to + 1 - from);
    out.push(x0);
    for i in from..to {
        let node = grid.nodes()[i];
        let x = out.last().unwrap();
        let next = if grid.step_is_dense(i) {
            let h = grid.t(i + 1) - node.t;
            let t = node.t;
            let k1 = rhs(a, f, t, x)?;
            let k2 = rhs(a, f, t + 0.5 * h, &x.add(&k1.scale(0.5 * h))?)?;
            let k3 = rhs(a, f, t + 0.5 * h, &x.add(&k2.scale(0.5 * h))?)?;
            let k4 = rhs(a, f, t + h, &x.add(&k3.scale(h))?)?;
            let incr = k1.add(&k2.scale(2.0))?.add(&k3.scale(2.0))?.add(&k4)?.scale(h / 6.0);
            x.add(&incr)?
        } else {
            x.add(&rhs(a, f, node.t, x)?.scale(node.mu))?
        };
        if !next.is_finite() {
            return Err(QdetError::NonFiniteState { t: grid.t(i + 1) });
        }
        out.push(next);
    }
    Ok(out)
}
