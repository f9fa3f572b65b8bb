use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::TimeScaleSpec;
use crate::error::{QdetError, Result};
use crate::tol;

/// Default step inside dense segments.
pub const DEFAULT_SUBSTEP: f64 = 1e-3;

const MAX_NODES: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    /// Right-dense: the grid step after this node is continuous.
    Dense,
    /// Right-scattered: the next node is `σ(t)`.
    Scattered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub t: f64,
    pub mu: f64,
    pub kind: NodeKind,
}

/// A finite realization of a time scale on `[t0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScaleGrid {
    spec: TimeScaleSpec,
    t0: f64,
    t_end: f64,
    substep: f64,
    nodes: Vec<Node>,
    /// Whether the last node is the left-scattered maximum of a bounded scale.
    last_is_max: bool,
}

impl TimeScaleGrid {
    pub fn build(spec: &TimeScaleSpec, t0: f64, t_end: f64, substep: f64) -> Result<Self> {
        spec.validate()?;
        if !(substep.is_finite() && substep > 0.0) {
            return Err(QdetError::InvalidInput(format!("dense substep must be positive, got {substep}")));
        }
        if !(t0 < t_end) {
            return Err(QdetError::EmptyWindow { t0, t_end });
        }
        let t0 = spec.snap(t0)?;
        let t_end = spec.snap(t_end)?;
        if !(t0 < t_end) {
            return Err(QdetError::EmptyWindow { t0, t_end });
        }
        let close = |a: f64, b: f64| (a - b).abs() <= tol::get().membership * a.abs().max(b.abs()).max(1.0);
        let node_at = |t: f64| -> Result<Node> {
            let mu = spec.mu(t)?;
            let kind = if mu > 0.0 { NodeKind::Scattered } else { NodeKind::Dense };
            Ok(Node { t, mu, kind })
        };

        let mut nodes = Vec::new();
        let mut t = t0;
        loop {
            if nodes.len() > MAX_NODES {
                return Err(QdetError::InvalidInput(format!("grid exceeds {MAX_NODES} nodes")));
            }
            if close(t, t_end) || t > t_end {
                nodes.push(node_at(t_end)?);
                break;
            }
            let node = node_at(t)?;
            match node.kind {
                NodeKind::Scattered => {
                    nodes.push(node);
                    let next = spec.snap(t + node.mu)?;
                    if next > t_end && !close(next, t_end) {
                        return Err(QdetError::NotInScale { t: t_end });
                    }
                    t = next;
                }
                NodeKind::Dense => {
                    let end = spec.dense_end(t).min(t_end);
                    let len = end - t;
                    let steps = ((len / substep) - 1e-9).ceil().max(1.0) as usize;
                    let h = len / steps as f64;
                    for i in 0..steps {
                        nodes.push(Node { t: t + i as f64 * h, mu: 0.0, kind: NodeKind::Dense });
                    }
                    t = end;
                }
            }
        }
        let last_is_max = spec.max_point().is_some_and(|m| close(m, t_end));
        Ok(Self { spec: spec.clone(), t0, t_end, substep, nodes, last_is_max })
    }

    pub fn spec(&self) -> &TimeScaleSpec {
        &self.spec
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn substep(&self) -> f64 {
        self.substep
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn t(&self, i: usize) -> f64 {
        self.nodes[i].t
    }

    pub fn times(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.t).collect()
    }

    /// True iff every node is right-scattered, so all steps are exact jumps.
    pub fn is_discrete(&self) -> bool {
        self.nodes[..self.len() - 1].iter().all(|n| n.kind == NodeKind::Scattered)
    }

    /// Whether node `i` belongs to `𝕋^κ`.
    pub fn in_kappa(&self, i: usize) -> bool {
        !(self.last_is_max && i + 1 == self.len())
    }

    /// Index of the node at time `t`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let eps = tol::get().membership * t.abs().max(1.0);
        let i = self.nodes.partition_point(|n| n.t < t - eps);
        match self.nodes.get(i) {
            Some(n) if (n.t - t).abs() <= eps => Ok(i),
            _ => Err(QdetError::NotInScale { t }),
        }
    }

    /// Whether the step from node `i` to node `i + 1` is continuous.
    pub fn step_is_dense(&self, i: usize) -> bool {
        self.nodes[i].kind == NodeKind::Dense
    }

    /// Weights `w_j` with `f^Δ(t_i) ≈ Σ w_j f(t_j)` over grid nodes.
    ///
    /// Exact for scattered nodes; three-point differences (second order) on
    /// dense runs, one-sided at run ends. Returns `None` for a scattered last
    /// node, whose forward jump lies outside the grid.
    pub fn derivative_weights(&self, i: usize) -> Result<Option<Vec<(usize, f64)>>> {
        if !self.in_kappa(i) {
            return Err(QdetError::OutOfKappa { t: self.t(i) });
        }
        let n = self.len();
        let node = self.nodes[i];
        if node.kind == NodeKind::Scattered {
            if i + 1 == n {
                return Ok(None);
            }
            let mu = self.t(i + 1) - node.t;
            return Ok(Some(vec![(i, -1.0 / mu), (i + 1, 1.0 / mu)]));
        }
        let right = i + 1 < n;
        let left = i > 0 && self.step_is_dense(i - 1);
        if right && left {
            let (h1, h2) = (node.t - self.t(i - 1), self.t(i + 1) - node.t);
            return Ok(Some(vec![
                (i - 1, -h2 / (h1 * (h1 + h2))),
                (i, (h2 - h1) / (h1 * h2)),
                (i + 1, h1 / (h2 * (h1 + h2))),
            ]));
        }
        if right {
            let h1 = self.t(i + 1) - node.t;
            if i + 2 < n && self.step_is_dense(i + 1) {
                let h2 = self.t(i + 2) - self.t(i + 1);
                return Ok(Some(vec![
                    (i, -(2.0 * h1 + h2) / (h1 * (h1 + h2))),
                    (i + 1, (h1 + h2) / (h1 * h2)),
                    (i + 2, -h1 / (h2 * (h1 + h2))),
                ]));
            }
            return Ok(Some(vec![(i, -1.0 / h1), (i + 1, 1.0 / h1)]));
        }
        if left {
            let h2 = node.t - self.t(i - 1);
            if i >= 2 && self.step_is_dense(i - 2) {
                let h1 = self.t(i - 1) - self.t(i - 2);
                return Ok(Some(vec![
                    (i - 2, h2 / (h1 * (h1 + h2))),
                    (i - 1, -(h1 + h2) / (h1 * h2)),
                    (i, (2.0 * h2 + h1) / (h2 * (h1 + h2))),
                ]));
            }
            return Ok(Some(vec![(i - 1, -1.0 / h2), (i, 1.0 / h2)]));
        }
        // an isolated right-dense point cannot occur in a built grid
        Err(QdetError::Internal(format!("dense node {} has no dense neighbour", node.t)))
    }

    /// Grid as CSV with columns `t,mu,kind`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mu,kind\n");
        for n in &self.nodes {
            let kind = match n.kind {
                NodeKind::Dense => "dense",
                NodeKind::Scattered => "scattered",
            };
            let _ = writeln!(out, "{},{},{}", n.t, n.mu, kind);
        }
        out
    }
}
