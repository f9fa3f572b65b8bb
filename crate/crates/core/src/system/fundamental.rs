use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QdetError, Result};
use crate::linalg::{right_eigenvectors, right_independent, standard_eigenvalues, QMatrix, QVector};
use crate::ode::march;
use crate::quat::Quaternion;
use crate::scalar::{cylinder, is_regressive_scalar};
use crate::timescale::{derivative_at_nodes, running_integral, MatrixFunction, QFunction, TimeScaleGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FundamentalSource {
    Eigen,
    Putzer,
    Columnwise,
}

/// Solution matrix `M(t)` at every node of a grid, with its Wronskian.
#[derive(Debug)]
pub struct FundamentalMatrix {
    grid: TimeScaleGrid,
    values: Vec<QMatrix>,
    wronskian: Vec<f64>,
    source: FundamentalSource,
    inverses: Vec<OnceLock<QMatrix>>,
}

impl FundamentalMatrix {
    pub fn new(grid: TimeScaleGrid, values: Vec<QMatrix>, source: FundamentalSource) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(QdetError::DimensionMismatch(format!(
                "{} matrices for {} grid nodes",
                values.len(),
                grid.len()
            )));
        }
        let wronskian = values.iter().map(QMatrix::pdet).collect::<Result<Vec<_>>>()?;
        let inverses = (0..values.len()).map(|_| OnceLock::new()).collect();
        Ok(Self { grid, values, wronskian, source, inverses })
    }

    pub fn grid(&self) -> &TimeScaleGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source(&self) -> FundamentalSource {
        self.source
    }

    pub fn value(&self, i: usize) -> &QMatrix {
        &self.values[i]
    }

    pub fn values(&self) -> &[QMatrix] {
        &self.values
    }

    pub fn wronskian(&self, i: usize) -> f64 {
        self.wronskian[i]
    }

    pub fn wronskians(&self) -> &[f64] {
        &self.wronskian
    }

    /// `M(t_i)^{-1}`, computed once.
    pub fn inverse(&self, i: usize) -> Result<&QMatrix> {
        if let Some(m) = self.inverses[i].get() {
            return Ok(m);
        }
        let inv = self.values[i].inverse()?;
        Ok(self.inverses[i].get_or_init(|| inv))
    }

    /// `Ψ(t_i, t_j) = M(t_i) M(t_j)^{-1}`.
    pub fn transition(&self, i: usize, j: usize) -> Result<QMatrix> {
        self.values[i].mul(self.inverse(j)?)
    }

    /// `Ψ(t_i, t_0)` at every node.
    pub fn transitions_from_start(&self) -> Result<Vec<QMatrix>> {
        (0..self.len()).map(|i| self.transition(i, 0)).collect()
    }
}

/// State-transition matrix `Ψ_A(t, s)` between nodes.
pub fn state_transition(fm: &FundamentalMatrix, t: usize, s: usize) -> Result<QMatrix> {
    fm.transition(t, s)
}

fn require_square(a: &QMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(QdetError::NotSquare { rows: a.rows(), cols: a.cols() })
    }
}

/// `E_λ(t_i, t_0)` at every node for a constant complex `λ`.
fn complex_exponential(grid: &TimeScaleGrid, lambda: Complex64) -> Result<Vec<Quaternion>> {
    let lq = Quaternion::from_complex(lambda);
    is_regressive_scalar(grid, &QFunction::constant(lq))?.into_result()?;
    let integrals = running_integral(grid, |_, mu| cylinder(mu, lq))?;
    Ok(integrals.into_iter().map(Quaternion::exp).collect())
}

/// Fundamental matrix with columns `η_i E_{λ_i}(t, t0)` from right eigenpairs of a constant `A`.
pub fn fundamental_by_eigen(grid: &TimeScaleGrid, a: &QMatrix) -> Result<FundamentalMatrix> {
    require_square(a)?;
    let n = a.rows();
    let lambdas = standard_eigenvalues(a)?;
    let mut pairs: Vec<(Complex64, QVector)> = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let l = lambdas[i];
        let mut k = 1;
        while i + k < n && (lambdas[i + k] - l).norm() <= 1e-8 * l.norm().max(1.0) {
            k += 1;
        }
        let vs = right_eigenvectors(a, l, k).map_err(|e| match e {
            QdetError::DefectiveDirection { found, .. } => QdetError::Defective { found: pairs.len() + found, needed: n },
            other => other,
        })?;
        pairs.extend(vs.into_iter().map(|v| (l, v)));
        i += k;
    }
    let columns: Vec<QVector> = pairs.iter().map(|(_, v)| v.clone()).collect();
    if !right_independent(&columns)? {
        return Err(QdetError::Defective { found: n - 1, needed: n });
    }
    let mut exps: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
    for (idx, (l, _)) in pairs.iter().enumerate() {
        match pairs[..idx].iter().position(|(m, _)| m == l) {
            Some(p) => exps.push(exps[p].clone()),
            None => exps.push(complex_exponential(grid, *l)?),
        }
    }
    let values = (0..grid.len())
        .map(|node| QMatrix::from_fn(n, n, |r, c| pairs[c].1[r] * exps[c][node]))
        .collect();
    FundamentalMatrix::new(grid.clone(), values, FundamentalSource::Eigen)
}

/// Default Putzer parameters: all `2n` roots of the characteristic polynomial of `χ_A`,
/// each standard eigenvalue followed by its conjugate, ordered by descending modulus,
/// then descending real part, then descending imaginary part.
pub fn default_alphas(a: &QMatrix) -> Result<Vec<Quaternion>> {
    let mut std = standard_eigenvalues(a)?;
    std.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(y.re.total_cmp(&x.re))
            .then(y.im.total_cmp(&x.im))
    });
    Ok(std.into_iter().flat_map(|l| [l, l.conj()]).map(Quaternion::from_complex).collect())
}

/// Putzer data: the parameters `α_k`, the matrices `P_0..P_m`, the chain `φ_k` at each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PutzerData {
    pub alphas: Vec<Quaternion>,
    pub p: Vec<QMatrix>,
    pub phi: Vec<Vec<Quaternion>>,
    /// `‖P_m‖` (Frobenius).
    pub residual: f64,
    /// Bound the residual was checked against.
    pub bound: f64,
    /// Largest `‖Ψ^Δ − AΨ‖` over nodes where the delta derivative is available.
    pub max_derivative_residual: f64,
}

/// State-transition matrix `Ψ_A(t, t0) = Σ_k P_k φ_{k+1}(t)` by Putzer's algorithm.
pub fn putzer(grid: &TimeScaleGrid, a: &QMatrix, alphas: Option<&[Quaternion]>) -> Result<(PutzerData, FundamentalMatrix)> {
    require_square(a)?;
    let n = a.rows();
    let alphas = match alphas {
        Some(al) if !al.is_empty() => al.to_vec(),
        Some(_) => return Err(QdetError::InvalidInput("alpha list is empty".into())),
        None => default_alphas(a)?,
    };
    let m = alphas.len();

    let mut p = vec![QMatrix::identity(n)];
    for &alpha in &alphas {
        let prev = p.last().unwrap();
        let next = a.mul(prev)?.sub(&prev.mul_scalar_right(alpha))?;
        p.push(next);
    }
    let residual = p[m].norm_fro();
    let bound = 1e-8 * (1.0 + a.norm_fro()).powi(m as i32);
    if !(residual <= bound) {
        return Err(QdetError::AnnihilationFailed { residual, bound });
    }

    for &alpha in &alphas {
        is_regressive_scalar(grid, &QFunction::constant(alpha))?.into_result()?;
    }
    // lower bidiagonal chain: φ_1^Δ = α_1 φ_1, φ_{k+1}^Δ = α_{k+1} φ_{k+1} + φ_k
    let chain = QMatrix::from_fn(m, m, |r, c| {
        if r == c {
            alphas[r]
        } else if r == c + 1 {
            Quaternion::ONE
        } else {
            Quaternion::ZERO
        }
    });
    let mut start = QMatrix::zeros(m, 1);
    start[(0, 0)] = Quaternion::ONE;
    let chain_fn = |_: f64| Ok(chain.clone());
    let states = march(grid, 0, grid.len() - 1, start, &chain_fn, None)?;
    let phi: Vec<Vec<Quaternion>> = states.iter().map(|s| s.column(0)).collect();

    let mut values = Vec::with_capacity(grid.len());
    for s in &states {
        let mut psi = QMatrix::zeros(n, n);
        for k in 0..m {
            psi = psi.add(&p[k].mul_scalar_right(s[(k, 0)]))?;
        }
        values.push(psi);
    }

    let mut max_derivative_residual: f64 = 0.0;
    for i in 0..grid.len() {
        if !grid.in_kappa(i) {
            continue;
        }
        if let Some(d) = derivative_at_nodes(grid, &values, i)? {
            let r = d.sub(&a.mul(&values[i])?)?.norm_fro();
            max_derivative_residual = max_derivative_residual.max(r);
        }
    }

    let data = PutzerData { alphas, p, phi, residual, bound, max_derivative_residual };
    let fm = FundamentalMatrix::new(grid.clone(), values, FundamentalSource::Putzer)?;
    Ok((data, fm))
}

/// Solution matrix of `X^Δ = A(t) X`, `X(t0) = M0`, by direct time marching.
pub fn columnwise(grid: &TimeScaleGrid, a: &MatrixFunction, m0: &QMatrix) -> Result<FundamentalMatrix> {
    a.validate()?;
    if a.rows != a.cols || m0.rows() != a.rows {
        return Err(QdetError::DimensionMismatch(format!(
            "coefficient {}x{} with initial matrix {}x{}",
            a.rows,
            a.cols,
            m0.rows(),
            m0.cols()
        )));
    }
    let a_fn = |t: f64| a.eval_interp(t);
    let values = march(grid, 0, grid.len() - 1, m0.clone(), &a_fn, None)?;
    FundamentalMatrix::new(grid.clone(), values, FundamentalSource::Columnwise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::TimeScaleSpec;

    fn distinct_pair() -> QMatrix {
        QMatrix::from_rows(&[&[Quaternion::I, Quaternion::ONE], &[Quaternion::ZERO, Quaternion::ONE + Quaternion::I]])
    }

    fn z(n: f64) -> TimeScaleGrid {
        TimeScaleGrid::build(&TimeScaleSpec::integers(), 0.0, n, 0.1).unwrap()
    }

    #[test]
    fn eigen_fundamental_example() {
        let fm = fundamental_by_eigen(&z(6.0), &distinct_pair()).unwrap();
        for t in 0..=6 {
            let p1 = (Quaternion::ONE + Quaternion::I).powi(t).unwrap();
            let p2 = Quaternion::new(2.0, 1.0, 0.0, 0.0).powi(t).unwrap();
            let expect = QMatrix::from_rows(&[&[p1, p2], &[Quaternion::ZERO, p2]]);
            assert!(fm.value(t as usize).max_abs_diff(&expect) < 1e-10);
        }
        assert!((fm.wronskian(1) - 10.0).abs() < 1e-10);
    }

    #[test]
    fn defective_matrix_is_refused() {
        let jordan = QMatrix::from_rows(&[&[Quaternion::ONE, Quaternion::ONE], &[Quaternion::ZERO, Quaternion::ONE]]);
        assert!(matches!(fundamental_by_eigen(&z(3.0), &jordan), Err(QdetError::Defective { .. })));
        let (data, fm) = putzer(&z(3.0), &jordan, None).unwrap();
        assert!(data.residual < 1e-12);
        // (I + J)^t = [[2^t, t 2^{t-1}], [0, 2^t]]
        let v = fm.value(3);
        assert!(v[(0, 1)].max_abs_diff(Quaternion::real(12.0)) < 1e-12);
    }

    #[test]
    fn bad_alphas_fail_annihilation() {
        let r = putzer(&z(3.0), &distinct_pair(), Some(&[Quaternion::real(5.0)]));
        assert!(matches!(r, Err(QdetError::AnnihilationFailed { .. })));
    }

    #[test]
    fn transition_identity_at_equal_times() {
        let fm = fundamental_by_eigen(&z(4.0), &distinct_pair()).unwrap();
        for i in 0..fm.len() {
            assert!(state_transition(&fm, i, i).unwrap().max_abs_diff(&QMatrix::identity(2)) < 1e-12);
        }
    }

    #[test]
    fn zero_matrix_transition_is_identity() {
        let g = TimeScaleGrid::build(&TimeScaleSpec::Reals, 0.0, 1.0, 0.1).unwrap();
        let (_, fm) = putzer(&g, &QMatrix::zeros(2, 2), None).unwrap();
        for i in 0..fm.len() {
            for j in 0..fm.len() {
                assert!(fm.transition(i, j).unwrap().max_abs_diff(&QMatrix::identity(2)) < 1e-14);
            }
        }
    }
}
