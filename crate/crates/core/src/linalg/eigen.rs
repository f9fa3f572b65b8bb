use num_complex::Complex64;

use super::roots::poly_roots;
use super::{charpoly, CMatrix, QMatrix, QVector};
use crate::error::{QdetError, Result};

/// Relative singular-value cutoff for right linear independence.
pub const RANK_TOL: f64 = 1e-9;

fn cmp_re_im(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// The `n` eigenvalues of `χ_A` with nonnegative imaginary part, sorted by (Re, Im).
pub fn standard_eigenvalues(a: &QMatrix) -> Result<Vec<Complex64>> {
    let n = a.rows();
    let cp = charpoly(a)?;
    let roots = poly_roots(&cp.coefficients)?;
    let mut upper: Vec<Complex64> = roots.iter().copied().filter(|z| z.im > 0.0).collect();
    let mut real: Vec<Complex64> = roots.iter().copied().filter(|z| z.im == 0.0).collect();
    let lower = roots.iter().filter(|z| z.im < 0.0).count();
    real.sort_by(cmp_re_im);
    if upper.len() != lower || real.len() % 2 != 0 {
        return Err(QdetError::RootFindingFailed { residual: f64::NAN, bound: 0.0 });
    }
    // real roots of χ_A come in equal pairs; keep one of each
    upper.extend(real.iter().step_by(2).copied());
    if upper.len() != n {
        return Err(QdetError::RootFindingFailed { residual: f64::NAN, bound: 0.0 });
    }
    upper.sort_by(cmp_re_im);
    Ok(upper)
}

/// All `2n` roots of `det(λI − χ_A)`: the standard eigenvalues and their conjugates.
pub fn charpoly_roots(a: &QMatrix) -> Result<Vec<Complex64>> {
    let std = standard_eigenvalues(a)?;
    Ok(std.iter().copied().chain(std.iter().map(|z| z.conj())).collect())
}

/// Up to `count` right linearly independent eigenvectors for `λ`.
///
/// Each vector is scaled by a complex factor so that its first nonzero
/// complex-part entry equals 1; complex scaling keeps `λ` fixed.
pub fn right_eigenvectors(a: &QMatrix, lambda: Complex64, count: usize) -> Result<Vec<QVector>> {
    if !a.is_square() {
        return Err(QdetError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let chi = a.adjoint();
    let shifted = chi.shift(lambda);
    let scale = chi.norm_fro().max(1.0);
    let sv = shifted.singular_values();
    let smin = sv.last().copied().unwrap_or(0.0);
    if smin > 1e-6 * scale {
        return Err(QdetError::NotAnEigenvalue { re: lambda.re, im: lambda.im });
    }
    let basis = shifted.null_space_rref(1e-7 * scale);
    let mut chosen: Vec<QVector> = Vec::new();
    for x in basis {
        if chosen.len() == count {
            break;
        }
        let eta = normalize(QMatrix::vector_from_adjoint_column(&x));
        let mut trial = chosen.clone();
        trial.push(eta.clone());
        if right_independent(&trial)? {
            chosen = trial;
        }
    }
    if chosen.len() < count {
        return Err(QdetError::DefectiveDirection { found: chosen.len(), requested: count });
    }
    Ok(chosen)
}

/// The first right eigenvector for `λ`.
pub fn right_eigenvector(a: &QMatrix, lambda: Complex64) -> Result<QVector> {
    Ok(right_eigenvectors(a, lambda, 1)?.remove(0))
}

/// Number of right linearly independent eigenvectors available for `λ`.
pub fn geometric_multiplicity(a: &QMatrix, lambda: Complex64) -> Result<usize> {
    let chi = a.adjoint();
    let scale = chi.norm_fro().max(1.0);
    let basis = chi.shift(lambda).null_space_rref(1e-7 * scale);
    let mut chosen: Vec<QVector> = Vec::new();
    for x in basis {
        let mut trial = chosen.clone();
        trial.push(QMatrix::vector_from_adjoint_column(&x));
        if right_independent(&trial)? {
            chosen = trial;
        }
    }
    Ok(chosen.len())
}

fn normalize(eta: QVector) -> QVector {
    let pick = |sel: fn(&crate::Quaternion) -> Complex64| {
        let big = eta.iter().map(|q| sel(q).norm()).fold(0.0, f64::max);
        eta.iter().map(sel).find(|c| c.norm() > 1e-12 * big.max(1e-300))
    };
    let z = pick(|q| q.parts().0).or_else(|| pick(|q| q.parts().1));
    match z {
        Some(z) => {
            let z = Complex64::new(1.0, 0.0) / z;
            let zq = crate::Quaternion::from_complex(z);
            eta.into_iter().map(|q| q * zq).collect()
        }
        None => eta,
    }
}

/// True iff the columns are right linearly independent over the quaternions.
pub fn right_independent(vectors: &[QVector]) -> Result<bool> {
    if vectors.is_empty() {
        return Ok(true);
    }
    let n = vectors[0].len();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(QdetError::DimensionMismatch("vectors of unequal length".into()));
    }
    if vectors.len() > n {
        return Ok(false);
    }
    let m = QMatrix::from_columns(vectors)?;
    let chi: CMatrix = m.adjoint();
    Ok(chi.rank(RANK_TOL) == 2 * vectors.len())
}
