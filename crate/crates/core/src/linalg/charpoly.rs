use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, QMatrix};
use crate::error::{QdetError, Result};

/// Largest matrix accepted by [`minor_sum_oracle`].
pub const MINOR_ORACLE_LIMIT: usize = 12;

/// Characteristic data of the complex adjoint of a square quaternion matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharPolyData {
    /// Coefficients of `det(λI − χ)`, highest degree first; `coefficients[0] == 1`.
    pub coefficients: Vec<f64>,
    /// `V_1..V_2n`, sums of principal minors of `χ`.
    pub minor_sums: Vec<f64>,
}

impl CharPolyData {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `V_k` with `V_0 = 1`.
    pub fn v(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.minor_sums[k - 1]
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

/// Characteristic polynomial of `χ_A` by Faddeev–LeVerrier.
pub fn charpoly(a: &QMatrix) -> Result<CharPolyData> {
    if !a.is_square() {
        return Err(QdetError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let chi = a.adjoint();
    let coeffs = faddeev_leverrier(&chi)?;
    let scale = chi.norm_fro().max(1.0);
    let mut coefficients = Vec::with_capacity(coeffs.len());
    for (k, c) in coeffs.iter().enumerate() {
        // coefficient k is a degree-k polynomial in the entries
        if c.im.abs() > 1e-8 * scale.powi(k as i32) {
            return Err(QdetError::NonRealCoefficient { index: k, imag: c.im });
        }
        coefficients.push(c.re);
    }
    let minor_sums = coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| if k % 2 == 0 { c } else { -c })
        .collect();
    Ok(CharPolyData { coefficients, minor_sums })
}

fn faddeev_leverrier(b: &CMatrix) -> Result<Vec<Complex64>> {
    let m = b.rows();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut mk = CMatrix::zeros(m, m);
    for k in 1..=m {
        let mut next = b.mul(&mk)?;
        let prev = coeffs[k - 1];
        for i in 0..m {
            next[(i, i)] += prev;
        }
        let ck = -b.mul(&next)?.trace() / k as f64;
        coeffs.push(ck);
        mk = next;
    }
    Ok(coeffs)
}

/// Sum of all `k×k` principal minors of `b`, by direct enumeration.
pub fn minor_sum_oracle(b: &CMatrix, k: usize) -> Result<Complex64> {
    if !b.is_square() {
        return Err(QdetError::NotSquare { rows: b.rows(), cols: b.cols() });
    }
    let m = b.rows();
    if m > MINOR_ORACLE_LIMIT {
        return Err(QdetError::TooLarge { size: m, limit: MINOR_ORACLE_LIMIT });
    }
    if k == 0 || k > m {
        return Err(QdetError::InvalidInput(format!("minor order {k} outside 1..={m}")));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        total += b.principal(&idx).det()?;
        // advance to the next k-combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(total);
            }
            i -= 1;
            if idx[i] < m - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion as Q;

    fn distinct_pair() -> QMatrix {
        QMatrix::from_rows(&[&[Q::I, Q::ONE], &[Q::ZERO, Q::ONE + Q::I]])
    }

    #[test]
    fn scalar_i() {
        let cp = charpoly(&QMatrix::from_rows(&[&[Q::I]])).unwrap();
        assert_eq!(cp.coefficients, vec![1.0, 0.0, 1.0]);
        assert_eq!(cp.minor_sums, vec![0.0, 1.0]);
    }

    #[test]
    fn two_by_two_against_oracle() {
        let cp = charpoly(&distinct_pair()).unwrap();
        let expect = [1.0, -2.0, 3.0, -2.0, 2.0];
        for (a, b) in cp.coefficients.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let chi = distinct_pair().adjoint();
        for k in 1..=4 {
            let o = minor_sum_oracle(&chi, k).unwrap();
            assert!((o.re - cp.v(k)).abs() < 1e-12 && o.im.abs() < 1e-12);
        }
        assert!((minor_sum_oracle(&chi, 2).unwrap().re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let cp = charpoly(&QMatrix::zeros(3, 3)).unwrap();
        assert_eq!(cp.coefficients[0], 1.0);
        assert!(cp.coefficients[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn oracle_edge_orders() {
        let chi = distinct_pair().adjoint();
        assert!((minor_sum_oracle(&chi, 1).unwrap() - chi.trace()).norm() < 1e-14);
        assert!((minor_sum_oracle(&chi, 4).unwrap() - chi.det().unwrap()).norm() < 1e-12);
        assert!(matches!(
            minor_sum_oracle(&CMatrix::identity(13), 1),
            Err(QdetError::TooLarge { .. })
        ));
    }
}
