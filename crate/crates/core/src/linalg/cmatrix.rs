use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{QdetError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(QdetError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(QdetError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * s).collect() }
    }

    /// `self - lambda I`.
    pub fn shift(&self, lambda: Complex64) -> CMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] -= lambda;
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Product of row norms; bounds `|det|` from above.
    pub fn hadamard_bound(&self) -> f64 {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)].norm_sqr()).sum::<f64>().sqrt())
            .product()
    }

    /// Principal submatrix on the given (sorted) index set.
    pub fn principal(&self, idx: &[usize]) -> CMatrix {
        CMatrix::from_fn(idx.len(), idx.len(), |r, c| self[(idx[r], idx[c])])
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(QdetError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = ONE;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap_or(k);
            let pivot = a[(p, k)];
            if pivot == ZERO {
                return Ok(ZERO);
            }
            if p != k {
                a.swap_rows(p, k);
                det = -det;
            }
            det *= pivot;
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(QdetError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap_or(k);
            let pivot = a[(p, k)];
            if pivot == ZERO {
                return Err(QdetError::Singular { pdet: 0.0 });
            }
            a.swap_rows(p, k);
            inv.swap_rows(p, k);
            let ip = ONE / pivot;
            for j in 0..n {
                a[(k, j)] *= ip;
                inv[(k, j)] *= ip;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[(i, k)];
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let (ak, ik) = (a[(k, j)], inv[(k, j)]);
                    a[(i, j)] -= f * ak;
                    inv[(i, j)] -= f * ik;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Singular values in descending order (one-sided Jacobi).
    pub fn singular_values(&self) -> Vec<f64> {
        // work on the orientation with fewer columns
        let a = if self.cols > self.rows { self.conj_transpose() } else { self.clone() };
        let (m, n) = (a.rows, a.cols);
        let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha: f64 = cols[p].iter().map(|c| c.norm_sqr()).sum();
                    let beta: f64 = cols[q].iter().map(|c| c.norm_sqr()).sum();
                    let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                    let g = gamma.norm();
                    if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let (x, y) = (cols[p][i], cols[q][i]);
                        cols[p][i] = x * c - y * phase.conj() * s;
                        cols[q][i] = x * phase * s + y * c;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Numerical rank: singular values below `rel_tol * sigma_max` count as zero.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let sv = self.singular_values();
        let smax = sv.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > rel_tol * smax).count()
    }

    pub fn conj_transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|c| c.conj()).collect() }
    }

    /// Null-space basis read off the reduced row echelon form.
    ///
    /// Columns are scanned left to right; a column whose best remaining
    /// pivot is below `pivot_tol` is free. Each basis vector has a 1 in its
    /// free column and 0 in every other free column, so the basis is
    /// canonical for a given matrix.
    pub fn null_space_rref(&self, pivot_tol: f64) -> Vec<Vec<Complex64>> {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row == m {
                break;
            }
            let p = (row..m)
                .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
                .unwrap_or(row);
            if a[(p, col)].norm() <= pivot_tol {
                for i in row..m {
                    a[(i, col)] = ZERO;
                }
                continue;
            }
            a.swap_rows(p, row);
            let ip = ONE / a[(row, col)];
            for j in col..n {
                a[(row, j)] *= ip;
            }
            for i in 0..m {
                if i == row {
                    continue;
                }
                let f = a[(i, col)];
                if f == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = a[(row, j)];
                    a[(i, j)] -= f * v;
                }
            }
            pivots.push((row, col));
            row += 1;
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        (0..n)
            .filter(|c| !pivot_cols.contains(c))
            .map(|free| {
                let mut x = vec![ZERO; n];
                x[free] = ONE;
                for &(r, c) in &pivots {
                    x[c] = -a[(r, free)];
                }
                x
            })
            .collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn det_and_inverse_of_small_matrix() {
        let m = CMatrix::from_rows(&[vec![c(1.0, 1.0), c(2.0, 0.0)], vec![c(0.0, -1.0), c(3.0, 0.5)]]);
        // (1+i)(3+0.5i) - 2(-i) = 2.5 + 3.5i + 2i
        let d = m.det().unwrap();
        assert!((d - c(2.5, 5.5)).norm() < 1e-14);
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv).unwrap();
        assert!(id.sub(&CMatrix::identity(2)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = CMatrix::from_rows(&[
            vec![c(0.0, 3.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
        ]);
        let sv = m.singular_values();
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 1.0).abs() < 1e-14);
        assert_eq!(m.rank(1e-9), 2);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        // columns (1, i) and (1, 1): Gram matrix [[2, 1+i... ]]; check via det identity
        let m = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 1.0), c(1.0, 0.0)]]);
        let sv = m.singular_values();
        let prod = sv[0] * sv[1];
        assert!((prod - m.det().unwrap().norm()).abs() < 1e-14);
        let sum_sq = sv[0] * sv[0] + sv[1] * sv[1];
        assert!((sum_sq - m.norm_fro().powi(2)).abs() < 1e-13);
    }

    #[test]
    fn null_space_is_canonical() {
        let m = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![c(2.0, 0.0), c(-2.0, 0.0)]]);
        let ns = m.null_space_rref(1e-10);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![c(1.0, 0.0), c(1.0, 0.0)]);
    }
}
