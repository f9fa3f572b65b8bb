use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CMatrix;
use crate::error::{QdetError, Result};
use crate::quat::Quaternion;
use crate::tol;

/// Column vector of quaternions.
pub type QVector = Vec<Quaternion>;

/// Dense row-major quaternion matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row-major entries; fails unless `entries.len() == rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(QdetError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, data: entries })
    }

    /// Panics on ragged input; intended for literals.
    pub fn from_rows(rows: &[&[Quaternion]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn from_columns(columns: &[QVector]) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(QdetError::DimensionMismatch("columns of unequal length".into()));
        }
        Ok(Self::from_fn(n, columns.len(), |r, c| columns[c][r]))
    }

    pub fn column_vector(v: &[Quaternion]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn diagonal(d: &[Quaternion]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &q) in d.iter().enumerate() {
            m[(i, i)] = q;
        }
        m
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

    pub fn entries(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn column(&self, c: usize) -> QVector {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn columns(&self) -> Vec<QVector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    fn check_same_shape(&self, other: &QMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(QdetError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(QdetError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Quaternion::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Quaternion]) -> Result<QVector> {
        if self.cols != v.len() {
            return Err(QdetError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum()).collect())
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        self.check_same_shape(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        self.check_same_shape(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &QMatrix, f: impl Fn(Quaternion, Quaternion) -> Quaternion) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&q| f(q)).collect() }
    }

    pub fn scale(&self, s: f64) -> QMatrix {
        self.map(|q| q * s)
    }

    /// `self * q`, every entry multiplied by `q` on the right.
    pub fn mul_scalar_right(&self, q: Quaternion) -> QMatrix {
        self.map(|a| a * q)
    }

    /// `q * self`.
    pub fn mul_scalar_left(&self, q: Quaternion) -> QMatrix {
        self.map(|a| q * a)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &QMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.max_abs_diff(*b)).fold(0.0, f64::max)
    }

    /// Complex adjoint `[[X1, X2], [-conj X2, conj X1]]` where `self = X1 + X2 j`.
    pub fn adjoint(&self) -> CMatrix {
        let (m, n) = (self.rows, self.cols);
        let mut out = CMatrix::zeros(2 * m, 2 * n);
        for r in 0..m {
            for c in 0..n {
                let (c1, c2) = self[(r, c)].parts();
                out[(r, c)] = c1;
                out[(r, n + c)] = c2;
                out[(m + r, c)] = -c2.conj();
                out[(m + r, n + c)] = c1.conj();
            }
        }
        out
    }

    /// Inverse of [`QMatrix::adjoint`]; reads the top block row.
    pub fn from_adjoint(chi: &CMatrix) -> Result<QMatrix> {
        if chi.rows() % 2 != 0 || chi.cols() % 2 != 0 {
            return Err(QdetError::DimensionMismatch(format!(
                "complex adjoint must be 2m x 2n, got {}x{}",
                chi.rows(),
                chi.cols()
            )));
        }
        let (m, n) = (chi.rows() / 2, chi.cols() / 2);
        Ok(QMatrix::from_fn(m, n, |r, c| Quaternion::from_parts(chi[(r, c)], chi[(r, n + c)])))
    }

    /// p-determinant `det chi(A)`, a nonnegative real.
    pub fn pdet(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(QdetError::NotSquare { rows: self.rows, cols: self.cols });
        }
        if self.rows == 0 {
            return Ok(1.0);
        }
        let chi = self.adjoint();
        let d = chi.det()?;
        let bound = chi.hadamard_bound().max(1.0);
        if d.im.abs() > 1e-8 * bound {
            return Err(QdetError::Internal(format!("p-determinant has imaginary part {:e}", d.im)));
        }
        if d.re < 0.0 {
            if d.re >= -1e-10 * bound {
                return Ok(0.0);
            }
            return Err(QdetError::Internal(format!("negative p-determinant {:e}", d.re)));
        }
        Ok(d.re)
    }

    /// Ratio `pdet / hadamard_bound(chi)`, a scale-free measure of invertibility in `[0, 1]`.
    pub fn pdet_ratio(&self) -> Result<f64> {
        let p = self.pdet()?;
        let h = self.adjoint().hadamard_bound();
        Ok(if h == 0.0 { 0.0 } else { p / h })
    }

    /// Inverse computed through the complex adjoint.
    pub fn inverse(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(QdetError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let chi = self.adjoint();
        let pdet = self.pdet()?;
        let h = chi.hadamard_bound();
        if h == 0.0 || pdet <= tol::get().algebraic * h {
            return Err(QdetError::Singular { pdet });
        }
        QMatrix::from_adjoint(&chi.inverse()?)
    }

    /// `[u; v] -> u - conj(v) j`, the quaternion vector whose adjoint column is `[u; v]`.
    pub fn vector_from_adjoint_column(x: &[Complex64]) -> QVector {
        let n = x.len() / 2;
        (0..n).map(|i| Quaternion::from_parts(x[i], -x[n + i].conj())).collect()
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.data[r * self.cols + c]
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QMatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QMatrixRepr { rows: self.rows, cols: self.cols, entries: self.data.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = QMatrixRepr::deserialize(d)?;
        QMatrix::from_vec(r.rows, r.cols, r.entries).map_err(serde::de::Error::custom)
    }
}
