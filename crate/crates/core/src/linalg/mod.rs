//! Quaternion matrices, the complex adjoint and right eigenpairs.

mod charpoly;
mod cmatrix;
mod eigen;
mod qmatrix;
pub mod roots;

pub use charpoly::{charpoly, minor_sum_oracle, CharPolyData, MINOR_ORACLE_LIMIT};
pub use cmatrix::CMatrix;
pub use eigen::{
    charpoly_roots, geometric_multiplicity, right_eigenvector, right_eigenvectors, right_independent,
    standard_eigenvalues, RANK_TOL,
};
pub use qmatrix::{QMatrix, QVector};

/// p-determinant of a square quaternion matrix.
pub fn pdet(a: &QMatrix) -> crate::Result<f64> {
    a.pdet()
}
