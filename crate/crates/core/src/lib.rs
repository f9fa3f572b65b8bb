//! Linear quaternion-valued dynamic equations on time scales.

pub mod error;
pub mod io;
pub mod linalg;
mod ode;
pub mod quat;
pub mod scalar;
pub mod system;
pub mod table;
pub mod timescale;
pub mod tol;

pub use error::{QdetError, Result};
pub use io::{ProblemFile, RunReport};
pub use linalg::{CMatrix, CharPolyData, QMatrix, QVector};
pub use quat::Quaternion;
pub use scalar::ScalarProblem;
pub use system::{Method, SystemProblem};
pub use table::SolutionTable;
pub use timescale::{MatrixFunction, QFunction, TimeScaleGrid, TimeScaleSpec};
