//! Time scales, grids on a window, and delta calculus on them.

mod calculus;
mod function;
mod grid;
mod spec;

pub use calculus::{
    cumulative_integral, delta_derivative, delta_integral, delta_integral_fn, derivative_at_nodes, running_integral,
};
pub use function::{MatrixFunction, QFunction};
pub use grid::{Node, NodeKind, TimeScaleGrid, DEFAULT_SUBSTEP};
pub use spec::TimeScaleSpec;
