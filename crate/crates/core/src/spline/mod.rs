//! B-spline spaces on intervals and the one-dimensional matrices built on them.

pub(crate) mod assembly;
mod basis;
mod fd;
mod quadrature;

pub use assembly::{assemble_1d, assemble_load, MatrixKind};
pub use basis::{bspline_eval, BasisValues, Constraint, SplineSpace};
pub use fd::{fd_time_operator, PartitionRule, TimePartition};
pub use quadrature::gauss_legendre;
