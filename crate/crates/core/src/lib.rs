//! Space-time solvers for the heat equation built on Kronecker structure.
//!
//! The space-time matrix is `A_t ⊗ M_s + M_t ⊗ A_s` with time as the outer
//! index. [`solvers::plan`] factors the time pencil one of four ways
//! ([`solvers::Method`]) and the space pencil by fast diagonalization, and
//! the resulting [`solvers::SolverPlan`] applies the inverse. [`krylov`]
//! reuses such plans as GMRES preconditioners on mapped domains.

// Negated comparisons deliberately reject NaN; index loops mirror the algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod eigen;
pub mod error;
pub mod krylov;
pub mod problem;
pub mod solvers;
pub mod spline;
pub mod tensor;

pub use error::{Error, Result};
