//! Space-time solvers for `A = A_t ⊗ M_s + M_t ⊗ A_s`.
//!
//! Every method diagonalizes space with [`SpaceDiagonalization`](crate::eigen::SpaceDiagonalization)
//! and differs only in how the `N_s` shifted time blocks `A_t + λ_i M_t` are
//! transformed and solved:
//!
//! | method | time basis `U_t` | block solve |
//! |--------|------------------|-------------|
//! | DT | eigenvectors of `(A_t, M_t)` | pointwise division |
//! | LU | identity | banded LU |
//! | AR | `M_t`-orthonormal arrowhead basis | arrowhead LU |
//! | LR | eigenvectors of the skew part | Sherman-Morrison-Woodbury |
//!
//! Vectors are time-outer: entry `j * N_s + i` holds time dof `j` and space dof `i`.

mod arrowhead;
mod lowrank;
mod operator;
mod plan;

pub use arrowhead::{arrowhead_block_solve, ArrowheadBlock, ArrowheadFactors};
pub use lowrank::{smw_block_solve, smw_capacitance, LowRank, LowRankFactors, SmwBlock};
pub use operator::{residual, LinearOperator, SpaceMatrices, SpaceTimeOperator};
pub use plan::{plan, ApplyOps, Method, PlanOptions, SetupOps, SolverPlan};
