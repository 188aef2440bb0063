//! Generalized eigendecompositions of the pencils met by the solvers.
//!
//! * [`sym_pd_geig`]: symmetric `A` against SPD `M` (space directions).
//! * [`skew_geig`]: skew-symmetric `A` against SPD `M` (stable time factors).
//! * [`nonsym_geig`]: general pencil, used for diagonalization in time.
//! * [`fast_diag_space`]: tensor-product spaces, one small pencil per direction.

mod fastdiag;
mod jacobi;
mod pencil;

pub use fastdiag::{fast_diag_space, FactorKind, KronTerm, SpaceDiagonalization};
pub use jacobi::jacobi_eigen;
pub use pencil::{nonsym_geig, skew_geig, sym_pd_geig, GeigResult, Normalization, DEFECTIVE_COND};
