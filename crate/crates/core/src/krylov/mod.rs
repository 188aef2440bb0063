//! Mapped geometries, isoparametric assembly and GMRES preconditioned by the
//! parametric-domain operator `Â = A_t ⊗ M̂_s + M_t ⊗ Â_s`.

mod geometry;
mod gmres;
mod manufactured;
mod mapped;

pub use geometry::GeometryMap;
pub use gmres::{gmres, precondition_apply, GmresResult};
pub use manufactured::{manufactured_problem, ExactSolution, ManufacturedProblem};
pub use mapped::{assemble_mapped, assemble_mapped_full, MappedSpaceMatrices};
