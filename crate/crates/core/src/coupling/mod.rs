//! The coupled three-field system: manufactured cases, block assembly with
//! jump data, and the matrix of the underlying sesquilinear form.

mod cases;
mod system;

pub use cases::{point_source, CaseDomain, Field, FieldSample, ManufacturedCase, Source};
pub use system::{
    assemble_block_system, assemble_t_matrix, jump_rhs, trace_dofs, BlockSystem, CouplingOptions, SystemDims, TMatrix,
};
