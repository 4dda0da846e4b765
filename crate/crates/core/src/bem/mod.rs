//! Boundary element spaces, Helmholtz layer operators and potentials.

mod assembly;
mod calderon;
mod kernel;
mod potentials;
mod singular;
mod spaces;

pub use assembly::{
    apply_to_function, assemble_adjoint_double_layer, assemble_blocks, assemble_blocks_with_function,
    assemble_combined, assemble_double_layer, assemble_hypersingular, assemble_operator_set, assemble_single_layer,
    BemOperatorSet, BemOptions, BlockSpec, BlocksAndLoads, CombinedOperators, FunctionSpec, OperatorKind,
};
pub use calderon::{calderon_residual, calderon_residuals, CalderonResidual};
pub use kernel::green_kernel;
pub use potentials::{jump_errors, Density, JumpErrors, PotentialEvaluator, PotentialValue};
pub use singular::{barycentric, panel_quadrature, PairClass, PairRule};
pub use spaces::{BoundarySpace, Panel, TraceSpaces, MAX_W, MAX_Z};
