//! Continuous Lagrange finite elements on tetrahedra.

mod assemble;
mod coefficients;
mod space;

pub use assemble::{assemble_interior, assemble_load, InteriorMatrices};
pub(crate) use coefficients::map_point;
pub use coefficients::MediumCoefficients;
pub use space::FeSpace;
