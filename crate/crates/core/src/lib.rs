//! Three-field FEM-BEM mortar coupling for the Helmholtz transmission
//! problem in three dimensions.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bem;
pub mod coupling;
pub mod error;
pub mod fem;
pub mod geom;
pub mod lagrange;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
