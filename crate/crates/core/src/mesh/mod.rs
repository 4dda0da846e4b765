//! Tetrahedral volume meshes, their boundary surfaces, generators and readers.

mod generate;
mod gmsh;
mod refine;
mod surface;
mod volume;

pub use generate::{cube_mesh, icosphere, tensor_grid_mesh};
pub use gmsh::{load_gmsh, parse_gmsh};
pub use refine::refine_uniform;
pub use surface::{extract_boundary, SurfaceMesh};
pub use volume::{mesh_size, VolumeMesh};
