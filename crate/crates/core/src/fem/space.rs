use std::collections::HashMap;
use std::sync::Arc;

use super::coefficients::map_point;
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::lagrange::SimplexLagrange;
use crate::mesh::{extract_boundary, SurfaceMesh, VolumeMesh};

type NodeKey = Vec<(usize, usize)>;

/// Continuous piecewise polynomials of degree `p` on a tetrahedral mesh,
/// with the trace connectivity onto the boundary surface.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Arc<VolumeMesh>,
    surface: Arc<SurfaceMesh>,
    element: SimplexLagrange<3>,
    face_element: SimplexLagrange<2>,
    cell_dofs: Vec<usize>,
    dof_points: Vec<Point>,
    face_dofs: Vec<usize>,
    boundary_dofs: Vec<usize>,
    boundary_vertex: Vec<bool>,
}

impl FeSpace {
    pub fn new(mesh: Arc<VolumeMesh>, degree: usize) -> Result<Self> {
        if !(1..=3).contains(&degree) {
            return Err(Error::Unsupported(format!("volume degree {degree} (supported: 1, 2, 3)")));
        }
        let element = SimplexLagrange::<3>::new(degree)?;
        let face_element = SimplexLagrange::<2>::new(degree)?;
        let nloc = element.num_basis();
        let mut keys: HashMap<NodeKey, usize> = HashMap::new();
        let mut cell_dofs = Vec::with_capacity(nloc * mesh.num_tets());
        let mut dof_points = Vec::new();
        for (e, t) in mesh.tets().iter().enumerate() {
            let p = mesh.tet_points(e);
            for a in 0..nloc {
                let key = element.node_key(a, t);
                let next = keys.len();
                let id = *keys.entry(key).or_insert(next);
                if id == next {
                    dof_points.push(map_point(&p, &element.node_point(a)));
                }
                cell_dofs.push(id);
            }
        }
        let surface = Arc::new(extract_boundary(&mesh)?);
        let parent = surface.parent_vertex().expect("extracted boundary has parents");
        let nf = face_element.num_basis();
        let mut face_dofs = Vec::with_capacity(nf * surface.num_triangles());
        for tri in surface.triangles() {
            let verts = [parent[tri[0]], parent[tri[1]], parent[tri[2]]];
            for a in 0..nf {
                let key = face_element.node_key(a, &verts);
                face_dofs.push(
                    *keys
                        .get(&key)
                        .ok_or_else(|| Error::InvalidMesh("boundary node missing from volume space".into()))?,
                );
            }
        }
        let mut boundary_dofs = face_dofs.clone();
        boundary_dofs.sort_unstable();
        boundary_dofs.dedup();
        let mut boundary_vertex = vec![false; mesh.num_vertices()];
        for &v in parent {
            boundary_vertex[v] = true;
        }
        Ok(Self {
            mesh,
            surface,
            element,
            face_element,
            cell_dofs,
            dof_points,
            face_dofs,
            boundary_dofs,
            boundary_vertex,
        })
    }

    pub fn mesh(&self) -> &Arc<VolumeMesh> {
        &self.mesh
    }

    /// Boundary surface with outward normals.
    pub fn surface(&self) -> &Arc<SurfaceMesh> {
        &self.surface
    }

    pub fn degree(&self) -> usize {
        self.element.degree()
    }

    pub fn element(&self) -> &SimplexLagrange<3> {
        &self.element
    }

    pub fn face_element(&self) -> &SimplexLagrange<2> {
        &self.face_element
    }

    pub fn num_dofs(&self) -> usize {
        self.dof_points.len()
    }

    pub fn local_dofs(&self) -> usize {
        self.element.num_basis()
    }

    /// Global dofs of element `e`, in local node order.
    pub fn cell_dofs(&self, e: usize) -> &[usize] {
        let n = self.local_dofs();
        &self.cell_dofs[e * n..(e + 1) * n]
    }

    /// Global dofs of the nodes of boundary triangle `t`, in the node order
    /// of the surface element.
    pub fn face_dofs(&self, t: usize) -> &[usize] {
        let n = self.face_element.num_basis();
        &self.face_dofs[t * n..(t + 1) * n]
    }

    pub fn dof_points(&self) -> &[Point] {
        &self.dof_points
    }

    /// Sorted list of dofs on the boundary.
    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn boundary_vertex_mask(&self) -> &[bool] {
        &self.boundary_vertex
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate<T: Copy>(&self, f: impl Fn(&Point) -> T) -> Vec<T> {
        self.dof_points.iter().map(f).collect()
    }

    /// Inverse-transpose Jacobian and determinant of element `e`.
    pub(crate) fn jacobian(&self, e: usize) -> ([Point; 3], f64) {
        let p = self.mesh.tet_points(e);
        geom::inverse_transpose(&geom::sub(&p[1], &p[0]), &geom::sub(&p[2], &p[0]), &geom::sub(&p[3], &p[0]))
    }
}
