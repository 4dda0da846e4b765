use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{self, Point};

/// Conforming tetrahedral mesh with one integer region tag per element.
///
/// Elements are stored with positive orientation.
#[derive(Debug, Clone)]
pub struct VolumeMesh {
    vertices: Vec<Point>,
    tets: Vec<[usize; 4]>,
    regions: Vec<i32>,
}

impl VolumeMesh {
    /// Builds a mesh, reorienting negatively oriented elements.
    ///
    /// Rejects out-of-range indices, repeated vertices inside an element,
    /// degenerate elements, duplicate elements and faces shared by more
    /// than two elements.
    pub fn new(vertices: Vec<Point>, mut tets: Vec<[usize; 4]>, regions: Vec<i32>) -> Result<Self> {
        if tets.is_empty() {
            return Err(Error::InvalidMesh("mesh has no tetrahedra".into()));
        }
        if regions.len() != tets.len() {
            return Err(Error::DimensionMismatch { what: "region tags", expected: tets.len(), found: regions.len() });
        }
        let mut scale: f64 = 0.0;
        for v in &vertices {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
            }
            scale = scale.max(v.iter().fold(0.0f64, |m, c| m.max(c.abs())));
        }
        let mut seen = HashMap::with_capacity(tets.len());
        for (e, t) in tets.iter_mut().enumerate() {
            for &i in t.iter() {
                if i >= vertices.len() {
                    return Err(Error::InvalidMesh(format!("element {e} references vertex {i} of {}", vertices.len())));
                }
            }
            let mut key = *t;
            key.sort_unstable();
            if key.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMesh(format!("element {e} repeats a vertex")));
            }
            if let Some(prev) = seen.insert(key, e) {
                return Err(Error::InvalidMesh(format!("duplicate element: {e} repeats element {prev}")));
            }
            let vol = geom::tet_signed_volume(&vertices[t[0]], &vertices[t[1]], &vertices[t[2]], &vertices[t[3]]);
            if vol.abs() <= 1e-14 * scale.max(1e-300).powi(3) {
                return Err(Error::InvalidMesh(format!("element {e} is degenerate")));
            }
            if vol < 0.0 {
                t.swap(2, 3);
            }
        }
        let mut faces: HashMap<[usize; 3], u32> = HashMap::with_capacity(2 * tets.len());
        for t in &tets {
            for f in 0..4 {
                *faces.entry(sorted_face(t, f)).or_insert(0) += 1;
            }
        }
        if let Some((f, _)) = faces.iter().find(|(_, &c)| c > 2) {
            return Err(Error::InvalidMesh(format!(
                "non-conforming mesh: face {f:?} is shared by more than two elements"
            )));
        }
        Ok(Self { vertices, tets, regions })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn regions(&self) -> &[i32] {
        &self.regions
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn tet_points(&self, e: usize) -> [Point; 4] {
        let t = &self.tets[e];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]], self.vertices[t[3]]]
    }

    pub fn tet_volume(&self, e: usize) -> f64 {
        let p = self.tet_points(e);
        geom::tet_signed_volume(&p[0], &p[1], &p[2], &p[3])
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.num_tets()).map(|e| self.tet_volume(e)).sum()
    }

    pub fn tet_centroid(&self, e: usize) -> Point {
        geom::centroid(&self.tet_points(e))
    }

    /// Longest edge of element `e`.
    pub fn tet_diameter(&self, e: usize) -> f64 {
        let p = self.tet_points(e);
        let mut h: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                h = h.max(geom::dist(&p[i], &p[j]));
            }
        }
        h
    }
}

/// Face of `t` opposite local vertex `f`, sorted.
pub(crate) fn sorted_face(t: &[usize; 4], f: usize) -> [usize; 3] {
    let mut face = local_face(t, f);
    face.sort_unstable();
    face
}

/// Face of `t` opposite local vertex `f`, in local order.
pub(crate) fn local_face(t: &[usize; 4], f: usize) -> [usize; 3] {
    let mut face = [0; 3];
    let mut k = 0;
    for (i, &v) in t.iter().enumerate() {
        if i != f {
            face[k] = v;
            k += 1;
        }
    }
    face
}

/// Mesh size: the longest edge over all elements.
pub fn mesh_size(mesh: &VolumeMesh) -> f64 {
    (0..mesh.num_tets()).map(|e| mesh.tet_diameter(e)).fold(0.0, f64::max)
}
