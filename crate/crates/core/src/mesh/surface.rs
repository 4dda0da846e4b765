use std::collections::HashMap;

use super::volume::{local_face, VolumeMesh};
use crate::error::{Error, Result};
use crate::geom::{self, Point};

/// Closed, consistently oriented triangulated surface.
///
/// When extracted from a volume mesh, `parent_vertex` maps every surface
/// vertex to its index in the volume mesh and `parent_face` records the
/// (element, local face) each triangle comes from.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    normals: Vec<Point>,
    areas: Vec<f64>,
    parent_vertex: Option<Vec<usize>>,
    parent_face: Option<Vec<(usize, u8)>>,
}

impl SurfaceMesh {
    /// Builds a surface from counter-clockwise (outward) triangles and
    /// checks that it is closed: every edge is shared by exactly two
    /// triangles traversed in opposite directions.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        Self::with_parent(vertices, triangles, None, None)
    }

    pub(crate) fn with_parent(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        parent_vertex: Option<Vec<usize>>,
        parent_face: Option<Vec<(usize, u8)>>,
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("surface has no triangles".into()));
        }
        let mut normals = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!("triangle {i} references a missing vertex")));
            }
            let a = &vertices[t[0]];
            let c = geom::cross(&geom::sub(&vertices[t[1]], a), &geom::sub(&vertices[t[2]], a));
            let n2 = geom::norm(&c);
            if n2 == 0.0 || !n2.is_finite() {
                return Err(Error::InvalidMesh(format!("triangle {i} is degenerate")));
            }
            normals.push(geom::scale(&c, 1.0 / n2));
            areas.push(0.5 * n2);
        }
        let mut directed: HashMap<(usize, usize), u32> = HashMap::with_capacity(3 * triangles.len());
        for t in &triangles {
            for j in 0..3 {
                *directed.entry((t[j], t[(j + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &directed {
            if c != 1 || directed.get(&(b, a)).copied() != Some(1) {
                return Err(Error::InvalidMesh(format!("open or inconsistently oriented surface at edge ({a}, {b})")));
            }
        }
        Ok(Self { vertices, triangles, normals, areas, parent_vertex, parent_face })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Unit normal of triangle `t` (outward for extracted boundaries).
    pub fn normal(&self, t: usize) -> Point {
        self.normals[t]
    }

    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn parent_vertex(&self) -> Option<&[usize]> {
        self.parent_vertex.as_deref()
    }

    pub fn parent_face(&self) -> Option<&[(usize, u8)]> {
        self.parent_face.as_deref()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let tri = &self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    pub fn triangle_centroid(&self, t: usize) -> Point {
        geom::centroid(&self.triangle_points(t))
    }

    pub fn triangle_diameter(&self, t: usize) -> f64 {
        let p = self.triangle_points(t);
        geom::dist(&p[0], &p[1]).max(geom::dist(&p[1], &p[2])).max(geom::dist(&p[0], &p[2]))
    }

    /// Longest edge over all triangles.
    pub fn mesh_size(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.triangle_diameter(t)).fold(0.0, f64::max)
    }

    /// Volume enclosed by the surface (positive for outward orientation).
    pub fn enclosed_volume(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| {
                let p = self.triangle_points(t);
                geom::dot(&p[0], &geom::cross(&p[1], &p[2])) / 6.0
            })
            .sum()
    }

    /// Splits every triangle into four through edge midpoints.
    /// `project` may move new vertices (e.g. onto a sphere).
    pub fn refine_uniform_with(&self, project: impl Fn(Point) -> Point) -> Result<SurfaceMesh> {
        let mut vertices = self.vertices.clone();
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point>| {
            let key = (a.min(b), a.max(b));
            *mids.entry(key).or_insert_with(|| {
                vertices.push(project(geom::midpoint(&vertices[a], &vertices[b])));
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        SurfaceMesh::new(vertices, triangles)
    }

    pub fn refine_uniform(&self) -> Result<SurfaceMesh> {
        self.refine_uniform_with(|p| p)
    }
}

/// Boundary of a volume mesh with outward normals.
///
/// Surface vertices are numbered in increasing order of their volume
/// index; triangles follow element order and local face order.
pub fn extract_boundary(mesh: &VolumeMesh) -> Result<SurfaceMesh> {
    let mut count: HashMap<[usize; 3], u32> = HashMap::with_capacity(2 * mesh.num_tets());
    for t in mesh.tets() {
        for f in 0..4 {
            let mut k = local_face(t, f);
            k.sort_unstable();
            *count.entry(k).or_insert(0) += 1;
        }
    }
    let mut faces = Vec::new();
    for (e, t) in mesh.tets().iter().enumerate() {
        for f in 0..4 {
            let face = local_face(t, f);
            let mut k = face;
            k.sort_unstable();
            if count[&k] == 1 {
                let p: Vec<Point> = face.iter().map(|&v| mesh.vertices()[v]).collect();
                let n = geom::cross(&geom::sub(&p[1], &p[0]), &geom::sub(&p[2], &p[0]));
                let out = geom::sub(&mesh.vertices()[t[f]], &p[0]);
                let tri = if geom::dot(&n, &out) > 0.0 { [face[0], face[2], face[1]] } else { face };
                faces.push(((e, f as u8), tri));
            }
        }
    }
    let mut used: Vec<usize> = faces.iter().flat_map(|(_, f)| f.iter().copied()).collect();
    used.sort_unstable();
    used.dedup();
    let mut local = vec![usize::MAX; mesh.num_vertices()];
    for (i, &v) in used.iter().enumerate() {
        local[v] = i;
    }
    let vertices = used.iter().map(|&v| mesh.vertices()[v]).collect();
    let triangles = faces.iter().map(|(_, f)| [local[f[0]], local[f[1]], local[f[2]]]).collect();
    let parents = faces.iter().map(|(p, _)| *p).collect();
    SurfaceMesh::with_parent(vertices, triangles, Some(used), Some(parents))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_open_surface() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert!(SurfaceMesh::new(v, vec![[0, 1, 2]]).is_err());
    }

    #[test]
    fn tetrahedron_surface_is_closed() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let s = SurfaceMesh::new(v, vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]).unwrap();
        assert!((s.enclosed_volume() - 1.0 / 6.0).abs() < 1e-15);
        let r = s.refine_uniform().unwrap();
        assert_eq!(r.num_triangles(), 16);
        assert!((r.total_area() - s.total_area()).abs() < 1e-14);
    }
}
