use super::surface::SurfaceMesh;
use super::volume::VolumeMesh;
use crate::error::{Error, Result};
use crate::geom::{self, Point};

/// Axis-aligned cube of edge `side` centred at the origin, split into
/// `n^3` sub-cubes of six tetrahedra each. All elements get region 0.
pub fn cube_mesh(side: f64, n: usize) -> Result<VolumeMesh> {
    if n == 0 || !(side > 0.0) {
        return Err(Error::InvalidArgument(format!("cube_mesh needs n >= 1 and side > 0 (n = {n}, side = {side})")));
    }
    let breaks: Vec<f64> = (0..=n).map(|i| side * (i as f64 / n as f64 - 0.5)).collect();
    tensor_grid_mesh(&breaks, |_| 0)
}

/// Tensor grid with the same `breaks` along each axis. Every cell is split
/// into six tetrahedra sharing its main diagonal, which keeps the mesh
/// conforming. `region` receives the cell centre.
pub fn tensor_grid_mesh(breaks: &[f64], region: impl Fn(Point) -> i32) -> Result<VolumeMesh> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("grid breaks must be strictly increasing with at least two entries".into()));
    }
    let m = breaks.len();
    let idx = |i: usize, j: usize, k: usize| (k * m + j) * m + i;
    let mut vertices = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                vertices.push([breaks[i], breaks[j], breaks[k]]);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::with_capacity(6 * (m - 1).pow(3));
    let mut regions = Vec::with_capacity(tets.capacity());
    for k in 0..m - 1 {
        for j in 0..m - 1 {
            for i in 0..m - 1 {
                let centre = [
                    0.5 * (breaks[i] + breaks[i + 1]),
                    0.5 * (breaks[j] + breaks[j + 1]),
                    0.5 * (breaks[k] + breaks[k + 1]),
                ];
                let r = region(centre);
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut t = [idx(c[0], c[1], c[2]), 0, 0, 0];
                    for (s, &axis) in perm.iter().enumerate() {
                        c[axis] += 1;
                        t[s + 1] = idx(c[0], c[1], c[2]);
                    }
                    let p: Vec<Point> = t.iter().map(|&v| vertices[v]).collect();
                    if geom::tet_signed_volume(&p[0], &p[1], &p[2], &p[3]) < 0.0 {
                        t.swap(2, 3);
                    }
                    tets.push(t);
                    regions.push(r);
                }
            }
        }
    }
    VolumeMesh::new(vertices, tets, regions)
}

/// Triangulated sphere: a projected icosahedron refined `subdivisions`
/// times, with vertices on the sphere of the given radius.
pub fn icosphere(radius: f64, subdivisions: usize) -> Result<SurfaceMesh> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument("icosphere radius must be positive".into()));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let project = |p: Point| geom::scale(&p, radius / geom::norm(&p));
    let vertices: Vec<Point> = raw.iter().map(|&p| project(p)).collect();
    let triangles = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let mut s = SurfaceMesh::new(vertices, triangles)?;
    for _ in 0..subdivisions {
        s = s.refine_uniform_with(project)?;
    }
    Ok(s)
}
