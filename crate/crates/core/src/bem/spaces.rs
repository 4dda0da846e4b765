use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::lagrange::SimplexLagrange;
use crate::linalg::CsrMatrix;
use crate::mesh::SurfaceMesh;
use crate::quadrature::{points_for_order, triangle_rule};
use crate::C64;

/// Largest number of local basis functions of the surface spaces
/// (degree 3 continuous elements).
pub const MAX_Z: usize = 10;
/// Largest number of local discontinuous basis functions (degree 2).
pub const MAX_W: usize = 6;

/// Geometry of one flat panel.
#[derive(Debug, Clone)]
pub struct Panel {
    pub points: [Point; 3],
    pub normal: Point,
    pub area: f64,
    pub centroid: Point,
    pub diameter: f64,
    /// Surface gradients of the reference coordinates `xi_1`, `xi_2`.
    pub grad_ref: [Point; 2],
}

impl Panel {
    fn new(points: [Point; 3], normal: Point, area: f64) -> Self {
        let e1 = geom::sub(&points[1], &points[0]);
        let e2 = geom::sub(&points[2], &points[0]);
        let (g11, g12, g22) = (geom::dot(&e1, &e1), geom::dot(&e1, &e2), geom::dot(&e2, &e2));
        let det = g11 * g22 - g12 * g12;
        let grad_ref = [
            geom::scale(&geom::sub(&geom::scale(&e1, g22), &geom::scale(&e2, g12)), 1.0 / det),
            geom::scale(&geom::sub(&geom::scale(&e2, g11), &geom::scale(&e1, g12)), 1.0 / det),
        ];
        let diameter = geom::dist(&points[0], &points[1])
            .max(geom::dist(&points[1], &points[2]))
            .max(geom::dist(&points[0], &points[2]));
        Self { centroid: geom::centroid(&points), points, normal, area, diameter, grad_ref }
    }

    /// Physical point at reference coordinates `(xi_1, xi_2)`.
    pub fn map(&self, xi: &[f64; 2]) -> Point {
        let l0 = 1.0 - xi[0] - xi[1];
        let p = &self.points;
        [0, 1, 2].map(|d| l0 * p[0][d] + xi[0] * p[1][d] + xi[1] * p[2][d])
    }

    /// Reference coordinates of a point in the panel plane.
    pub fn local_coords(&self, x: &Point) -> [f64; 2] {
        let r = geom::sub(x, &self.points[0]);
        [geom::dot(&self.grad_ref[0], &r), geom::dot(&self.grad_ref[1], &r)]
    }
}

/// Boundary spaces on a closed surface: `W_h` (discontinuous, degree
/// `p - 1`) for the mortar variable and `Z_h` (continuous, degree `p`) for
/// the exterior trace.
#[derive(Debug, Clone)]
pub struct TraceSpaces {
    surface: Arc<SurfaceMesh>,
    degree: usize,
    z_el: SimplexLagrange<2>,
    w_el: SimplexLagrange<2>,
    z_dofs: Vec<usize>,
    z_points: Vec<Point>,
    panels: Vec<Panel>,
}

impl TraceSpaces {
    pub fn new(surface: Arc<SurfaceMesh>, degree: usize) -> Result<Self> {
        if !(1..=3).contains(&degree) {
            return Err(Error::Unsupported(format!("boundary degree {degree} (supported: 1, 2, 3)")));
        }
        let z_el = SimplexLagrange::<2>::new(degree)?;
        let w_el = SimplexLagrange::<2>::new(degree - 1)?;
        let nz = z_el.num_basis();
        let mut keys: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
        let mut z_dofs = Vec::with_capacity(nz * surface.num_triangles());
        let mut z_points = Vec::new();
        let mut panels = Vec::with_capacity(surface.num_triangles());
        for (t, tri) in surface.triangles().iter().enumerate() {
            let panel = Panel::new(surface.triangle_points(t), surface.normal(t), surface.area(t));
            for a in 0..nz {
                let next = keys.len();
                let id = *keys.entry(z_el.node_key(a, tri)).or_insert(next);
                if id == next {
                    z_points.push(panel.map(&z_el.node_point(a)));
                }
                z_dofs.push(id);
            }
            panels.push(panel);
        }
        Ok(Self { surface, degree, z_el, w_el, z_dofs, z_points, panels })
    }

    pub fn surface(&self) -> &Arc<SurfaceMesh> {
        &self.surface
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn z_element(&self) -> &SimplexLagrange<2> {
        &self.z_el
    }

    pub fn w_element(&self) -> &SimplexLagrange<2> {
        &self.w_el
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn num_panels(&self) -> usize {
        self.panels.len()
    }

    pub fn nz_local(&self) -> usize {
        self.z_el.num_basis()
    }

    pub fn nw_local(&self) -> usize {
        self.w_el.num_basis()
    }

    pub fn dim_z(&self) -> usize {
        self.z_points.len()
    }

    pub fn dim_w(&self) -> usize {
        self.panels.len() * self.nw_local()
    }

    /// Global `Z_h` dofs of panel `t`.
    pub fn z_dofs(&self, t: usize) -> &[usize] {
        let n = self.nz_local();
        &self.z_dofs[t * n..(t + 1) * n]
    }

    /// Global index of local `W_h` function `a` on panel `t`.
    pub fn w_dof(&self, t: usize, a: usize) -> usize {
        t * self.nw_local() + a
    }

    pub fn z_points(&self) -> &[Point] {
        &self.z_points
    }

    /// Nodal interpolant in `Z_h`.
    pub fn interpolate_z(&self, f: impl Fn(&Point) -> C64) -> Vec<C64> {
        self.z_points.iter().map(f).collect()
    }

    /// L²-orthogonal projection onto `W_h`; `f` receives the point and the
    /// panel index (for data that depends on the panel normal).
    pub fn project_w(&self, f: impl Fn(&Point, usize) -> C64) -> Result<Vec<C64>> {
        let nw = self.nw_local();
        let rule = triangle_rule(points_for_order(2 * self.degree + 2))?;
        let mut vals = vec![vec![0.0; nw]; rule.points.len()];
        let mut mass = vec![vec![0.0; nw]; nw];
        for (q, xi) in rule.points.iter().enumerate() {
            self.w_el.eval(xi, &mut vals[q]);
            for a in 0..nw {
                for b in 0..nw {
                    mass[a][b] += rule.weights[q] * vals[q][a] * vals[q][b];
                }
            }
        }
        let chol = cholesky(&mass);
        let mut out = vec![C64::new(0.0, 0.0); self.dim_w()];
        for (t, panel) in self.panels.iter().enumerate() {
            let mut rhs = vec![C64::new(0.0, 0.0); nw];
            for (q, xi) in rule.points.iter().enumerate() {
                let fx = f(&panel.map(xi), t) * rule.weights[q];
                for a in 0..nw {
                    rhs[a] += fx * vals[q][a];
                }
            }
            let c = cholesky_solve(&chol, &rhs);
            out[t * nw..(t + 1) * nw].copy_from_slice(&c);
        }
        Ok(out)
    }

    /// Load vector `<f, φ_i>` over the chosen space with a triangle rule
    /// exact to degree `order`; `f` receives the point and the panel index.
    pub fn load(&self, space: BoundarySpace, f: impl Fn(&Point, usize) -> C64, order: usize) -> Result<Vec<C64>> {
        let rule = triangle_rule(points_for_order(order))?;
        let n = self.nloc(space);
        let mut vals = vec![vec![0.0; n]; rule.points.len()];
        for (q, xi) in rule.points.iter().enumerate() {
            self.eval(space, xi, &mut vals[q]);
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim(space)];
        for (t, panel) in self.panels.iter().enumerate() {
            let jac = 2.0 * panel.area;
            for (q, xi) in rule.points.iter().enumerate() {
                let fx = f(&panel.map(xi), t) * (rule.weights[q] * jac);
                for a in 0..n {
                    out[self.dof(space, t, a)] += fx * vals[q][a];
                }
            }
        }
        Ok(out)
    }

    /// Surface mass matrix `<test, trial>` between the chosen spaces,
    /// integrated exactly.
    pub fn mass(&self, test: BoundarySpace, trial: BoundarySpace) -> Result<CsrMatrix> {
        let rule = triangle_rule(points_for_order(2 * self.degree))?;
        let (nt, ns) = (self.nloc(test), self.nloc(trial));
        let mut local = vec![0.0; nt * ns];
        let (mut vt, mut vs) = (vec![0.0; nt], vec![0.0; ns]);
        for (xi, w) in rule.points.iter().zip(&rule.weights) {
            self.eval(test, xi, &mut vt);
            self.eval(trial, xi, &mut vs);
            for a in 0..nt {
                for b in 0..ns {
                    local[a * ns + b] += w * vt[a] * vs[b];
                }
            }
        }
        let mut trip = Vec::with_capacity(self.num_panels() * nt * ns);
        for (t, panel) in self.panels.iter().enumerate() {
            let jac = 2.0 * panel.area;
            for a in 0..nt {
                for b in 0..ns {
                    trip.push((self.dof(test, t, a), self.dof(trial, t, b), C64::new(jac * local[a * ns + b], 0.0)));
                }
            }
        }
        Ok(CsrMatrix::from_triplets(self.dim(test), self.dim(trial), trip))
    }

    /// Value of a discrete function of `space` at reference point `xi` of
    /// panel `t`.
    pub fn eval_function(&self, space: BoundarySpace, coeffs: &[C64], t: usize, xi: &[f64; 2]) -> C64 {
        let n = self.nloc(space);
        let mut v = [0.0; MAX_Z];
        self.eval(space, xi, &mut v[..n]);
        (0..n).map(|a| coeffs[self.dof(space, t, a)] * v[a]).sum()
    }

    pub fn dim(&self, s: BoundarySpace) -> usize {
        match s {
            BoundarySpace::W => self.dim_w(),
            BoundarySpace::Z => self.dim_z(),
        }
    }

    pub fn nloc(&self, s: BoundarySpace) -> usize {
        match s {
            BoundarySpace::W => self.nw_local(),
            BoundarySpace::Z => self.nz_local(),
        }
    }

    pub fn dof(&self, s: BoundarySpace, t: usize, a: usize) -> usize {
        match s {
            BoundarySpace::W => self.w_dof(t, a),
            BoundarySpace::Z => self.z_dofs(t)[a],
        }
    }

    pub fn eval(&self, s: BoundarySpace, xi: &[f64; 2], out: &mut [f64]) {
        match s {
            BoundarySpace::W => self.w_el.eval(xi, out),
            BoundarySpace::Z => self.z_el.eval(xi, out),
        }
    }
}

/// Which boundary space a matrix row or column belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundarySpace {
    /// Discontinuous degree `p - 1` (mortar variable).
    W,
    /// Continuous degree `p` (exterior trace).
    Z,
}

fn cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            l[i][j] = if i == j { s.sqrt() } else { s / l[j][j] };
        }
    }
    l
}

fn cholesky_solve(l: &[Vec<f64>], b: &[C64]) -> Vec<C64> {
    let n = l.len();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] = y[i] - y[k] * l[i][k];
        }
        y[i] /= l[i][i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] = y[i] - y[k] * l[k][i];
        }
        y[i] /= l[i][i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{cube_mesh, extract_boundary};

    fn cube_surface(n: usize) -> Arc<SurfaceMesh> {
        Arc::new(extract_boundary(&cube_mesh(1.0, n).unwrap()).unwrap())
    }

    #[test]
    fn dimensions() {
        let s = cube_surface(1);
        let p1 = TraceSpaces::new(s.clone(), 1).unwrap();
        assert_eq!((p1.dim_w(), p1.dim_z()), (12, 8));
        let p2 = TraceSpaces::new(s.clone(), 2).unwrap();
        assert_eq!(p2.dim_w(), 36);
        // 8 vertices + 18 edges.
        assert_eq!(p2.dim_z(), 26);
        assert!(TraceSpaces::new(s, 4).is_err());
    }

    #[test]
    fn constants_are_exact_in_z() {
        let sp = TraceSpaces::new(cube_surface(2), 3).unwrap();
        let one = sp.interpolate_z(|_| C64::new(1.0, 0.0));
        for t in 0..sp.num_panels() {
            let v = sp.eval_function(BoundarySpace::Z, &one, t, &[0.23, 0.41]);
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn projection_reproduces_piecewise_polynomials() {
        let sp = TraceSpaces::new(cube_surface(1), 3).unwrap();
        let f = |x: &Point, _: usize| C64::new(x[0] * x[1] - 0.3 * x[2], x[2] * x[2]);
        let c = sp.project_w(f).unwrap();
        for t in 0..sp.num_panels() {
            let xi = [0.17, 0.52];
            let v = sp.eval_function(BoundarySpace::W, &c, t, &xi);
            assert!((v - f(&sp.panels()[t].map(&xi), t)).norm() < 1e-12);
        }
    }

    #[test]
    fn mass_total_is_area_and_transpose_consistent() {
        let sp = TraceSpaces::new(cube_surface(2), 2).unwrap();
        let m = sp.mass(BoundarySpace::W, BoundarySpace::Z).unwrap();
        let mt = sp.mass(BoundarySpace::Z, BoundarySpace::W).unwrap();
        let diff = CsrMatrix::combine(&[(C64::new(1.0, 0.0), &m.transpose()), (C64::new(-1.0, 0.0), &mt)]);
        assert!(diff.frobenius_norm() <= 1e-15 * mt.frobenius_norm());
        let total: C64 = m.iter().map(|(_, _, v)| v).sum();
        // Both bases sum to one.
        assert!((total.re - 6.0).abs() < 1e-12);
    }

    #[test]
    fn surface_gradient_of_reference_coordinates() {
        let sp = TraceSpaces::new(cube_surface(1), 1).unwrap();
        for p in sp.panels() {
            for (i, g) in p.grad_ref.iter().enumerate() {
                assert!(geom::dot(g, &p.normal).abs() < 1e-14);
                for j in 0..2 {
                    let e = geom::sub(&p.points[j + 1], &p.points[0]);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((geom::dot(g, &e) - want).abs() < 1e-14);
                }
            }
        }
    }
}
