use super::coefficients::{map_point, MediumCoefficients};
use super::space::FeSpace;
use crate::error::Result;
use crate::geom::Point;
use crate::linalg::CsrMatrix;
use crate::quadrature::{points_for_order, tet_rule, triangle_rule};
use crate::C64;

/// Stiffness `(A grad u, grad v)`, mass `((k n)^2 u, v)` and boundary mass
/// `(u, v)_Γ` of a finite element space.
#[derive(Debug, Clone)]
pub struct InteriorMatrices {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub robin: CsrMatrix,
    pub k: f64,
}

impl InteriorMatrices {
    /// Impedance block `S - M + i k R`.
    pub fn impedance_block(&self) -> CsrMatrix {
        let one = C64::new(1.0, 0.0);
        CsrMatrix::combine(&[(one, &self.stiffness), (-one, &self.mass), (C64::new(0.0, self.k), &self.robin)])
    }
}

/// Assembles the interior matrices with quadrature of order `2p`.
pub fn assemble_interior(space: &FeSpace, coeffs: &MediumCoefficients) -> Result<InteriorMatrices> {
    let p = space.degree();
    let mesh = space.mesh();
    coeffs.validate(mesh, space.boundary_vertex_mask(), 2 * p)?;
    let rule = tet_rule(points_for_order(2 * p))?;
    let el = space.element();
    let nloc = el.num_basis();
    let mut vals = vec![vec![0.0; nloc]; rule.points.len()];
    let mut grads = vec![vec![[0.0; 3]; nloc]; rule.points.len()];
    for (q, xi) in rule.points.iter().enumerate() {
        el.eval(xi, &mut vals[q]);
        el.grad(xi, &mut grads[q]);
    }
    let k2 = coeffs.k * coeffs.k;
    let mut s_trip = Vec::with_capacity(mesh.num_tets() * nloc * nloc);
    let mut m_trip = Vec::with_capacity(mesh.num_tets() * nloc * nloc);
    let mut phys = vec![[0.0; 3]; nloc];
    for e in 0..mesh.num_tets() {
        let pts = mesh.tet_points(e);
        let reg = mesh.regions()[e];
        let (jit, det) = space.jacobian(e);
        let dofs = space.cell_dofs(e);
        let mut s_loc = vec![0.0; nloc * nloc];
        let mut m_loc = vec![C64::new(0.0, 0.0); nloc * nloc];
        for (q, xi) in rule.points.iter().enumerate() {
            let x = map_point(&pts, xi);
            let w = rule.weights[q] * det.abs();
            let a = coeffs.diffusion(&x, reg);
            let n = coeffs.refraction(&x, reg);
            let mw = n * n * (k2 * w);
            for (g, gr) in phys.iter_mut().zip(&grads[q]) {
                for r in 0..3 {
                    g[r] = jit[r][0] * gr[0] + jit[r][1] * gr[1] + jit[r][2] * gr[2];
                }
            }
            for i in 0..nloc {
                for j in 0..nloc {
                    let gg = phys[i][0] * phys[j][0] + phys[i][1] * phys[j][1] + phys[i][2] * phys[j][2];
                    s_loc[i * nloc + j] += w * a * gg;
                    m_loc[i * nloc + j] += mw * (vals[q][i] * vals[q][j]);
                }
            }
        }
        for i in 0..nloc {
            for j in 0..nloc {
                s_trip.push((dofs[i], dofs[j], C64::new(s_loc[i * nloc + j], 0.0)));
                m_trip.push((dofs[i], dofs[j], m_loc[i * nloc + j]));
            }
        }
    }
    let n = space.num_dofs();
    Ok(InteriorMatrices {
        stiffness: CsrMatrix::from_triplets(n, n, s_trip),
        mass: CsrMatrix::from_triplets(n, n, m_trip),
        robin: boundary_mass(space)?,
        k: coeffs.k,
    })
}

/// `(u, v)_Γ` on the trace of the space, order `2p` triangle quadrature.
fn boundary_mass(space: &FeSpace) -> Result<CsrMatrix> {
    let p = space.degree();
    let rule = triangle_rule(points_for_order(2 * p))?;
    let el = space.face_element();
    let nf = el.num_basis();
    let mut local = vec![0.0; nf * nf];
    let mut v = vec![0.0; nf];
    for (xi, w) in rule.points.iter().zip(&rule.weights) {
        el.eval(xi, &mut v);
        for i in 0..nf {
            for j in 0..nf {
                local[i * nf + j] += w * v[i] * v[j];
            }
        }
    }
    let surf = space.surface();
    let mut trip = Vec::with_capacity(surf.num_triangles() * nf * nf);
    for t in 0..surf.num_triangles() {
        let jac = 2.0 * surf.area(t);
        let dofs = space.face_dofs(t);
        for i in 0..nf {
            for j in 0..nf {
                trip.push((dofs[i], dofs[j], C64::new(jac * local[i * nf + j], 0.0)));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(space.num_dofs(), space.num_dofs(), trip))
}

/// Load vector `(f, φ_i)` with a tetrahedral rule exact to degree `order`.
/// `f` receives the point and the element's region tag.
pub fn assemble_load(space: &FeSpace, f: impl Fn(&Point, i32) -> C64, order: usize) -> Result<Vec<C64>> {
    let rule = tet_rule(points_for_order(order))?;
    let el = space.element();
    let nloc = el.num_basis();
    let mut vals = vec![vec![0.0; nloc]; rule.points.len()];
    for (q, xi) in rule.points.iter().enumerate() {
        el.eval(xi, &mut vals[q]);
    }
    let mesh = space.mesh();
    let mut out = vec![C64::new(0.0, 0.0); space.num_dofs()];
    for e in 0..mesh.num_tets() {
        let pts = mesh.tet_points(e);
        let reg = mesh.regions()[e];
        let det = space.jacobian(e).1.abs();
        let dofs = space.cell_dofs(e);
        for (q, xi) in rule.points.iter().enumerate() {
            let fx = f(&map_point(&pts, xi), reg) * (rule.weights[q] * det);
            for i in 0..nloc {
                out[dofs[i]] += fx * vals[q][i];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::{cube_mesh, VolumeMesh};

    fn tet(scale: f64) -> Arc<VolumeMesh> {
        Arc::new(
            VolumeMesh::new(
                vec![[0.0, 0.0, 0.0], [scale, 0.0, 0.0], [0.0, scale, 0.0], [0.1, 0.2, scale]],
                vec![[0, 1, 2, 3]],
                vec![0],
            )
            .unwrap(),
        )
    }

    #[test]
    fn p1_mass_matches_closed_form() {
        let mesh = tet(1.3);
        let vol = mesh.tet_volume(0);
        let s = FeSpace::new(mesh, 1).unwrap();
        let m = assemble_interior(&s, &MediumCoefficients::homogeneous(1.0)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { vol / 10.0 } else { vol / 20.0 };
                assert!((m.mass.get(i, j).re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn stiffness_annihilates_constants_and_reproduces_energy() {
        let s = FeSpace::new(Arc::new(cube_mesh(1.0, 2).unwrap()), 2).unwrap();
        let m = assemble_interior(&s, &MediumCoefficients::homogeneous(0.0)).unwrap();
        let ones = vec![C64::new(1.0, 0.0); s.num_dofs()];
        assert!(crate::linalg::norm2(&m.stiffness.matvec(&ones)) < 1e-12);
        // u = x^2 + y z on the unit cube: ∫|∇u|² = ∫ 4x² + z² + y² = 4/12 + 2/12.
        let u: Vec<C64> = s.interpolate(|x| C64::new(x[0] * x[0] + x[1] * x[2], 0.0));
        let su = m.stiffness.matvec(&u);
        let e: C64 = su.iter().zip(&u).map(|(a, b)| a * b.conj()).sum();
        assert!((e.re - 0.5).abs() < 1e-12);
        // Robin lives on the boundary only and integrates 1 to the area.
        let r1 = m.robin.matvec(&ones);
        let area: C64 = r1.iter().sum();
        assert!((area.re - 6.0).abs() < 1e-12);
        for d in 0..s.num_dofs() {
            if !s.boundary_dofs().contains(&d) {
                assert_eq!(r1[d], C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn unit_load_on_reference_tet() {
        let mesh = Arc::new(
            VolumeMesh::new(
                vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                vec![[0, 1, 2, 3]],
                vec![0],
            )
            .unwrap(),
        );
        let s = FeSpace::new(mesh, 1).unwrap();
        let b = assemble_load(&s, |_, _| C64::new(1.0, 0.0), 2).unwrap();
        for v in b {
            assert!((v.re - 1.0 / 24.0).abs() < 1e-16);
        }
        let z = assemble_load(&s, |_, _| C64::new(0.0, 0.0), 2).unwrap();
        assert!(z.iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn boundary_coefficient_violation_is_located() {
        let mesh = Arc::new(cube_mesh(1.0, 2).unwrap());
        let s = FeSpace::new(mesh, 1).unwrap();
        let c = MediumCoefficients::new(1.0, |_, _| 2.0, |_, _| C64::new(1.0, 0.0), (1.0, 2.0), 1.0);
        let err = assemble_interior(&s, &c).unwrap_err();
        assert!(matches!(err, crate::Error::Coefficient { .. }), "{err}");
    }
}
