use std::fmt;

use crate::bem::{BoundarySpace, TraceSpaces};
use crate::coupling::ManufacturedCase;
use crate::error::{Error, Result};
use crate::fem::{map_point, FeSpace};
use crate::mesh::mesh_size;
use crate::quadrature::{points_for_order, tet_rule, triangle_rule};
use crate::solver::{SolutionTriple, SolverStats};
use crate::C64;

/// The four reported error quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorQuantity {
    /// `|u - u_h|_0 / |u|_0` on the domain.
    L2,
    /// `|u - u_h|_1 / |u|_1` (seminorm) on the domain.
    H1,
    /// `h^{1/2} |m - m_h|_0 / |m|_0` on the boundary.
    Mortar,
    /// `h^{-1/2} |u_ext - u_ext,h|_0 / |u_ext|_0` on the boundary.
    Exterior,
}

impl ErrorQuantity {
    pub const ALL: [ErrorQuantity; 4] = [Self::L2, Self::H1, Self::Mortar, Self::Exterior];

    pub fn name(&self) -> &'static str {
        match self {
            Self::L2 => "rel_l2_omega",
            Self::H1 => "rel_h1semi_omega",
            Self::Mortar => "scaled_rel_l2_m",
            Self::Exterior => "scaled_rel_l2_uext",
        }
    }
}

impl fmt::Display for ErrorQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Largest element diameter of the volume mesh.
    pub h: f64,
    pub p: usize,
    pub k: f64,
    pub rel_l2_omega: f64,
    pub rel_h1semi_omega: f64,
    pub scaled_rel_l2_m: f64,
    /// Relative to 1 instead of the exact norm when the case's exterior
    /// field vanishes identically.
    pub scaled_rel_l2_uext: f64,
    pub stats: SolverStats,
}

impl ErrorReport {
    pub fn get(&self, q: ErrorQuantity) -> f64 {
        match q {
            ErrorQuantity::L2 => self.rel_l2_omega,
            ErrorQuantity::H1 => self.rel_h1semi_omega,
            ErrorQuantity::Mortar => self.scaled_rel_l2_m,
            ErrorQuantity::Exterior => self.scaled_rel_l2_uext,
        }
    }
}

/// Default quadrature order for error norms of degree-`p` solutions.
pub fn error_quadrature_order(p: usize) -> usize {
    2 * p + 8
}

/// Absolute errors and exact norms, before scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: (f64, f64),
    pub h1: (f64, f64),
    pub mortar: (f64, f64),
    pub exterior: (f64, f64),
}

/// `(|exact - discrete|, |exact|)` pairs of the three fields, by per-element
/// quadrature of order `order` (at least `2p + 2`).
pub fn error_norms(
    u: &[C64],
    m: &[C64],
    uext: &[C64],
    case: &ManufacturedCase,
    fe: &FeSpace,
    sp: &TraceSpaces,
    order: usize,
) -> Result<ErrorNorms> {
    let p = fe.degree();
    if order < 2 * p + 2 {
        return Err(Error::InvalidArgument(format!("error quadrature order {order} below 2p + 2 = {}", 2 * p + 2)));
    }
    for (what, found, expected) in [
        ("volume coefficients", u.len(), fe.num_dofs()),
        ("mortar coefficients", m.len(), sp.dim_w()),
        ("exterior coefficients", uext.len(), sp.dim_z()),
    ] {
        if found != expected {
            return Err(Error::DimensionMismatch { what, expected, found });
        }
    }
    let rule = tet_rule(points_for_order(order))?;
    let el = fe.element();
    let nloc = el.num_basis();
    let mut vals = vec![vec![0.0; nloc]; rule.points.len()];
    let mut grads = vec![vec![[0.0; 3]; nloc]; rule.points.len()];
    for (q, xi) in rule.points.iter().enumerate() {
        el.eval(xi, &mut vals[q]);
        el.grad(xi, &mut grads[q]);
    }
    let mesh = fe.mesh();
    let (mut e0, mut n0, mut e1, mut n1) = (0.0, 0.0, 0.0, 0.0);
    for e in 0..mesh.num_tets() {
        let pts = mesh.tet_points(e);
        let (jit, det) = fe.jacobian(e);
        let dofs = fe.cell_dofs(e);
        for (q, xi) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * det.abs();
            let exact = case.interior(&map_point(&pts, xi));
            let mut uh = C64::new(0.0, 0.0);
            let mut gref = [C64::new(0.0, 0.0); 3];
            for a in 0..nloc {
                let c = u[dofs[a]];
                uh += c * vals[q][a];
                for d in 0..3 {
                    gref[d] += c * grads[q][a][d];
                }
            }
            e0 += w * (exact.value - uh).norm_sqr();
            n0 += w * exact.value.norm_sqr();
            for r in 0..3 {
                let gh = gref[0] * jit[r][0] + gref[1] * jit[r][1] + gref[2] * jit[r][2];
                e1 += w * (exact.gradient[r] - gh).norm_sqr();
                n1 += w * exact.gradient[r].norm_sqr();
            }
        }
    }
    let tri = triangle_rule(points_for_order(order))?;
    let (mut em, mut nm, mut ed, mut nd) = (0.0, 0.0, 0.0, 0.0);
    for (t, panel) in sp.panels().iter().enumerate() {
        let jac = 2.0 * panel.area;
        for (xi, wq) in tri.points.iter().zip(&tri.weights) {
            let w = wq * jac;
            let x = panel.map(xi);
            let mex = case.mortar(&x, &panel.normal);
            let dex = case.exterior_trace(&x);
            em += w * (mex - sp.eval_function(BoundarySpace::W, m, t, xi)).norm_sqr();
            nm += w * mex.norm_sqr();
            ed += w * (dex - sp.eval_function(BoundarySpace::Z, uext, t, xi)).norm_sqr();
            nd += w * dex.norm_sqr();
        }
    }
    Ok(ErrorNorms {
        l2: (e0.sqrt(), n0.sqrt()),
        h1: (e1.sqrt(), n1.sqrt()),
        mortar: (em.sqrt(), nm.sqrt()),
        exterior: (ed.sqrt(), nd.sqrt()),
    })
}

fn ratio((err, norm): (f64, f64), what: &'static str) -> Result<f64> {
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm(what));
    }
    Ok(err / norm)
}

/// The four relative errors of a solution against the case's exact fields.
pub fn compute_errors(
    solution: &SolutionTriple,
    case: &ManufacturedCase,
    fe: &FeSpace,
    sp: &TraceSpaces,
    order: usize,
) -> Result<ErrorReport> {
    let norms = error_norms(&solution.u, &solution.m, &solution.uext, case, fe, sp, order)?;
    let h = mesh_size(fe.mesh());
    let exterior = if case.exterior_vanishes() { norms.exterior.0 } else { ratio(norms.exterior, "exterior trace")? };
    Ok(ErrorReport {
        h,
        p: fe.degree(),
        k: case.k,
        rel_l2_omega: ratio(norms.l2, "interior field")?,
        rel_h1semi_omega: ratio(norms.h1, "interior gradient")?,
        scaled_rel_l2_m: h.sqrt() * ratio(norms.mortar, "mortar")?,
        scaled_rel_l2_uext: exterior / h.sqrt(),
        stats: solution.stats,
    })
}
