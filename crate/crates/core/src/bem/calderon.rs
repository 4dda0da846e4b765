//! Residuals of the exterior Calderón identities for discrete Cauchy data.

use faer::linalg::solvers::Solve;
use faer::Mat;

use super::assembly::{assemble_blocks, BemOptions, BlockSpec, OperatorKind};
use super::spaces::{BoundarySpace, TraceSpaces};
use crate::error::{Error, Result};
use crate::linalg::{dense_matvec, CsrMatrix};
use crate::C64;

/// Discrete L² norms of the residuals of
/// `(1/2 - K) u - V ∂u = 0` (tested with `W_h`) and
/// `(1/2 + K') ∂u + W u = 0` (tested with `Z_h`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalderonResidual {
    pub first: f64,
    pub second: f64,
}

/// Residuals for exterior traces `dirichlet` (in `Z_h`) and `neumann` (in
/// `W_h`). Each residual vector `r` is measured as `sqrt(r^H M^{-1} r)`
/// with the mass matrix of its test space.
pub fn calderon_residual(
    sp: &TraceSpaces,
    k: f64,
    opts: &BemOptions,
    dirichlet: &[C64],
    neumann: &[C64],
) -> Result<CalderonResidual> {
    Ok(calderon_residuals(sp, k, opts, &[(dirichlet, neumann)])?[0])
}

/// [`calderon_residual`] for several trace pairs sharing one assembly.
pub fn calderon_residuals(
    sp: &TraceSpaces,
    k: f64,
    opts: &BemOptions,
    traces: &[(&[C64], &[C64])],
) -> Result<Vec<CalderonResidual>> {
    use BoundarySpace::{W, Z};
    use OperatorKind::*;
    for (dirichlet, neumann) in traces {
        if dirichlet.len() != sp.dim_z() {
            return Err(Error::DimensionMismatch {
                what: "Dirichlet trace",
                expected: sp.dim_z(),
                found: dirichlet.len(),
            });
        }
        if neumann.len() != sp.dim_w() {
            return Err(Error::DimensionMismatch { what: "Neumann trace", expected: sp.dim_w(), found: neumann.len() });
        }
    }
    let one = C64::new(1.0, 0.0);
    let blocks = assemble_blocks(
        sp,
        k,
        opts,
        &[
            BlockSpec { test: W, trial: Z, terms: vec![(Double, -one)] },
            BlockSpec::single(Single, W, W),
            BlockSpec::single(AdjointDouble, Z, W),
            BlockSpec::single(Hypersingular, Z, Z),
        ],
    )?;
    let m_wz = sp.mass(W, Z)?;
    let m_zw = sp.mass(Z, W)?;
    let (m_ww, m_zz) = (sp.mass(W, W)?, sp.mass(Z, Z)?);
    let half = |m: &CsrMatrix, x: &[C64]| -> Vec<C64> { m.matvec(x).into_iter().map(|v| v * 0.5).collect() };
    let sum = |a: Vec<C64>, b: Vec<C64>| -> Vec<C64> { a.into_iter().zip(b).map(|(x, y)| x + y).collect() };
    traces
        .iter()
        .map(|(dirichlet, neumann)| {
            let r1 = sum(
                sum(half(&m_wz, dirichlet), dense_matvec(&blocks[0], dirichlet)),
                dense_matvec(&blocks[1], neumann),
            );
            let r2 =
                sum(sum(half(&m_zw, neumann), dense_matvec(&blocks[2], neumann)), dense_matvec(&blocks[3], dirichlet));
            Ok(CalderonResidual { first: dual_norm(&m_ww, &r1), second: dual_norm(&m_zz, &r2) })
        })
        .collect()
}

/// `sqrt(r^H M^{-1} r)` for a Hermitian positive definite mass matrix.
pub(crate) fn dual_norm(mass: &CsrMatrix, r: &[C64]) -> f64 {
    let m = mass.to_dense();
    let rhs = Mat::from_fn(r.len(), 1, |i, _| r[i]);
    let x = m.partial_piv_lu().solve(&rhs);
    let s: C64 = (0..r.len()).map(|i| r[i].conj() * x[(i, 0)]).sum();
    s.re.max(0.0).sqrt()
}
