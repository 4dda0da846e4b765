//! Solvers for the coupled block system: boundary Schur complement with
//! dense LU, monolithic dense LU, and GMRES on the reduced system.

mod dense;
mod gmres;

use std::fmt;
use std::str::FromStr;

use faer::Mat;

pub use dense::{DenseLu, SparseLu, PIVOT_TOLERANCE};
pub use gmres::{gmres, GmresOptions, GmresOutcome};

use crate::coupling::BlockSystem;
use crate::error::{Error, Result};
use crate::linalg::{dense_matvec, CsrMatrix};
use crate::C64;

/// Default dimension cap of the monolithic dense solve.
pub const DIRECT_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Schur,
    Direct,
    Gmres,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Schur => "schur",
            Self::Direct => "direct",
            Self::Gmres => "gmres",
        })
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "schur" => Ok(Self::Schur),
            "direct" => Ok(Self::Direct),
            "gmres" => Ok(Self::Gmres),
            _ => Err(Error::InvalidArgument(format!("unknown solver '{s}' (expected schur, direct or gmres)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverStats {
    pub method: SolverKind,
    /// `|K x - b| / |b|` of the full block system, recomputed after the solve.
    pub residual: f64,
    pub factorizations: usize,
    pub iterations: usize,
}

/// Coefficients of the three discrete fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTriple {
    pub u: Vec<C64>,
    pub m: Vec<C64>,
    pub uext: Vec<C64>,
    pub stats: SolverStats,
}

impl SolutionTriple {
    fn checked(system: &BlockSystem, u: Vec<C64>, m: Vec<C64>, uext: Vec<C64>, stats: SolverStats) -> Result<Self> {
        let residual = system.relative_residual(&u, &m, &uext);
        if !residual.is_finite() {
            return Err(Error::Singular { what: "coupled system", condition: f64::INFINITY });
        }
        Ok(Self { u, m, uext, stats: SolverStats { residual, ..stats } })
    }
}

/// The boundary system left after eliminating the volume unknowns, with
/// rows tested by `W_h` then `Z_h` and unknowns `(m, d)`:
///
/// ```text
/// [ B5 - B4 A^-1 B1   B6 ] [m]   [r3 - B4 A^-1 f]
/// [ B2                B3 ] [d] = [r2            ]
/// ```
pub struct ReducedSystem {
    pub matrix: Mat<C64>,
    pub rhs: Vec<C64>,
    pub mortar: usize,
    a_lu: SparseLu,
}

impl ReducedSystem {
    pub fn new(system: &BlockSystem) -> Result<Self> {
        let nw = system.dims.mortar;
        let nz = system.dims.exterior;
        let a_lu = SparseLu::new(&system.a_blk, "volume block")?;
        let coupling = volume_coupling(&a_lu, &system.b4, &system.b1);
        let mut matrix = Mat::zeros(nw + nz, nw + nz);
        for j in 0..nw {
            for i in 0..nw {
                matrix[(i, j)] = system.b5[(i, j)] - coupling[(i, j)];
            }
            for i in 0..nz {
                matrix[(nw + i, j)] = system.b2[(i, j)];
            }
        }
        for j in 0..nz {
            for i in 0..nw {
                matrix[(i, nw + j)] = system.b6[(i, j)];
            }
            for i in 0..nz {
                matrix[(nw + i, nw + j)] = system.b3[(i, j)];
            }
        }
        let y = a_lu.solve(&system.rhs_f);
        let by = system.b4.matvec(&y);
        let mut rhs: Vec<C64> = system.rhs_r3.iter().zip(&by).map(|(r, b)| r - b).collect();
        rhs.extend_from_slice(&system.rhs_r2);
        Ok(Self { matrix, rhs, mortar: nw, a_lu })
    }

    /// Recovers the volume field from the mortar: `u = A^-1 (f - B1 m)`.
    pub fn back_substitute(&self, system: &BlockSystem, m: &[C64]) -> Vec<C64> {
        let b1m = system.b1.matvec(m);
        let rhs: Vec<C64> = system.rhs_f.iter().zip(&b1m).map(|(f, b)| f - b).collect();
        self.a_lu.solve(&rhs)
    }
}

/// `left A^-1 right` for sparse `left`, `right`, computed with one solve per
/// nonzero row of `right`.
fn volume_coupling(a_lu: &SparseLu, left: &CsrMatrix, right: &CsrMatrix) -> Mat<C64> {
    let n = a_lu.dim();
    let mut rows: Vec<usize> = right.iter().map(|(i, _, _)| i).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut cols: Vec<usize> = left.iter().map(|(_, j, _)| j).collect();
    cols.sort_unstable();
    cols.dedup();
    let mut col_pos = vec![usize::MAX; n];
    for (p, &c) in cols.iter().enumerate() {
        col_pos[c] = p;
    }
    // G = (A^-1)[cols, rows]
    let mut g = Mat::<C64>::zeros(cols.len(), rows.len());
    const CHUNK: usize = 64;
    for start in (0..rows.len()).step_by(CHUNK) {
        let end = (start + CHUNK).min(rows.len());
        let mut rhs = Mat::<C64>::zeros(n, end - start);
        for (c, &r) in rows[start..end].iter().enumerate() {
            rhs[(r, c)] = C64::new(1.0, 0.0);
        }
        a_lu.solve_mat(&mut rhs);
        for c in 0..end - start {
            for (p, &i) in cols.iter().enumerate() {
                g[(p, start + c)] = rhs[(i, c)];
            }
        }
    }
    let mut row_pos = vec![usize::MAX; n];
    for (p, &r) in rows.iter().enumerate() {
        row_pos[r] = p;
    }
    let mut left_d = Mat::<C64>::zeros(left.nrows(), cols.len());
    for (i, j, v) in left.iter() {
        left_d[(i, col_pos[j])] += v;
    }
    let mut right_d = Mat::<C64>::zeros(rows.len(), right.ncols());
    for (i, j, v) in right.iter() {
        right_d[(row_pos[i], j)] += v;
    }
    &left_d * (&g * &right_d)
}

/// Eliminates the volume unknowns with a sparse LU, solves the boundary
/// system by dense LU and back-substitutes.
pub fn schur_solve(system: &BlockSystem) -> Result<SolutionTriple> {
    let reduced = ReducedSystem::new(system)?;
    let lu = DenseLu::new(&reduced.matrix, "reduced boundary system")?;
    let x = lu.solve(&reduced.rhs);
    let (m, d) = x.split_at(reduced.mortar);
    let u = reduced.back_substitute(system, m);
    let stats = SolverStats { method: SolverKind::Schur, residual: 0.0, factorizations: 2, iterations: 0 };
    SolutionTriple::checked(system, u, m.to_vec(), d.to_vec(), stats)
}

/// Monolithic dense LU of the full block matrix.
pub fn direct_solve(system: &BlockSystem, cap: usize) -> Result<SolutionTriple> {
    let dim = system.dims.total();
    if dim > cap {
        return Err(Error::CapExceeded { dim, cap });
    }
    let lu = DenseLu::new(&system.to_dense(), "coupled system")?;
    let x = lu.solve(&system.rhs());
    let (u, m, d) = system.split(&x);
    let stats = SolverStats { method: SolverKind::Direct, residual: 0.0, factorizations: 1, iterations: 0 };
    SolutionTriple::checked(system, u.to_vec(), m.to_vec(), d.to_vec(), stats)
}

/// GMRES on the reduced boundary system, optionally preconditioned by the
/// LU factors of its two diagonal blocks.
pub fn gmres_solve(system: &BlockSystem, opts: &GmresOptions) -> Result<SolutionTriple> {
    let reduced = ReducedSystem::new(system)?;
    let nw = reduced.mortar;
    let n = reduced.matrix.nrows();
    let prec = if opts.block_preconditioner {
        let top = Mat::from_fn(nw, nw, |i, j| reduced.matrix[(i, j)]);
        let bottom = Mat::from_fn(n - nw, n - nw, |i, j| reduced.matrix[(nw + i, nw + j)]);
        Some((DenseLu::new(&top, "mortar diagonal block")?, DenseLu::new(&bottom, "exterior diagonal block")?))
    } else {
        None
    };
    let apply_prec = |v: &[C64]| -> Vec<C64> {
        match &prec {
            Some((top, bottom)) => [top.solve(&v[..nw]), bottom.solve(&v[nw..])].concat(),
            None => v.to_vec(),
        }
    };
    let out = gmres(|v| dense_matvec(&reduced.matrix, v), apply_prec, &reduced.rhs, opts)?;
    let (m, d) = out.solution.split_at(nw);
    let u = reduced.back_substitute(system, m);
    let factorizations = if prec.is_some() { 3 } else { 1 };
    let stats = SolverStats { method: SolverKind::Gmres, residual: 0.0, factorizations, iterations: out.iterations };
    SolutionTriple::checked(system, u, m.to_vec(), d.to_vec(), stats)
}

/// Dispatches on the solver kind with default settings.
pub fn solve(system: &BlockSystem, kind: SolverKind) -> Result<SolutionTriple> {
    match kind {
        SolverKind::Schur => schur_solve(system),
        SolverKind::Direct => direct_solve(system, DIRECT_CAP),
        SolverKind::Gmres => gmres_solve(system, &GmresOptions::default()),
    }
}
