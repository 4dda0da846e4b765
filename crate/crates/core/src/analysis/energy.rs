use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bem::{assemble_blocks, BlockSpec, BoundarySpace, OperatorKind, TraceSpaces};
use crate::coupling::{CouplingOptions, TMatrix};
use crate::error::{Error, Result};
use crate::fem::{assemble_interior, FeSpace, MediumCoefficients};
use crate::linalg::{dense_matvec, CsrMatrix};
use crate::C64;

/// The three terms of the static energy `|A^{1/2} ∇u|² + <W d, d> + <V m, m>`.
#[derive(Debug, Clone)]
pub struct EnergyParts {
    /// `(A ∇u, ∇v)`.
    pub stiffness: CsrMatrix,
    /// Static single layer on `W_h`.
    pub single: Mat<C64>,
    /// Static hypersingular operator on `Z_h`.
    pub hypersingular: Mat<C64>,
}

impl EnergyParts {
    /// Energy of the stacked triple `[u, m, d]`.
    pub fn energy(&self, x: &[C64]) -> f64 {
        let nv = self.stiffness.nrows();
        let nw = self.single.nrows();
        let (u, rest) = x.split_at(nv);
        let (m, d) = rest.split_at(nw);
        let quad = |y: Vec<C64>, v: &[C64]| -> C64 { y.iter().zip(v).map(|(a, b)| a * b.conj()).sum() };
        (quad(self.stiffness.matvec(u), u)
            + quad(dense_matvec(&self.single, m), m)
            + quad(dense_matvec(&self.hypersingular, d), d))
        .re
    }
}

/// Assembles the energy terms at `k = 0` from their own operator calls.
pub fn assemble_energy_parts(
    medium: &MediumCoefficients,
    fe: &FeSpace,
    sp: &TraceSpaces,
    opts: &CouplingOptions,
) -> Result<EnergyParts> {
    use BoundarySpace::{W, Z};
    let interior = assemble_interior(fe, &medium.with_k(0.0))?;
    let mut ops = assemble_blocks(
        sp,
        0.0,
        &opts.bem,
        &[BlockSpec::single(OperatorKind::Single, W, W), BlockSpec::single(OperatorKind::Hypersingular, Z, Z)],
    )?
    .into_iter();
    Ok(EnergyParts { stiffness: interior.stiffness, single: ops.next().unwrap(), hypersingular: ops.next().unwrap() })
}

/// Largest relative discrepancy `|T(x, x) - E(x)| / E(x)` over random
/// triples. Each trial draws a real triple, for which `T(x, x)` itself must
/// equal the energy, and a complex triple, for which the antisymmetric
/// coupling terms are imaginary and only `Re T(x, x)` must.
pub fn energy_identity_probe(t: &TMatrix, parts: &EnergyParts, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("no trials".into()));
    }
    let n = t.dims.total();
    let expect = parts.stiffness.nrows() + parts.single.nrows() + parts.hypersingular.nrows();
    if n != expect {
        return Err(Error::DimensionMismatch { what: "energy parts", expected: n, found: expect });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let real: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let cplx: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let e = parts.energy(&real);
        worst = worst.max((t.form(&real, &real) - e).norm() / e);
        let e = parts.energy(&cplx);
        worst = worst.max((t.form(&cplx, &cplx).re - e).abs() / e);
    }
    Ok(worst)
}
