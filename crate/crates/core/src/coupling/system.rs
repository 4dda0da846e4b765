use faer::Mat;

use super::cases::ManufacturedCase;
use crate::bem::{
    apply_to_function, assemble_blocks, assemble_blocks_with_function, BemOptions, BlockSpec, BoundarySpace,
    FunctionSpec, OperatorKind, TraceSpaces,
};
use crate::error::{Error, Result};
use crate::fem::{assemble_interior, assemble_load, FeSpace, MediumCoefficients};
use crate::geom;
use crate::linalg::{dense_matvec, norm2, CsrMatrix};
use crate::C64;

/// Unknown counts of the three fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemDims {
    /// Volume field `u_h` in `V_h`.
    pub volume: usize,
    /// Mortar `m_h` in `W_h`.
    pub mortar: usize,
    /// Exterior trace in `Z_h`.
    pub exterior: usize,
}

impl SystemDims {
    pub fn total(&self) -> usize {
        self.volume + self.mortar + self.exterior
    }
}

/// Assembly settings shared by the block system and the T matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingOptions {
    pub bem: BemOptions,
    /// Extra polynomial order, beyond `2p`, of the rules for the volume
    /// source and the surface jump data.
    pub load_order_extra: usize,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self { bem: BemOptions::default(), load_order_extra: 4 }
    }
}

/// The coupled Galerkin system
///
/// ```text
/// [ A   B1  0  ] [u]   [f ]   rows tested with V_h
/// [ 0   B2  B3 ] [m] = [r2]   rows tested with Z_h
/// [ B4  B5  B6 ] [d]   [r3]   rows tested with W_h
/// ```
///
/// with `A = S - M + ikR`, `B1 = -<m, v>`, `B2 = -<(1/2 + K' + ikV) m, ζ>`,
/// `B3 = <(-W - ik(1/2 - K)) d, ζ> + ik<(1/2 + K' + ikV) d, ζ>`,
/// `B4 = <u, λ>`, `B5 = <V m, λ>` and `B6 = -<(1/2 + K + ikV) d, λ>`.
///
/// The right-hand sides carry the jumps `g1 = u_int - u_ext` and
/// `g2 = ∂u_int/∂n - ∂u_ext/∂n`. Substituting the exterior traces
/// `u_ext = u_int - g1` and `∂u_ext/∂n = m - ik u_int - g2` into the
/// exterior Calderón identities and moving the data to the right gives,
/// with `h = ik g1 + g2`,
///
/// ```text
/// r2 = -<(1/2 + K' + ikV) h, ζ>,    r3 = <g1, λ> + <V h, λ>.
/// ```
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub k: f64,
    pub dims: SystemDims,
    pub a_blk: CsrMatrix,
    pub b1: CsrMatrix,
    pub b2: Mat<C64>,
    pub b3: Mat<C64>,
    pub b4: CsrMatrix,
    pub b5: Mat<C64>,
    pub b6: Mat<C64>,
    pub rhs_f: Vec<C64>,
    pub rhs_r2: Vec<C64>,
    pub rhs_r3: Vec<C64>,
}

impl BlockSystem {
    /// Splits a stacked vector `[u, m, d]` into its three fields.
    pub fn split<'a>(&self, x: &'a [C64]) -> (&'a [C64], &'a [C64], &'a [C64]) {
        let (u, rest) = x.split_at(self.dims.volume);
        let (m, d) = rest.split_at(self.dims.mortar);
        (u, m, d)
    }

    /// Stacked right-hand side `[f, r2, r3]`.
    pub fn rhs(&self) -> Vec<C64> {
        [self.rhs_f.as_slice(), &self.rhs_r2, &self.rhs_r3].concat()
    }

    /// Product of the full block matrix with `[u, m, d]`, stacked by rows.
    pub fn apply(&self, u: &[C64], m: &[C64], d: &[C64]) -> Vec<C64> {
        let mut r1 = self.a_blk.matvec(u);
        add(&mut r1, &self.b1.matvec(m));
        let mut r2 = dense_matvec(&self.b2, m);
        add(&mut r2, &dense_matvec(&self.b3, d));
        let mut r3 = self.b4.matvec(u);
        add(&mut r3, &dense_matvec(&self.b5, m));
        add(&mut r3, &dense_matvec(&self.b6, d));
        [r1, r2, r3].concat()
    }

    /// `|K x - b| / |b|`, or the absolute residual when `b = 0`.
    pub fn relative_residual(&self, u: &[C64], m: &[C64], d: &[C64]) -> f64 {
        let b = self.rhs();
        let mut r = self.apply(u, m, d);
        for (ri, bi) in r.iter_mut().zip(&b) {
            *ri -= bi;
        }
        let nb = norm2(&b);
        if nb > 0.0 {
            norm2(&r) / nb
        } else {
            norm2(&r)
        }
    }

    /// The full block matrix as a dense matrix.
    pub fn to_dense(&self) -> Mat<C64> {
        let SystemDims { volume: nv, mortar: nw, exterior: nz } = self.dims;
        let mut k = Mat::zeros(nv + nz + nw, nv + nw + nz);
        let (r2, r3) = (nv, nv + nz);
        let (cm, cd) = (nv, nv + nw);
        for (i, j, v) in self.a_blk.iter() {
            k[(i, j)] = v;
        }
        for (i, j, v) in self.b1.iter() {
            k[(i, cm + j)] = v;
        }
        for (i, j, v) in self.b4.iter() {
            k[(r3 + i, j)] = v;
        }
        copy_block(&mut k, &self.b2, r2, cm);
        copy_block(&mut k, &self.b3, r2, cd);
        copy_block(&mut k, &self.b5, r3, cm);
        copy_block(&mut k, &self.b6, r3, cd);
        k
    }
}

fn add(a: &mut [C64], b: &[C64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn copy_block(dst: &mut Mat<C64>, src: &Mat<C64>, r0: usize, c0: usize) {
    for j in 0..src.ncols() {
        for i in 0..src.nrows() {
            dst[(r0 + i, c0 + j)] = src[(i, j)];
        }
    }
}

/// Index of the volume dof carrying each `Z_h` dof, checked by position.
pub fn trace_dofs(fe: &FeSpace, sp: &TraceSpaces) -> Result<Vec<usize>> {
    let surf = sp.surface();
    if fe.degree() != sp.degree() {
        return Err(Error::InvalidArgument(format!(
            "volume degree {} differs from boundary degree {}",
            fe.degree(),
            sp.degree()
        )));
    }
    if fe.surface().num_triangles() != surf.num_triangles() {
        return Err(Error::DimensionMismatch {
            what: "boundary triangles",
            expected: fe.surface().num_triangles(),
            found: surf.num_triangles(),
        });
    }
    let tol = 1e-10 * (1.0 + surf.mesh_size());
    let mut map = vec![usize::MAX; sp.dim_z()];
    for t in 0..surf.num_triangles() {
        for (&v, &z) in fe.face_dofs(t).iter().zip(sp.z_dofs(t)) {
            if geom::dist(&fe.dof_points()[v], &sp.z_points()[z]) > tol || (map[z] != usize::MAX && map[z] != v) {
                return Err(Error::InvalidMesh("boundary spaces do not match the volume mesh trace".into()));
            }
            map[z] = v;
        }
    }
    Ok(map)
}

/// `V_h x Z_h` injection matrix of the trace map.
fn trace_matrix(nv: usize, map: &[usize]) -> CsrMatrix {
    CsrMatrix::from_triplets(nv, map.len(), map.iter().enumerate().map(|(z, &v)| (v, z, C64::new(1.0, 0.0))).collect())
}

fn sparse_product(a: &CsrMatrix, b: &CsrMatrix) -> CsrMatrix {
    let bt: Vec<Vec<(usize, C64)>> = {
        let mut rows = vec![Vec::new(); b.nrows()];
        for (i, j, v) in b.iter() {
            rows[i].push((j, v));
        }
        rows
    };
    let mut trip = Vec::new();
    for (i, l, v) in a.iter() {
        for &(j, w) in &bt[l] {
            trip.push((i, j, v * w));
        }
    }
    CsrMatrix::from_triplets(a.nrows(), b.ncols(), trip)
}

/// Mortar pairing `<m, v>` as a `V_h x W_h` matrix, and its companion
/// `<u, λ>` as `W_h x V_h`, both through the trace map.
fn trace_pairings(fe: &FeSpace, sp: &TraceSpaces) -> Result<(CsrMatrix, CsrMatrix)> {
    let p = trace_matrix(fe.num_dofs(), &trace_dofs(fe, sp)?);
    let m_zw = sp.mass(BoundarySpace::Z, BoundarySpace::W)?;
    let m_wz = sp.mass(BoundarySpace::W, BoundarySpace::Z)?;
    Ok((sparse_product(&p, &m_zw), sparse_product(&m_wz, &p.transpose())))
}

fn check_spaces(medium: &MediumCoefficients, sp: &TraceSpaces) -> Result<()> {
    if !(medium.k >= 0.0 && medium.k.is_finite()) {
        return Err(Error::InvalidArgument(format!("wavenumber must be finite and nonnegative, got {}", medium.k)));
    }
    if sp.num_panels() == 0 {
        return Err(Error::InvalidMesh("empty boundary".into()));
    }
    Ok(())
}

fn scaled(m: &Mat<C64>, c: C64) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| c * m[(i, j)])
}

fn add_mass(target: &mut Mat<C64>, mass: &CsrMatrix, c: C64) {
    for (i, j, v) in mass.iter() {
        target[(i, j)] += c * v;
    }
}

/// Assembles the coupled system of a manufactured case, including the
/// jump-corrected right-hand sides.
pub fn assemble_block_system(
    case: &ManufacturedCase,
    fe: &FeSpace,
    sp: &TraceSpaces,
    opts: &CouplingOptions,
) -> Result<BlockSystem> {
    use BoundarySpace::{W, Z};
    use OperatorKind::*;
    check_spaces(&case.medium, sp)?;
    let k = case.k;
    let one = C64::new(1.0, 0.0);
    let ik = C64::new(0.0, k);
    let interior = assemble_interior(fe, &case.medium)?;
    let (pair_vw, pair_wv) = trace_pairings(fe, sp)?;
    let h = jump_density(case, sp);
    let (blocks, applied) = assemble_blocks_with_function(
        sp,
        k,
        &opts.bem,
        &[
            BlockSpec { test: Z, trial: W, terms: vec![(AdjointDouble, -one), (Single, -ik)] },
            BlockSpec {
                test: Z,
                trial: Z,
                terms: vec![(Hypersingular, -one), (Double, ik), (AdjointDouble, ik), (Single, ik * ik)],
            },
            BlockSpec::single(Single, W, W),
            BlockSpec { test: W, trial: Z, terms: vec![(Double, -one), (Single, -ik)] },
        ],
        &h,
        &jump_specs(k),
    )?;
    let mut blocks = blocks.into_iter();
    let (mut b2, b3, b5, mut b6) =
        (blocks.next().unwrap(), blocks.next().unwrap(), blocks.next().unwrap(), blocks.next().unwrap());
    add_mass(&mut b2, &sp.mass(Z, W)?, C64::new(-0.5, 0.0));
    add_mass(&mut b6, &sp.mass(W, Z)?, C64::new(-0.5, 0.0));
    let order = 2 * fe.degree() + opts.load_order_extra;
    let rhs_f = assemble_load(fe, |x, r| case.source(x, r), order)?;
    let (rhs_r2, rhs_r3) = finish_jump_rhs(case, sp, opts, applied)?;
    Ok(BlockSystem {
        k,
        dims: SystemDims { volume: fe.num_dofs(), mortar: sp.dim_w(), exterior: sp.dim_z() },
        a_blk: interior.impedance_block(),
        b1: CsrMatrix::combine(&[(-one, &pair_vw)]),
        b2,
        b3,
        b4: pair_wv,
        b5,
        b6,
        rhs_f,
        rhs_r2,
        rhs_r3,
    })
}

/// `h = ik g1 + g2` on panel `t`.
fn jump_density<'a>(
    case: &'a ManufacturedCase,
    sp: &'a TraceSpaces,
) -> impl Fn(&geom::Point, usize) -> C64 + Sync + 'a {
    let ik = C64::new(0.0, case.k);
    move |x, t| ik * case.dirichlet_jump(x) + case.neumann_jump(x, &sp.panels()[t].normal)
}

/// `-(K' + ikV) h` tested with `Z_h` and `V h` tested with `W_h`.
fn jump_specs(k: f64) -> [FunctionSpec; 2] {
    use OperatorKind::*;
    let one = C64::new(1.0, 0.0);
    let ik = C64::new(0.0, k);
    [
        FunctionSpec { test: BoundarySpace::Z, terms: vec![(AdjointDouble, -one), (Single, -ik)] },
        FunctionSpec { test: BoundarySpace::W, terms: vec![(Single, one)] },
    ]
}

fn finish_jump_rhs(
    case: &ManufacturedCase,
    sp: &TraceSpaces,
    opts: &CouplingOptions,
    applied: Vec<Vec<C64>>,
) -> Result<(Vec<C64>, Vec<C64>)> {
    let order = 2 * sp.degree() + opts.load_order_extra;
    let mut it = applied.into_iter();
    let (mut r2, mut r3) = (it.next().unwrap(), it.next().unwrap());
    let h_z = sp.load(BoundarySpace::Z, jump_density(case, sp), order)?;
    let g1_w = sp.load(BoundarySpace::W, |x, _| case.dirichlet_jump(x), order)?;
    for (r, v) in r2.iter_mut().zip(&h_z) {
        *r -= 0.5 * v;
    }
    for (r, v) in r3.iter_mut().zip(&g1_w) {
        *r += v;
    }
    Ok((r2, r3))
}

/// Right-hand sides `(r2, r3)` of the boundary rows for the jumps of the
/// case; both vanish when the interior and exterior fields match.
pub fn jump_rhs(case: &ManufacturedCase, sp: &TraceSpaces, opts: &CouplingOptions) -> Result<(Vec<C64>, Vec<C64>)> {
    let applied = apply_to_function(sp, case.k, &opts.bem, &jump_density(case, sp), &jump_specs(case.k))?;
    finish_jump_rhs(case, sp, opts, applied)
}

/// Galerkin matrix of the sesquilinear form
///
/// ```text
/// T((u,m,d),(v,λ,ṽ)) = (A∇u,∇v) - ((kn)²u,v) + ik(u,v)_Γ - <m,v>
///                      - <(B + ikA')d - A'm, ṽ> + <u,λ>
///                      - <(1/2 + K)d - V(m - ikd), λ>
/// ```
///
/// with `B = -W - ik(1/2 - K)` and `A' = 1/2 + K' + ikV`. Rows are ordered
/// `(v, λ, ṽ)` and columns `(u, m, d)`; `T(x, y) = y^H T x`.
#[derive(Debug, Clone)]
pub struct TMatrix {
    pub k: f64,
    pub dims: SystemDims,
    pub vu: CsrMatrix,
    pub vm: CsrMatrix,
    pub lu: CsrMatrix,
    pub lm: Mat<C64>,
    pub ld: Mat<C64>,
    pub tm: Mat<C64>,
    pub td: Mat<C64>,
}

impl TMatrix {
    /// Rows `(v, λ, ṽ)` of `T x` for `x = [u, m, d]`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let SystemDims { volume: nv, mortar: nw, exterior: nz } = self.dims;
        assert_eq!(x.len(), nv + nw + nz);
        let (u, m, d) = (&x[..nv], &x[nv..nv + nw], &x[nv + nw..]);
        let mut rv = self.vu.matvec(u);
        add(&mut rv, &self.vm.matvec(m));
        let mut rl = self.lu.matvec(u);
        add(&mut rl, &dense_matvec(&self.lm, m));
        add(&mut rl, &dense_matvec(&self.ld, d));
        let mut rt = dense_matvec(&self.tm, m);
        add(&mut rt, &dense_matvec(&self.td, d));
        [rv, rl, rt].concat()
    }

    /// `T(x, y)`: linear in `x`, antilinear in `y`. Both vectors are stacked
    /// as `[u, m, d]` and `[v, λ, ṽ]`.
    pub fn form(&self, x: &[C64], y: &[C64]) -> C64 {
        let tx = self.apply(x);
        assert_eq!(y.len(), tx.len());
        tx.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let SystemDims { volume: nv, mortar: nw, exterior: nz } = self.dims;
        let n = nv + nw + nz;
        let mut t = Mat::zeros(n, n);
        for (i, j, v) in self.vu.iter() {
            t[(i, j)] = v;
        }
        for (i, j, v) in self.vm.iter() {
            t[(i, nv + j)] = v;
        }
        for (i, j, v) in self.lu.iter() {
            t[(nv + i, j)] = v;
        }
        copy_block(&mut t, &self.lm, nv, nv);
        copy_block(&mut t, &self.ld, nv, nv + nw);
        copy_block(&mut t, &self.tm, nv + nw, nv);
        copy_block(&mut t, &self.td, nv + nw, nv + nw);
        t
    }
}

/// Assembles `T` from the individual operator matrices.
pub fn assemble_t_matrix(
    medium: &MediumCoefficients,
    fe: &FeSpace,
    sp: &TraceSpaces,
    opts: &CouplingOptions,
) -> Result<TMatrix> {
    use BoundarySpace::{W, Z};
    use OperatorKind::*;
    check_spaces(medium, sp)?;
    let k = medium.k;
    let one = C64::new(1.0, 0.0);
    let ik = C64::new(0.0, k);
    let interior = assemble_interior(fe, medium)?;
    let (pair_vw, pair_wv) = trace_pairings(fe, sp)?;
    let ops = assemble_blocks(
        sp,
        k,
        &opts.bem,
        &[
            BlockSpec::single(Single, W, W),
            BlockSpec::single(Double, W, Z),
            BlockSpec::single(Single, W, Z),
            BlockSpec::single(AdjointDouble, Z, W),
            BlockSpec::single(Single, Z, W),
            BlockSpec::single(Hypersingular, Z, Z),
            BlockSpec::single(Double, Z, Z),
            BlockSpec::single(AdjointDouble, Z, Z),
            BlockSpec::single(Single, Z, Z),
        ],
    )?;
    let [v_ww, k_wz, v_wz, kp_zw, v_zw, w_zz, k_zz, kp_zz, v_zz]: [Mat<C64>; 9] =
        ops.try_into().expect("nine blocks requested");
    let m_wz = sp.mass(W, Z)?.to_dense();
    let m_zw = sp.mass(Z, W)?.to_dense();
    let half = C64::new(0.5, 0.0);
    // -<(1/2 + K)d, λ> - ik<V d, λ>
    let ld = scaled(&m_wz, -half) - &k_wz - scaled(&v_wz, ik);
    // <A' m, ṽ>
    let tm = scaled(&m_zw, half) + &kp_zw + scaled(&v_zw, ik);
    // -<(B + ikA')d, ṽ> = <W d> + ik<(1/2 - K) d> - ik<(1/2 + K' + ikV) d>
    let td = &w_zz - scaled(&(&k_zz + &kp_zz), ik) - scaled(&v_zz, ik * ik);
    Ok(TMatrix {
        k,
        dims: SystemDims { volume: fe.num_dofs(), mortar: sp.dim_w(), exterior: sp.dim_z() },
        vu: CsrMatrix::combine(&[(one, &interior.stiffness), (-one, &interior.mass), (ik, &interior.robin)]),
        vm: CsrMatrix::combine(&[(-one, &pair_vw)]),
        lu: pair_wv,
        lm: v_ww,
        ld,
        tm,
        td,
    })
}
