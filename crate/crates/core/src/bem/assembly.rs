//! Galerkin assembly of the layer operators over all panel pairs.

use std::collections::HashMap;

use faer::Mat;
use rayon::prelude::*;

use super::kernel::kernel_parts;
use super::singular::{barycentric, panel_quadrature, PairClass, PairRule};
use super::spaces::{BoundarySpace, TraceSpaces, MAX_W, MAX_Z};
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::quadrature::triangle_rule;
use crate::C64;

/// Quadrature and execution settings for boundary element assembly.
///
/// The orders are base values. Each grows by one for every two radians of
/// phase `k h` across the largest panel and for every polynomial degree
/// above one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BemOptions {
    /// Gauss points per variable in the regularized rules for panels that
    /// share a vertex, an edge, or coincide.
    pub singular_order: usize,
    /// Gauss points per direction on each panel for separated panels
    /// closer than `near_ratio` diameters.
    pub near_order: usize,
    /// Gauss points per direction on each panel for well-separated panels.
    pub far_order: usize,
    pub near_ratio: f64,
    /// Distribute test panels over the rayon pool. Results are identical
    /// to the serial run.
    pub parallel: bool,
}

impl Default for BemOptions {
    fn default() -> Self {
        Self { singular_order: 4, near_order: 4, far_order: 2, near_ratio: 2.0, parallel: true }
    }
}

impl BemOptions {
    fn check(&self) -> Result<()> {
        if self.singular_order == 0 || self.near_order == 0 || self.far_order == 0 {
            return Err(Error::InvalidArgument("quadrature orders must be positive".into()));
        }
        if !(self.near_ratio >= 0.0) {
            return Err(Error::InvalidArgument("near_ratio must be nonnegative".into()));
        }
        Ok(())
    }
}

/// The four boundary integral operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// Single layer `V`.
    Single,
    /// Double layer `K` (kernel `∂G/∂n(y)`).
    Double,
    /// Adjoint double layer `K'` (kernel `∂G/∂n(x)`).
    AdjointDouble,
    /// Hypersingular `W`, through its weakly singular surface-curl form.
    Hypersingular,
}

/// A dense Galerkin block `sum_i c_i <Op_i trial, test>`.
#[derive(Debug, Clone)]
pub struct BlockSpec {
    pub test: BoundarySpace,
    pub trial: BoundarySpace,
    pub terms: Vec<(OperatorKind, C64)>,
}

impl BlockSpec {
    pub fn single(kind: OperatorKind, test: BoundarySpace, trial: BoundarySpace) -> Self {
        Self { test, trial, terms: vec![(kind, C64::new(1.0, 0.0))] }
    }
}

/// Tested values `sum_i c_i <Op_i f, test>` of operators applied to a
/// closed-form surface function.
#[derive(Debug, Clone)]
pub struct FunctionSpec {
    pub test: BoundarySpace,
    pub terms: Vec<(OperatorKind, C64)>,
}

#[derive(Clone, Copy)]
struct QPoint {
    pos: Point,
    z: [f64; MAX_Z],
    w: [f64; MAX_W],
    curl: [Point; MAX_Z],
    f: C64,
}

type SurfaceFn<'a> = &'a (dyn Fn(&Point, usize) -> C64 + Sync);

#[derive(Debug, Clone, Copy, Default)]
struct Needs {
    v_ww: bool,
    v_wz: bool,
    v_zw: bool,
    v_zz: bool,
    k_wz: bool,
    k_zz: bool,
    kp_zw: bool,
    kp_zz: bool,
    w_zz: bool,
}

impl Needs {
    fn from_specs(specs: &[BlockSpec]) -> Result<Self> {
        use BoundarySpace::{W, Z};
        use OperatorKind::*;
        let mut n = Needs::default();
        for s in specs {
            for (kind, _) in &s.terms {
                match (kind, s.test, s.trial) {
                    (Single, W, W) => n.v_ww = true,
                    (Single, W, Z) => n.v_wz = true,
                    (Single, Z, W) => n.v_zw = true,
                    (Single, Z, Z) => n.v_zz = true,
                    (Double, W, Z) => n.k_wz = true,
                    (Double, Z, Z) => n.k_zz = true,
                    (AdjointDouble, Z, W) => n.kp_zw = true,
                    (AdjointDouble, Z, Z) => n.kp_zz = true,
                    (Hypersingular, Z, Z) => {
                        n.w_zz = true;
                        n.v_zz = true;
                    }
                    (Hypersingular, _, _) => {
                        return Err(Error::InvalidArgument(
                            "hypersingular operator needs the continuous space on both sides".into(),
                        ))
                    }
                    (kind, test, trial) => {
                        return Err(Error::Unsupported(format!(
                            "{kind:?} with test space {test:?} and trial space {trial:?}"
                        )))
                    }
                }
            }
        }
        Ok(n)
    }
}

const M: usize = MAX_Z;

/// Local matrices of one panel pair, indexed `a * M + b`.
struct Local {
    v_ww: [C64; M * M],
    v_wz: [C64; M * M],
    v_zw: [C64; M * M],
    v_zz: [C64; M * M],
    k_wz: [C64; M * M],
    k_zz: [C64; M * M],
    kp_zw: [C64; M * M],
    kp_zz: [C64; M * M],
    w_zz: [C64; M * M],
}

impl Local {
    fn zero() -> Self {
        let z = [C64::new(0.0, 0.0); M * M];
        Self { v_ww: z, v_wz: z, v_zw: z, v_zz: z, k_wz: z, k_zz: z, kp_zw: z, kp_zz: z, w_zz: z }
    }

    fn get(&self, kind: OperatorKind, test: BoundarySpace, trial: BoundarySpace) -> &[C64; M * M] {
        use BoundarySpace::{W, Z};
        use OperatorKind::*;
        match (kind, test, trial) {
            (Single, W, W) => &self.v_ww,
            (Single, W, Z) => &self.v_wz,
            (Single, Z, W) => &self.v_zw,
            (Single, Z, Z) => &self.v_zz,
            (Double, W, Z) => &self.k_wz,
            (Double, Z, Z) => &self.k_zz,
            (AdjointDouble, Z, W) => &self.kp_zw,
            (AdjointDouble, Z, Z) => &self.kp_zz,
            (Hypersingular, Z, Z) => &self.w_zz,
            _ => unreachable!("validated by Needs::from_specs"),
        }
    }
}

/// A pair rule with its distinct points on each side listed once.
struct IndexedRule {
    x: Vec<[f64; 2]>,
    y: Vec<[f64; 2]>,
    /// `(x index, y index, weight)`, sorted by x index.
    by_x: Vec<(u32, u32, f64)>,
    /// The same entries sorted by y index.
    by_y: Vec<(u32, u32, f64)>,
}

impl IndexedRule {
    fn new(rule: &PairRule) -> Self {
        fn index(points: &mut Vec<[f64; 2]>, seen: &mut HashMap<[u64; 2], u32>, p: &[f64; 2]) -> u32 {
            *seen.entry([p[0].to_bits(), p[1].to_bits()]).or_insert_with(|| {
                points.push(*p);
                (points.len() - 1) as u32
            })
        }
        let (mut x, mut y) = (Vec::new(), Vec::new());
        let (mut sx, mut sy) = (HashMap::new(), HashMap::new());
        let mut by_x: Vec<(u32, u32, f64)> = (0..rule.len())
            .map(|q| (index(&mut x, &mut sx, &rule.x[q]), index(&mut y, &mut sy, &rule.y[q]), rule.weights[q]))
            .collect();
        let mut by_y = by_x.clone();
        by_x.sort_by_key(|e| (e.0, e.1));
        by_y.sort_by_key(|e| (e.1, e.0));
        Self { x, y, by_x, by_y }
    }
}

/// Iterates over quadrature point pairs of panel pairs.
struct Integrator<'a> {
    sp: &'a TraceSpaces,
    k: f64,
    near_ratio: f64,
    near: Vec<Vec<(QPoint, f64)>>,
    far: Vec<Vec<(QPoint, f64)>>,
    vertex: IndexedRule,
    edge: IndexedRule,
    identical: IndexedRule,
    func: Option<SurfaceFn<'a>>,
    want_curl: bool,
}

impl<'a> Integrator<'a> {
    fn new(
        sp: &'a TraceSpaces,
        k: f64,
        opts: &BemOptions,
        func: Option<SurfaceFn<'a>>,
        want_curl: bool,
    ) -> Result<Self> {
        opts.check()?;
        let h_max = sp.panels().iter().map(|p| p.diameter).fold(0.0, f64::max);
        // One more point per direction for every two radians of phase across
        // the largest panel, and for every polynomial degree above one.
        let extra = (k * h_max / 2.0).floor() as usize + sp.degree() - 1;
        let mut me = Self {
            sp,
            k,
            near_ratio: opts.near_ratio,
            near: Vec::new(),
            far: Vec::new(),
            vertex: IndexedRule::new(&panel_quadrature(PairClass::Vertex, opts.singular_order + extra)?),
            edge: IndexedRule::new(&panel_quadrature(PairClass::Edge, opts.singular_order + extra)?),
            identical: IndexedRule::new(&panel_quadrature(PairClass::Identical, opts.singular_order + extra)?),
            func,
            want_curl,
        };
        me.near = me.panel_cache(opts.near_order + extra)?;
        me.far = me.panel_cache(opts.far_order + extra)?;
        Ok(me)
    }

    fn panel_cache(&self, n: usize) -> Result<Vec<Vec<(QPoint, f64)>>> {
        let rule = triangle_rule(n)?;
        Ok((0..self.sp.num_panels())
            .map(|t| {
                let jac = 2.0 * self.sp.panels()[t].area;
                rule.points.iter().zip(&rule.weights).map(|(xi, w)| (self.point(t, xi), w * jac)).collect()
            })
            .collect())
    }

    fn point(&self, t: usize, xi: &[f64; 2]) -> QPoint {
        let panel = &self.sp.panels()[t];
        let pos = panel.map(xi);
        let mut q = QPoint { pos, z: [0.0; MAX_Z], w: [0.0; MAX_W], curl: [[0.0; 3]; MAX_Z], f: C64::new(0.0, 0.0) };
        let nz = self.sp.nz_local();
        let nw = self.sp.nw_local();
        self.sp.z_element().eval(xi, &mut q.z[..nz]);
        self.sp.w_element().eval(xi, &mut q.w[..nw]);
        if self.want_curl {
            let mut g = [[0.0; 2]; MAX_Z];
            self.sp.z_element().grad(xi, &mut g[..nz]);
            for a in 0..nz {
                let grad =
                    geom::add(&geom::scale(&panel.grad_ref[0], g[a][0]), &geom::scale(&panel.grad_ref[1], g[a][1]));
                q.curl[a] = geom::cross(&grad, &panel.normal);
            }
        }
        if let Some(f) = self.func {
            q.f = f(&pos, t);
        }
        q
    }

    /// Point of panel `t` at reference-pair coordinates `s`, where the
    /// panel vertices are visited in the order `perm`.
    fn pair_point(&self, t: usize, perm: &[usize; 3], s: &[f64; 2]) -> QPoint {
        let b = barycentric(s);
        let mut lam = [0.0; 3];
        for i in 0..3 {
            lam[perm[i]] = b[i];
        }
        self.point(t, &[lam[1], lam[2]])
    }

    /// Calls `f(x, ys)` for every quadrature point `x` of the test panel
    /// `tau`, where `ys` lists the trial points of panel `sigma` paired with
    /// `x` and the pair weights. The pairs for `(sigma, tau)` are the swap
    /// of the pairs for `(tau, sigma)`.
    fn for_each(&self, tau: usize, sigma: usize, mut f: impl FnMut(&QPoint, &[(&QPoint, f64)])) {
        let tris = self.sp.surface().triangles();
        let (lo, hi) = (tau.min(sigma), tau.max(sigma));
        let (tl, th) = (&tris[lo], &tris[hi]);
        let mut shared = [(0, 0); 3];
        let mut n_shared = 0;
        for i in 0..3 {
            if let Some(j) = (0..3).find(|&j| th[j] == tl[i]) {
                shared[n_shared] = (i, j);
                n_shared += 1;
            }
        }
        let (rule, perm_lo, perm_hi) = match n_shared {
            0 => {
                let (pa, pb) = (&self.sp.panels()[tau], &self.sp.panels()[sigma]);
                let ratio = geom::dist(&pa.centroid, &pb.centroid) / pa.diameter.max(pb.diameter);
                let cache = if ratio < self.near_ratio { &self.near } else { &self.far };
                let mut ys: Vec<(&QPoint, f64)> = cache[sigma].iter().map(|(y, w)| (y, *w)).collect();
                for (x, wx) in &cache[tau] {
                    for (pair, (_, wy)) in ys.iter_mut().zip(&cache[sigma]) {
                        pair.1 = wx * wy;
                    }
                    f(x, &ys);
                }
                return;
            }
            1 => {
                let (i, j) = shared[0];
                (&self.vertex, [i, (i + 1) % 3, (i + 2) % 3], [j, (j + 1) % 3, (j + 2) % 3])
            }
            2 => {
                let (i0, j0) = shared[0];
                let (i1, j1) = shared[1];
                (&self.edge, [i0, i1, 3 - i0 - i1], [j0, j1, 3 - j0 - j1])
            }
            _ => (&self.identical, [0, 1, 2], [0, 1, 2]),
        };
        let jac = 4.0 * self.sp.panels()[lo].area * self.sp.panels()[hi].area;
        let pl: Vec<QPoint> = rule.x.iter().map(|s| self.pair_point(lo, &perm_lo, s)).collect();
        let ph: Vec<QPoint> = rule.y.iter().map(|s| self.pair_point(hi, &perm_hi, s)).collect();
        // Test points come from the x side of the rule when tau is the
        // lower-numbered panel.
        let (entries, test, trial) = if tau == lo { (&rule.by_x, &pl, &ph) } else { (&rule.by_y, &ph, &pl) };
        let key = |e: &(u32, u32, f64)| if tau == lo { (e.0, e.1) } else { (e.1, e.0) };
        let mut ys: Vec<(&QPoint, f64)> = Vec::new();
        let mut start = 0;
        while start < entries.len() {
            let ix = key(&entries[start]).0;
            ys.clear();
            let mut end = start;
            while end < entries.len() && key(&entries[end]).0 == ix {
                ys.push((&trial[key(&entries[end]).1 as usize], entries[end].2 * jac));
                end += 1;
            }
            f(&test[ix as usize], &ys);
            start = end;
        }
    }

    fn local(&self, tau: usize, sigma: usize, needs: &Needs, out: &mut Local, rows: &mut [[C64; M]; 6]) {
        let zero = C64::new(0.0, 0.0);
        *out = Local::zero();
        let with_f = self.func.is_some();
        let nz = self.sp.nz_local();
        let nw = self.sp.nw_local();
        let nx = self.sp.panels()[tau].normal;
        let ny = self.sp.panels()[sigma].normal;
        let k = self.k;
        let need_dy = needs.k_wz || needs.k_zz;
        let need_dx = needs.kp_zw || needs.kp_zz;
        let need_gw = needs.v_ww || needs.v_zw;
        let need_gz = needs.v_wz || needs.v_zz;
        let mut cc = [zero; M * M];
        self.for_each(tau, sigma, |x, ys| {
            // Kernel-weighted sums of trial functions against this test point.
            let mut gw = [zero; MAX_W];
            let mut gz = [zero; MAX_Z];
            let mut dyz = [zero; MAX_Z];
            let mut dxw = [zero; MAX_W];
            let mut dxz = [zero; MAX_Z];
            let mut gc = [[zero; 3]; MAX_Z];
            let mut acc = [zero; 3];
            for &(y, w) in ys {
                let r = geom::sub(&x.pos, &y.pos);
                let (g, gr) = kernel_parts(k, geom::norm(&r));
                let wg = g * w;
                if with_f {
                    let fy = y.f * w;
                    acc[0] += g * fy;
                    acc[1] += gr * fy * (-geom::dot(&ny, &r));
                    acc[2] += gr * fy * geom::dot(&nx, &r);
                }
                if need_gw {
                    for b in 0..nw {
                        gw[b] += wg * y.w[b];
                    }
                }
                if need_gz {
                    for b in 0..nz {
                        gz[b] += wg * y.z[b];
                    }
                }
                if need_dy {
                    let wdy = gr * (-geom::dot(&ny, &r) * w);
                    for b in 0..nz {
                        dyz[b] += wdy * y.z[b];
                    }
                }
                if need_dx {
                    let wdx = gr * (geom::dot(&nx, &r) * w);
                    if needs.kp_zw {
                        for b in 0..nw {
                            dxw[b] += wdx * y.w[b];
                        }
                    }
                    if needs.kp_zz {
                        for b in 0..nz {
                            dxz[b] += wdx * y.z[b];
                        }
                    }
                }
                if needs.w_zz {
                    for b in 0..nz {
                        for d in 0..3 {
                            gc[b][d] += wg * y.curl[b][d];
                        }
                    }
                }
            }
            if with_f {
                for a in 0..nw {
                    for i in 0..3 {
                        rows[i][a] += acc[i] * x.w[a];
                    }
                }
                for a in 0..nz {
                    for i in 0..3 {
                        rows[3 + i][a] += acc[i] * x.z[a];
                    }
                }
            }
            let outer = |block: &mut [C64; M * M], test: &[f64], trial: &[C64]| {
                for (a, ta) in test.iter().enumerate() {
                    for (b, tb) in trial.iter().enumerate() {
                        block[a * M + b] += tb * *ta;
                    }
                }
            };
            if needs.v_ww {
                outer(&mut out.v_ww, &x.w[..nw], &gw[..nw]);
            }
            if needs.v_wz {
                outer(&mut out.v_wz, &x.w[..nw], &gz[..nz]);
            }
            if needs.v_zw {
                outer(&mut out.v_zw, &x.z[..nz], &gw[..nw]);
            }
            if needs.v_zz {
                outer(&mut out.v_zz, &x.z[..nz], &gz[..nz]);
            }
            if needs.k_wz {
                outer(&mut out.k_wz, &x.w[..nw], &dyz[..nz]);
            }
            if needs.k_zz {
                outer(&mut out.k_zz, &x.z[..nz], &dyz[..nz]);
            }
            if needs.kp_zw {
                outer(&mut out.kp_zw, &x.z[..nz], &dxw[..nw]);
            }
            if needs.kp_zz {
                outer(&mut out.kp_zz, &x.z[..nz], &dxz[..nz]);
            }
            if needs.w_zz {
                for a in 0..nz {
                    for b in 0..nz {
                        let c = &gc[b];
                        cc[a * M + b] += c[0] * x.curl[a][0] + c[1] * x.curl[a][1] + c[2] * x.curl[a][2];
                    }
                }
            }
        });
        if needs.w_zz {
            let nn = k * k * geom::dot(&nx, &ny);
            for a in 0..nz {
                for b in 0..nz {
                    out.w_zz[a * M + b] = cc[a * M + b] - out.v_zz[a * M + b] * nn;
                }
            }
        }
    }

    /// Rows of all requested blocks belonging to test panel `tau`, and the
    /// tested operator values applied to the surface function: `[V, K, K']`
    /// against `W_h` then against `Z_h`.
    fn strip(&self, tau: usize, specs: &[BlockSpec], needs: &Needs) -> (Vec<Vec<C64>>, [[C64; M]; 6]) {
        let sp = self.sp;
        let mut strips: Vec<Vec<C64>> =
            specs.iter().map(|s| vec![C64::new(0.0, 0.0); sp.nloc(s.test) * sp.dim(s.trial)]).collect();
        let mut local = Local::zero();
        let mut rows = [[C64::new(0.0, 0.0); M]; 6];
        for sigma in 0..sp.num_panels() {
            self.local(tau, sigma, needs, &mut local, &mut rows);
            for (s, strip) in specs.iter().zip(strips.iter_mut()) {
                let ncols = sp.dim(s.trial);
                for (kind, c) in &s.terms {
                    let block = local.get(*kind, s.test, s.trial);
                    for a in 0..sp.nloc(s.test) {
                        for b in 0..sp.nloc(s.trial) {
                            strip[a * ncols + sp.dof(s.trial, sigma, b)] += c * block[a * M + b];
                        }
                    }
                }
            }
        }
        (strips, rows)
    }
}

fn map_chunks<T: Send>(n: usize, parallel: bool, f: impl Fn(usize) -> T + Sync, mut sink: impl FnMut(usize, T)) {
    const CHUNK: usize = 64;
    for start in (0..n).step_by(CHUNK) {
        let end = (start + CHUNK).min(n);
        let results: Vec<T> =
            if parallel { (start..end).into_par_iter().map(&f).collect() } else { (start..end).map(&f).collect() };
        for (i, r) in (start..end).zip(results) {
            sink(i, r);
        }
    }
}

/// Assembles dense Galerkin blocks, one per spec, in a single sweep over
/// panel pairs.
pub fn assemble_blocks(sp: &TraceSpaces, k: f64, opts: &BemOptions, specs: &[BlockSpec]) -> Result<Vec<Mat<C64>>> {
    Ok(sweep(sp, k, opts, specs, None)?.0)
}

/// Applies operators to the surface function `f(x, panel)` and tests the
/// result against the chosen space, one vector per spec. The hypersingular
/// operator is not available here.
pub fn apply_to_function(
    sp: &TraceSpaces,
    k: f64,
    opts: &BemOptions,
    f: &(dyn Fn(&Point, usize) -> C64 + Sync),
    specs: &[FunctionSpec],
) -> Result<Vec<Vec<C64>>> {
    Ok(sweep(sp, k, opts, &[], Some((f, specs)))?.1)
}

/// [`assemble_blocks`] and [`apply_to_function`] in one sweep, sharing the
/// kernel evaluations. Results equal those of the separate calls.
pub fn assemble_blocks_with_function(
    sp: &TraceSpaces,
    k: f64,
    opts: &BemOptions,
    specs: &[BlockSpec],
    f: &(dyn Fn(&Point, usize) -> C64 + Sync),
    fspecs: &[FunctionSpec],
) -> Result<BlocksAndLoads> {
    sweep(sp, k, opts, specs, Some((f, fspecs)))
}

/// Assembled blocks in spec order and applied-function vectors in
/// function-spec order.
pub type BlocksAndLoads = (Vec<Mat<C64>>, Vec<Vec<C64>>);

type FunctionJob<'a> = (SurfaceFn<'a>, &'a [FunctionSpec]);

fn sweep(
    sp: &TraceSpaces,
    k: f64,
    opts: &BemOptions,
    specs: &[BlockSpec],
    func: Option<FunctionJob<'_>>,
) -> Result<BlocksAndLoads> {
    let needs = Needs::from_specs(specs)?;
    let fspecs = func.map_or(&[][..], |(_, s)| s);
    for s in fspecs {
        if s.terms.iter().any(|(kind, _)| *kind == OperatorKind::Hypersingular) {
            return Err(Error::Unsupported("hypersingular operator applied to a function".into()));
        }
    }
    let integ = Integrator::new(sp, k, opts, func.map(|(f, _)| f), needs.w_zz)?;
    let mut out: Vec<Mat<C64>> = specs.iter().map(|s| Mat::zeros(sp.dim(s.test), sp.dim(s.trial))).collect();
    let mut vecs: Vec<Vec<C64>> = fspecs.iter().map(|s| vec![C64::new(0.0, 0.0); sp.dim(s.test)]).collect();
    map_chunks(
        sp.num_panels(),
        opts.parallel,
        |tau| integ.strip(tau, specs, &needs),
        |tau, (strips, rows)| {
            for ((s, strip), m) in specs.iter().zip(&strips).zip(out.iter_mut()) {
                let ncols = sp.dim(s.trial);
                for a in 0..sp.nloc(s.test) {
                    let row = sp.dof(s.test, tau, a);
                    for (col, v) in strip[a * ncols..(a + 1) * ncols].iter().enumerate() {
                        m[(row, col)] += *v;
                    }
                }
            }
            for (s, v) in fspecs.iter().zip(vecs.iter_mut()) {
                let base = match s.test {
                    BoundarySpace::W => 0,
                    BoundarySpace::Z => 3,
                };
                for (kind, c) in &s.terms {
                    let idx = base
                        + match kind {
                            OperatorKind::Single => 0,
                            OperatorKind::Double => 1,
                            _ => 2,
                        };
                    for a in 0..sp.nloc(s.test) {
                        v[sp.dof(s.test, tau, a)] += c * rows[idx][a];
                    }
                }
            }
        },
    );
    Ok((out, vecs))
}

/// Galerkin matrices of the four boundary integral operators.
#[derive(Debug, Clone)]
pub struct BemOperatorSet {
    pub k: f64,
    /// `<V φ_j, φ_i>` on `W_h x W_h`.
    pub single: Mat<C64>,
    /// `<K z_j, φ_i>`, test `W_h`, trial `Z_h`.
    pub double: Mat<C64>,
    /// `<K' φ_j, z_i>`, test `Z_h`, trial `W_h`.
    pub adjoint_double: Mat<C64>,
    /// `<W z_j, z_i>` on `Z_h x Z_h`.
    pub hypersingular: Mat<C64>,
}

pub fn assemble_operator_set(sp: &TraceSpaces, k: f64, opts: &BemOptions) -> Result<BemOperatorSet> {
    use BoundarySpace::{W, Z};
    use OperatorKind::*;
    let mut m = assemble_blocks(
        sp,
        k,
        opts,
        &[
            BlockSpec::single(Single, W, W),
            BlockSpec::single(Double, W, Z),
            BlockSpec::single(AdjointDouble, Z, W),
            BlockSpec::single(Hypersingular, Z, Z),
        ],
    )?
    .into_iter();
    Ok(BemOperatorSet {
        k,
        single: m.next().unwrap(),
        double: m.next().unwrap(),
        adjoint_double: m.next().unwrap(),
        hypersingular: m.next().unwrap(),
    })
}

pub fn assemble_single_layer(sp: &TraceSpaces, k: f64, opts: &BemOptions) -> Result<Mat<C64>> {
    let spec = BlockSpec::single(OperatorKind::Single, BoundarySpace::W, BoundarySpace::W);
    Ok(assemble_blocks(sp, k, opts, &[spec])?.remove(0))
}

pub fn assemble_double_layer(sp: &TraceSpaces, k: f64, opts: &BemOptions) -> Result<Mat<C64>> {
    let spec = BlockSpec::single(OperatorKind::Double, BoundarySpace::W, BoundarySpace::Z);
    Ok(assemble_blocks(sp, k, opts, &[spec])?.remove(0))
}

pub fn assemble_adjoint_double_layer(sp: &TraceSpaces, k: f64, opts: &BemOptions) -> Result<Mat<C64>> {
    let spec = BlockSpec::single(OperatorKind::AdjointDouble, BoundarySpace::Z, BoundarySpace::W);
    Ok(assemble_blocks(sp, k, opts, &[spec])?.remove(0))
}

pub fn assemble_hypersingular(sp: &TraceSpaces, k: f64, opts: &BemOptions) -> Result<Mat<C64>> {
    let spec = BlockSpec::single(OperatorKind::Hypersingular, BoundarySpace::Z, BoundarySpace::Z);
    Ok(assemble_blocks(sp, k, opts, &[spec])?.remove(0))
}

/// Combined operators of the exterior impedance formulation, tested
/// against `Z_h`: `B = -W - ik(1/2 - K)` on `Z_h`, and `A' = 1/2 + K' + ikV`
/// with trial `W_h` and with trial `Z_h`.
#[derive(Debug, Clone)]
pub struct CombinedOperators {
    pub b: Mat<C64>,
    pub ap_w: Mat<C64>,
    pub ap_z: Mat<C64>,
}

pub fn assemble_combined(sp: &TraceSpaces, k: f64, opts: &BemOptions) -> Result<CombinedOperators> {
    use BoundarySpace::{W, Z};
    use OperatorKind::*;
    let one = C64::new(1.0, 0.0);
    let ik = C64::new(0.0, k);
    let mut m = assemble_blocks(
        sp,
        k,
        opts,
        &[
            BlockSpec { test: Z, trial: Z, terms: vec![(Hypersingular, -one), (Double, ik)] },
            BlockSpec { test: Z, trial: W, terms: vec![(AdjointDouble, one), (Single, ik)] },
            BlockSpec { test: Z, trial: Z, terms: vec![(AdjointDouble, one), (Single, ik)] },
        ],
    )?
    .into_iter();
    let (mut b, mut ap_w, mut ap_z) = (m.next().unwrap(), m.next().unwrap(), m.next().unwrap());
    let m_zz = sp.mass(Z, Z)?;
    let m_zw = sp.mass(Z, W)?;
    for (i, j, v) in m_zz.iter() {
        b[(i, j)] -= ik * 0.5 * v;
        ap_z[(i, j)] += 0.5 * v;
    }
    for (i, j, v) in m_zw.iter() {
        ap_w[(i, j)] += 0.5 * v;
    }
    Ok(CombinedOperators { b, ap_w, ap_z })
}
