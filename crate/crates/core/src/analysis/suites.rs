//! Named invariant suites. Each runs its probes on built-in meshes and
//! reports every measured value against a pinned bound.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use faer::{Mat, Side};

use super::energy::{assemble_energy_parts, energy_identity_probe};
use crate::bem::{
    assemble_blocks, calderon_residuals, green_kernel, jump_errors, BemOptions, BlockSpec, BoundarySpace, OperatorKind,
    TraceSpaces,
};
use crate::coupling::{assemble_t_matrix, point_source, CaseDomain, CouplingOptions, ManufacturedCase};
use crate::error::{Error, Result};
use crate::fem::{FeSpace, MediumCoefficients};
use crate::geom::{self, Point};
use crate::linalg::{dense_matvec, norm2, rel_diff_vec};
use crate::mesh::extract_boundary;
use crate::C64;

/// Wavenumber `1.5 √3 π` used by the suites that need `k > 0`.
pub fn suite_wavenumber() -> f64 {
    1.5 * 3f64.sqrt() * PI
}

/// Quadrature order and offset ratio of each jump probe step.
pub const JUMP_SCHEDULE: [(usize, f64); 5] = [(2, 1e-1), (4, 1e-2), (6, 1e-3), (8, 1e-4), (10, 1e-5)];

/// Number of random triples drawn per level by the energy suite.
pub const ENERGY_TRIALS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Kernels,
    Jumps,
    Calderon,
    EnergyK0,
    Conventions,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Self::Kernels, Self::Jumps, Self::Calderon, Self::EnergyK0, Self::Conventions];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Kernels => "kernels",
            Self::Jumps => "jumps",
            Self::Calderon => "calderon",
            Self::EnergyK0 => "energy-k0",
            Self::Conventions => "conventions",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(Suite::name).collect();
            Error::InvalidArgument(format!("unknown suite '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

/// Comparison a measured value must satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Below(f64),
    Above(f64),
}

impl Bound {
    /// NaN never passes.
    pub fn holds(&self, value: f64) -> bool {
        match *self {
            Self::AtMost(l) => value <= l,
            Self::AtLeast(l) => value >= l,
            Self::Below(l) => value < l,
            Self::Above(l) => value > l,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Self::AtMost(_) => "<=",
            Self::AtLeast(_) => ">=",
            Self::Below(_) => "<",
            Self::Above(_) => ">",
        }
    }

    pub fn limit(&self) -> f64 {
        match *self {
            Self::AtMost(l) | Self::AtLeast(l) | Self::Below(l) | Self::Above(l) => l,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        Self { name: name.into(), value, bound }
    }

    pub fn passed(&self) -> bool {
        self.bound.holds(self.value)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {:.3e} {} {:.3e} [{}]",
            self.name,
            self.value,
            self.bound.symbol(),
            self.bound.limit(),
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Kernels => kernel_checks()?,
        Suite::Jumps => jump_checks()?,
        Suite::Calderon => calderon_checks()?,
        Suite::EnergyK0 => energy_checks(&[0, 1, 2])?,
        Suite::Conventions => convention_checks()?,
    };
    Ok(SuiteReport { suite, checks })
}

/// The unit cube meshes shared by the suites, with `2^(l+1)` cells per side
/// on level `l`.
fn cube_level(level: usize) -> Result<crate::mesh::VolumeMesh> {
    CaseDomain::Cube { cells: 2 }.mesh(level)
}

fn cube_surface_spaces(level: usize, degree: usize) -> Result<TraceSpaces> {
    TraceSpaces::new(Arc::new(extract_boundary(&cube_level(level)?)?), degree)
}

fn green(k: f64, x: &Point, y: &Point) -> C64 {
    green_kernel(k, x, y).expect("sample points are distinct")
}

/// Closed-form properties of the fundamental solution, checked with
/// central differences.
fn kernel_checks() -> Result<Vec<Check>> {
    let k = suite_wavenumber();
    let pairs: [(Point, Point); 4] = [
        ([0.1, 0.2, -0.3], [0.4, -0.1, 0.25]),
        ([0.0, 0.0, 0.0], [0.05, 0.02, -0.01]),
        ([1.0, -2.0, 0.5], [-0.7, 0.3, 1.2]),
        ([0.3, 0.3, 0.3], [0.31, 0.29, 0.35]),
    ];
    let (mut symmetry, mut helmholtz, mut laplace, mut reciprocal) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (x, y) in &pairs {
        let g = green(k, x, y);
        symmetry = symmetry.max((g - green(k, y, x)).norm() / g.norm());
        let h = 2e-4 * geom::dist(x, y);
        let mut lap = -6.0 * g;
        for d in 0..3 {
            let (mut xp, mut xm) = (*x, *x);
            xp[d] += h;
            xm[d] -= h;
            lap += green(k, &xp, y) + green(k, &xm, y);
        }
        lap /= h * h;
        helmholtz = helmholtz.max((lap + k * k * g).norm() / (k * k * g.norm()));
        let r = geom::dist(x, y);
        laplace = laplace.max((green(0.0, x, y) - C64::new(1.0 / (4.0 * PI * r), 0.0)).norm() * 4.0 * PI * r);
        reciprocal = reciprocal.max((green(1e-9, x, y) - green(0.0, x, y)).norm() * 4.0 * PI * r);
    }
    // Sommerfeld: r (∂G/∂r - ikG) = -G, so 4π r² |∂G/∂r - ikG| = 1.
    let mut radiation = 0.0f64;
    for r in [10.0, 100.0, 1000.0] {
        let (x, y) = ([0.0; 3], [r, 0.0, 0.0]);
        let h = 1e-4;
        let dr = (green(k, &x, &[r + h, 0.0, 0.0]) - green(k, &x, &[r - h, 0.0, 0.0])) / (2.0 * h);
        let s = (dr - C64::new(0.0, k) * green(k, &x, &y)).norm() * 4.0 * PI * r * r;
        radiation = radiation.max((s - 1.0).abs());
    }
    Ok(vec![
        Check::new("kernel symmetry G(x,y) = G(y,x)", symmetry, Bound::AtMost(1e-14)),
        Check::new("finite-difference Helmholtz residual", helmholtz, Bound::AtMost(1e-5)),
        Check::new("static kernel 1/(4 pi r)", laplace, Bound::AtMost(1e-14)),
        Check::new("continuity as k -> 0", reciprocal, Bound::AtMost(1e-8)),
        Check::new("radiation condition 4 pi r^2 |dG/dr - ikG| = 1", radiation, Bound::AtMost(1e-6)),
    ])
}

/// Smooth densities for the jump probes.
fn probe_densities(sp: &TraceSpaces) -> Result<(Vec<C64>, Vec<C64>)> {
    let phi = sp.project_w(|x, _| C64::new((x[0] + 2.0 * x[1]).cos(), (1.5 * x[2]).sin()))?;
    let psi = sp.interpolate_z(|x| C64::new(1.0 + x[0] * x[1], 0.5 * (x[2] - x[0]).cos()));
    Ok((phi, psi))
}

/// Jump relation probes on the level-0 cube surface, one per entry of
/// [`JUMP_SCHEDULE`].
pub fn jump_probe_history(k: f64) -> Result<Vec<[f64; 4]>> {
    let sp = cube_surface_spaces(0, 1)?;
    let (phi, psi) = probe_densities(&sp)?;
    JUMP_SCHEDULE
        .iter()
        .map(|&(order, ratio)| {
            let e = jump_errors(&sp, k, order, ratio, &phi, &psi)?;
            Ok([e.single, e.single_normal, e.double, e.double_normal])
        })
        .collect()
}

fn jump_checks() -> Result<Vec<Check>> {
    let history = jump_probe_history(suite_wavenumber())?;
    let names = ["[V phi]", "[dV phi/dn] - phi", "[K psi] + psi", "[dK psi/dn]"];
    let mut checks = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let ratio = history.windows(2).map(|w| w[1][i] / w[0][i]).fold(0.0, f64::max);
        checks.push(Check::new(format!("{name} largest step ratio"), ratio, Bound::Below(1.0)));
        checks.push(Check::new(format!("{name} final"), history[history.len() - 1][i], Bound::AtMost(1e-3)));
    }
    Ok(checks)
}

/// Calderón residuals `(first, second)` on cube levels `levels` for the
/// exact traces of the point source and, as the control, of the interior
/// plane wave, which is not an exterior solution.
pub fn calderon_history(k: f64, levels: &[usize]) -> Result<Vec<([f64; 2], [f64; 2])>> {
    let source = point_source(k);
    let control = ManufacturedCase::plane_and_point_source(k)?;
    levels
        .iter()
        .map(|&level| {
            let sp = cube_surface_spaces(level, 1)?;
            let normal = |t: usize| sp.panels()[t].normal;
            let d_src = sp.interpolate_z(|x| source(x).value);
            let n_src = sp.project_w(|x, t| source(x).normal_derivative(&normal(t)))?;
            let d_ctl = sp.interpolate_z(|x| control.interior(x).value);
            let n_ctl = sp.project_w(|x, t| control.interior(x).normal_derivative(&normal(t)))?;
            let r = calderon_residuals(&sp, k, &BemOptions::default(), &[(&d_src, &n_src), (&d_ctl, &n_ctl)])?;
            Ok(([r[0].first, r[0].second], [r[1].first, r[1].second]))
        })
        .collect()
}

fn calderon_checks() -> Result<Vec<Check>> {
    let history = calderon_history(suite_wavenumber(), &[0, 1, 2])?;
    let mut checks = Vec::new();
    for (i, name) in ["first identity", "second identity"].iter().enumerate() {
        let factor = history.windows(2).map(|w| w[0].0[i] / w[1].0[i]).fold(f64::INFINITY, f64::min);
        checks.push(Check::new(
            format!("point source {name}: smallest reduction per level"),
            factor,
            Bound::AtLeast(1.5),
        ));
        let last = history[history.len() - 1].1[i] / history[0].1[i];
        checks.push(Check::new(format!("plane wave control {name}: finest / coarsest"), last, Bound::AtLeast(0.5)));
    }
    Ok(checks)
}

/// Largest energy identity discrepancy on each cube level at `k = 0`.
pub fn energy_discrepancies(levels: &[usize], trials: usize) -> Result<Vec<f64>> {
    let medium = MediumCoefficients::homogeneous(0.0);
    let opts = CouplingOptions::default();
    levels
        .iter()
        .map(|&level| {
            let fe = FeSpace::new(Arc::new(cube_level(level)?), 1)?;
            let sp = TraceSpaces::new(fe.surface().clone(), 1)?;
            let t = assemble_t_matrix(&medium, &fe, &sp, &opts)?;
            let parts = assemble_energy_parts(&medium, &fe, &sp, &opts)?;
            energy_identity_probe(&t, &parts, trials, 0x5eed + level as u64)
        })
        .collect()
}

fn energy_checks(levels: &[usize]) -> Result<Vec<Check>> {
    let values = energy_discrepancies(levels, ENERGY_TRIALS)?;
    Ok(levels
        .iter()
        .zip(values)
        .map(|(level, v)| Check::new(format!("level {level} energy identity discrepancy"), v, Bound::AtMost(1e-10)))
        .collect())
}

fn hermitian_part_eigenvalues(a: &Mat<C64>) -> Result<Vec<f64>> {
    let h = Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let eig = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::InvalidArgument(format!("eigenvalue solver failed: {e:?}")))?;
    let s = eig.S();
    let mut v: Vec<f64> = (0..a.nrows()).map(|i| s[i].re).collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Static operator identities and the sign of the double layer, on the
/// level-0 cube surface for `p = 1, 2` and on level 1 for `p = 1`.
fn convention_checks() -> Result<Vec<Check>> {
    use BoundarySpace::{W, Z};
    use OperatorKind::*;
    let mut checks = Vec::new();
    for (level, degree) in [(0, 1), (0, 2), (1, 1)] {
        let tag = format!("level {level} p={degree}");
        let sp = cube_surface_spaces(level, degree)?;
        let specs = [
            BlockSpec::single(Single, W, W),
            BlockSpec::single(Double, W, Z),
            BlockSpec::single(AdjointDouble, Z, W),
            BlockSpec::single(Hypersingular, Z, Z),
        ];
        let [v, kk, kp, w]: [Mat<C64>; 4] =
            assemble_blocks(&sp, 0.0, &BemOptions::default(), &specs)?.try_into().expect("four blocks requested");
        let ev = hermitian_part_eigenvalues(&v)?;
        checks.push(Check::new(
            format!("{tag} V: smallest eigenvalue of Hermitian part / largest"),
            ev[0] / ev[ev.len() - 1],
            Bound::Above(0.0),
        ));
        let ew = hermitian_part_eigenvalues(&w)?;
        let w_norm = w.norm_l2();
        let ones = vec![C64::new(1.0, 0.0); sp.dim_z()];
        checks.push(Check::new(
            format!("{tag} W: |W 1| / |W|"),
            norm2(&dense_matvec(&w, &ones)) / w_norm,
            Bound::AtMost(1e-10),
        ));
        checks.push(Check::new(format!("{tag} W: smallest eigenvalue / |W|"), ew[0] / w_norm, Bound::AtLeast(-1e-12)));
        checks.push(Check::new(format!("{tag} W: second eigenvalue / |W|"), ew[1] / w_norm, Bound::Above(0.0)));
        let adj = (&kp - kk.adjoint()).norm_l2() / kk.norm_l2();
        checks.push(Check::new(format!("{tag} |K' - K^H| / |K|"), adj, Bound::AtMost(1e-6)));
        let lhs = dense_matvec(&kk, &ones);
        let rhs: Vec<C64> = sp.mass(W, Z)?.matvec(&ones).into_iter().map(|m| -0.5 * m).collect();
        checks.push(Check::new(
            format!("{tag} K 1 = -1/2 (interior limit)"),
            rel_diff_vec(&lhs, &rhs),
            Bound::AtMost(1e-3),
        ));
    }
    Ok(checks)
}
