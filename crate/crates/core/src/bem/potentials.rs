//! Point evaluation of single and double layer potentials off the surface.

use std::f64::consts::PI;

use super::spaces::{BoundarySpace, TraceSpaces, MAX_Z};
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::quadrature::{gauss_legendre, triangle_rule, Rule1d, TriangleRule};
use crate::C64;

/// Density of a layer potential, given by its coefficients in one of the
/// boundary spaces.
#[derive(Debug, Clone, Copy)]
pub enum Density<'a> {
    W(&'a [C64]),
    Z(&'a [C64]),
}

impl<'a> Density<'a> {
    fn space(&self) -> BoundarySpace {
        match self {
            Density::W(_) => BoundarySpace::W,
            Density::Z(_) => BoundarySpace::Z,
        }
    }

    fn coeffs(&self) -> &'a [C64] {
        match self {
            Density::W(c) | Density::Z(c) => c,
        }
    }
}

/// Value and gradient (with respect to the evaluation point) of a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValue {
    pub value: C64,
    pub gradient: [C64; 3],
}

/// Evaluates `Ṽφ(x) = ∫ G(x, y) φ(y)` and `K̃ψ(x) = ∫ ∂G/∂n(y) ψ(y)`.
///
/// Panels farther than `near_factor` diameters use a tensor rule with
/// `order` points per direction. Closer panels are split at the point
/// nearest to `x` and integrated in polar coordinates with a sinh-graded
/// radial variable, which resolves the near-singular peak.
#[derive(Debug, Clone)]
pub struct PotentialEvaluator<'a> {
    sp: &'a TraceSpaces,
    k: f64,
    near_factor: f64,
    far_rule: TriangleRule,
    line: Rule1d,
}

impl<'a> PotentialEvaluator<'a> {
    pub fn new(sp: &'a TraceSpaces, k: f64, order: usize) -> Result<Self> {
        Ok(Self { sp, k, near_factor: 3.0, far_rule: triangle_rule(order + 2)?, line: gauss_legendre(order + 2)? })
    }

    pub fn single_layer(&self, x: &Point, density: Density) -> Result<PotentialValue> {
        self.evaluate(x, density, false)
    }

    pub fn double_layer(&self, x: &Point, density: Density) -> Result<PotentialValue> {
        self.evaluate(x, density, true)
    }

    fn evaluate(&self, x: &Point, density: Density, double: bool) -> Result<PotentialValue> {
        let space = density.space();
        let coeffs = density.coeffs();
        if coeffs.len() != self.sp.dim(space) {
            return Err(Error::DimensionMismatch {
                what: "density",
                expected: self.sp.dim(space),
                found: coeffs.len(),
            });
        }
        let mut acc = PotentialValue { value: C64::new(0.0, 0.0), gradient: [C64::new(0.0, 0.0); 3] };
        let nloc = self.sp.nloc(space);
        for (t, panel) in self.sp.panels().iter().enumerate() {
            let p = &panel.points;
            let closest = geom::closest_point_on_triangle(x, &p[0], &p[1], &p[2]);
            let d = geom::dist(x, &closest);
            if d <= 1e-13 * panel.diameter {
                return Err(Error::InvalidArgument(format!("evaluation point lies on panel {t}")));
            }
            let local: Vec<C64> = (0..nloc).map(|a| coeffs[self.sp.dof(space, t, a)]).collect();
            let mut add = |y: &Point, w: f64| {
                let xi = panel.local_coords(y);
                let mut v = [0.0; MAX_Z];
                self.sp.eval(space, &xi, &mut v[..nloc]);
                let dens: C64 = local.iter().zip(&v).map(|(c, b)| c * b).sum();
                let (val, grad) = kernel_with_gradient(self.k, x, y, &panel.normal, double);
                let f = dens * w;
                acc.value += val * f;
                for r in 0..3 {
                    acc.gradient[r] += grad[r] * f;
                }
            };
            if d > self.near_factor * panel.diameter {
                let jac = 2.0 * panel.area;
                for (xi, w) in self.far_rule.points.iter().zip(&self.far_rule.weights) {
                    add(&panel.map(xi), w * jac);
                }
            } else {
                for i in 0..3 {
                    let (a, b) = (p[i], p[(i + 1) % 3]);
                    let e = geom::sub(&b, &a);
                    let unit = geom::scale(&e, 1.0 / geom::norm(&e));
                    let foot = geom::add(&a, &geom::scale(&unit, geom::dot(&geom::sub(&closest, &a), &unit)));
                    let height = geom::dist(&closest, &foot);
                    if height <= 1e-12 * panel.diameter {
                        continue;
                    }
                    let ta = geom::dot(&geom::sub(&a, &foot), &unit);
                    let tb = geom::dot(&geom::sub(&b, &foot), &unit);
                    // t = height sinh(v) and r = d sinh(u) keep both integrands
                    // analytic in a strip of fixed width around the real axis.
                    for (v, wv) in composite(&self.line, (ta / height).asinh(), (tb / height).asinh()) {
                        let q = geom::add(&foot, &geom::scale(&unit, height * v.sinh()));
                        let dir = geom::sub(&q, &closest);
                        let len = geom::norm(&dir);
                        let dir = geom::scale(&dir, 1.0 / len);
                        let dtheta = wv / v.cosh();
                        for (u, wu) in composite(&self.line, 0.0, (len / d).asinh()) {
                            let r = d * u.sinh();
                            let y = geom::add(&closest, &geom::scale(&dir, r));
                            add(&y, dtheta * wu * d * u.cosh() * r);
                        }
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// Gauss points on `[a, b]` split into pieces of length at most one.
fn composite(rule: &Rule1d, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
    let pieces = ((b - a).abs().ceil() as usize).max(1);
    let len = (b - a) / pieces as f64;
    (0..pieces).flat_map(move |i| {
        let start = a + i as f64 * len;
        rule.points.iter().zip(&rule.weights).map(move |(x, w)| (start + x * len, w * len))
    })
}

/// Largest deviations from the jump relations over all panel centroids.
///
/// With `[f] = f_int - f_ext` and the outward normal `n`, the relations are
/// `[Ṽφ] = 0`, `[∂Ṽφ/∂n] = φ`, `[K̃ψ] = -ψ` and `[∂K̃ψ/∂n] = 0`. Each entry
/// is divided by the largest coefficient modulus of its density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpErrors {
    pub single: f64,
    pub single_normal: f64,
    pub double: f64,
    pub double_normal: f64,
}

impl JumpErrors {
    pub fn max(&self) -> f64 {
        self.single.max(self.single_normal).max(self.double).max(self.double_normal)
    }
}

/// Evaluates both potentials at `c ± eps n` for every panel centroid `c`,
/// with `eps = offset_ratio * diameter`, and compares the jumps with the
/// densities.
pub fn jump_errors(
    sp: &TraceSpaces,
    k: f64,
    order: usize,
    offset_ratio: f64,
    single_density: &[C64],
    double_density: &[C64],
) -> Result<JumpErrors> {
    if !(offset_ratio > 0.0) {
        return Err(Error::InvalidArgument("offset ratio must be positive".into()));
    }
    let ev = PotentialEvaluator::new(sp, k, order)?;
    let scale = |c: &[C64]| c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (sphi, spsi) = (scale(single_density), scale(double_density));
    if sphi == 0.0 || spsi == 0.0 {
        return Err(Error::ZeroNorm("jump probe density"));
    }
    let mut out = JumpErrors { single: 0.0, single_normal: 0.0, double: 0.0, double_normal: 0.0 };
    let centre = [1.0 / 3.0, 1.0 / 3.0];
    for (t, panel) in sp.panels().iter().enumerate() {
        let eps = offset_ratio * panel.diameter;
        let inner = geom::sub(&panel.centroid, &geom::scale(&panel.normal, eps));
        let outer = geom::add(&panel.centroid, &geom::scale(&panel.normal, eps));
        let normal = |v: &PotentialValue| -> C64 { (0..3).map(|i| v.gradient[i] * panel.normal[i]).sum() };
        let (vi, vo) = (
            ev.single_layer(&inner, Density::W(single_density))?,
            ev.single_layer(&outer, Density::W(single_density))?,
        );
        let (ki, ko) = (
            ev.double_layer(&inner, Density::Z(double_density))?,
            ev.double_layer(&outer, Density::Z(double_density))?,
        );
        let phi = sp.eval_function(BoundarySpace::W, single_density, t, &centre);
        let psi = sp.eval_function(BoundarySpace::Z, double_density, t, &centre);
        out.single = out.single.max((vi.value - vo.value).norm() / sphi);
        out.single_normal = out.single_normal.max((normal(&vi) - normal(&vo) - phi).norm() / sphi);
        out.double = out.double.max((ki.value - ko.value + psi).norm() / spsi);
        out.double_normal = out.double_normal.max((normal(&ki) - normal(&ko)).norm() / spsi);
    }
    Ok(out)
}

/// Kernel value and its x-gradient: `G` for the single layer or
/// `∂G/∂n(y)` for the double layer.
fn kernel_with_gradient(k: f64, x: &Point, y: &Point, ny: &Point, double: bool) -> (C64, [C64; 3]) {
    let r = geom::sub(x, y);
    let rho = geom::norm(&r);
    let (s, c) = (k * rho).sin_cos();
    let e = C64::new(c, s);
    let ikr = C64::new(0.0, k * rho);
    // q = G'(ρ)/ρ and q'(ρ)/ρ
    let q = e * (ikr - 1.0) / (4.0 * PI * rho.powi(3));
    if !double {
        let g = e / (4.0 * PI * rho);
        return (g, [q * r[0], q * r[1], q * r[2]]);
    }
    let dq = e * (3.0 - 3.0 * ikr - k * k * rho * rho) / (4.0 * PI * rho.powi(5));
    let nr = geom::dot(ny, &r);
    let val = -q * nr;
    let grad = [0, 1, 2].map(|i| -(q * ny[i] + dq * nr * r[i]));
    (val, grad)
}
