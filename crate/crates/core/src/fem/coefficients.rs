use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mesh::VolumeMesh;
use crate::quadrature::{points_for_order, tet_rule};
use crate::C64;

type RealField = Arc<dyn Fn(&Point, i32) -> f64 + Send + Sync>;
type ComplexField = Arc<dyn Fn(&Point, i32) -> C64 + Send + Sync>;

/// Wavenumber, diffusion coefficient and refraction index of the medium
/// inside the coupling boundary. Fields receive the point and the region
/// tag of the element being integrated.
#[derive(Clone)]
pub struct MediumCoefficients {
    pub k: f64,
    diffusion: RealField,
    refraction: ComplexField,
    /// Lower and upper bounds checked for the diffusion coefficient.
    pub diffusion_bounds: (f64, f64),
    /// Lower bound checked for `|n|`.
    pub refraction_floor: f64,
}

impl std::fmt::Debug for MediumCoefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MediumCoefficients")
            .field("k", &self.k)
            .field("diffusion_bounds", &self.diffusion_bounds)
            .field("refraction_floor", &self.refraction_floor)
            .finish_non_exhaustive()
    }
}

impl MediumCoefficients {
    /// `A = 1`, `n = 1`.
    pub fn homogeneous(k: f64) -> Self {
        Self {
            k,
            diffusion: Arc::new(|_, _| 1.0),
            refraction: Arc::new(|_, _| C64::new(1.0, 0.0)),
            diffusion_bounds: (1.0, 1.0),
            refraction_floor: 1.0,
        }
    }

    /// Piecewise-constant diffusion keyed by region tag (missing tags get 1)
    /// and `n = 1`.
    pub fn piecewise_diffusion(k: f64, values: BTreeMap<i32, f64>) -> Self {
        let lo = values.values().copied().fold(1.0, f64::min);
        let hi = values.values().copied().fold(1.0, f64::max);
        Self {
            k,
            diffusion: Arc::new(move |_, r| values.get(&r).copied().unwrap_or(1.0)),
            refraction: Arc::new(|_, _| C64::new(1.0, 0.0)),
            diffusion_bounds: (lo, hi),
            refraction_floor: 1.0,
        }
    }

    /// General fields with explicit bounds.
    pub fn new(
        k: f64,
        diffusion: impl Fn(&Point, i32) -> f64 + Send + Sync + 'static,
        refraction: impl Fn(&Point, i32) -> C64 + Send + Sync + 'static,
        diffusion_bounds: (f64, f64),
        refraction_floor: f64,
    ) -> Self {
        Self { k, diffusion: Arc::new(diffusion), refraction: Arc::new(refraction), diffusion_bounds, refraction_floor }
    }

    pub fn diffusion(&self, x: &Point, region: i32) -> f64 {
        (self.diffusion)(x, region)
    }

    pub fn refraction(&self, x: &Point, region: i32) -> C64 {
        (self.refraction)(x, region)
    }

    /// Same medium at another wavenumber.
    pub fn with_k(&self, k: f64) -> Self {
        Self { k, ..self.clone() }
    }

    /// Checks the bounds at quadrature points of order `order`, and that
    /// `A = 1`, `n = 1` on every element with a vertex on the boundary.
    pub fn validate(&self, mesh: &VolumeMesh, boundary_vertex: &[bool], order: usize) -> Result<()> {
        let (lo, hi) = self.diffusion_bounds;
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidArgument(format!("wavenumber must be finite and nonnegative, got {}", self.k)));
        }
        if !(0.0 < lo && lo <= hi) || !(self.refraction_floor > 0.0) {
            return Err(Error::InvalidArgument("coefficient bounds must be positive and ordered".into()));
        }
        let rule = tet_rule(points_for_order(order))?;
        for e in 0..mesh.num_tets() {
            let p = mesh.tet_points(e);
            let reg = mesh.regions()[e];
            let touches = mesh.tets()[e].iter().any(|&v| boundary_vertex[v]);
            for xi in &rule.points {
                let x = map_point(&p, xi);
                let a = self.diffusion(&x, reg);
                let n = self.refraction(&x, reg);
                let fail = |msg: String| Error::Coefficient { element: e, point: x, msg };
                if !(a >= lo && a <= hi) {
                    return Err(fail(format!("diffusion {a} outside [{lo}, {hi}]")));
                }
                if !(n.norm() >= self.refraction_floor) {
                    return Err(fail(format!("|n| = {} below {}", n.norm(), self.refraction_floor)));
                }
                if touches && (a != 1.0 || n != C64::new(1.0, 0.0)) {
                    return Err(fail(format!("coefficients must equal 1 next to the boundary (A = {a}, n = {n})")));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn map_point(p: &[Point; 4], xi: &[f64; 3]) -> Point {
    let l0 = 1.0 - xi[0] - xi[1] - xi[2];
    let mut x = [0.0; 3];
    for d in 0..3 {
        x[d] = l0 * p[0][d] + xi[0] * p[1][d] + xi[1] * p[2][d] + xi[2] * p[3][d];
    }
    x
}
