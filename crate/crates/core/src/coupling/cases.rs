use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::MediumCoefficients;
use crate::geom::{self, Point};
use crate::mesh::{cube_mesh, refine_uniform, tensor_grid_mesh, VolumeMesh};
use crate::C64;

/// Value and gradient of a closed-form field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub value: C64,
    pub gradient: [C64; 3],
}

impl FieldSample {
    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Self { value: z, gradient: [z; 3] }
    }

    /// `∇f · n`.
    pub fn normal_derivative(&self, n: &Point) -> C64 {
        self.gradient[0] * n[0] + self.gradient[1] * n[1] + self.gradient[2] * n[2]
    }
}

pub type Field = Arc<dyn Fn(&Point) -> FieldSample + Send + Sync>;
pub type Source = Arc<dyn Fn(&Point, i32) -> C64 + Send + Sync>;

/// Coarsest mesh of a case; level `l` is `l` uniform refinements of it.
#[derive(Debug, Clone, PartialEq)]
pub enum CaseDomain {
    /// `(-1/2, 1/2)^3` with `cells^3` sub-cubes, region 0.
    Cube { cells: usize },
    /// `(-1/2, 1/2)^3` on a tensor grid with the given breaks; cells inside
    /// `(-w, w)^3` get region 1.
    Inclusion { breaks: Vec<f64>, half_width: f64 },
}

impl CaseDomain {
    pub fn base_mesh(&self) -> Result<VolumeMesh> {
        match self {
            Self::Cube { cells } => cube_mesh(1.0, *cells),
            Self::Inclusion { breaks, half_width } => {
                let w = *half_width;
                tensor_grid_mesh(breaks, move |c| i32::from(c.iter().all(|t| t.abs() < w)))
            }
        }
    }

    pub fn mesh(&self, level: usize) -> Result<VolumeMesh> {
        let mut mesh = self.base_mesh()?;
        for _ in 0..level {
            mesh = refine_uniform(&mesh)?;
        }
        Ok(mesh)
    }
}

/// A transmission problem with a known solution: an interior field on the
/// bounded domain and a radiating exterior field, which need not match
/// across the boundary. The mismatch enters the right-hand side as jump
/// data.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub k: f64,
    pub medium: MediumCoefficients,
    pub domain: CaseDomain,
    interior: Field,
    exterior: Option<Field>,
    source: Source,
}

impl std::fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("name", &self.name)
            .field("k", &self.k)
            .field("domain", &self.domain)
            .field("vanishing_exterior", &self.exterior.is_none())
            .finish_non_exhaustive()
    }
}

impl ManufacturedCase {
    /// General case. `exterior = None` means the exterior field vanishes
    /// identically. `source` must equal `-div(A ∇u) - (k n)^2 u` for the
    /// interior field.
    pub fn new(
        name: impl Into<String>,
        medium: MediumCoefficients,
        domain: CaseDomain,
        interior: Field,
        exterior: Option<Field>,
        source: Source,
    ) -> Result<Self> {
        if !(medium.k >= 0.0 && medium.k.is_finite()) {
            return Err(Error::InvalidArgument(format!("wavenumber must be finite and nonnegative, got {}", medium.k)));
        }
        Ok(Self { name: name.into(), k: medium.k, medium, domain, interior, exterior, source })
    }

    /// `u = sin(kx) cos(ky)` inside the unit cube, `e^{ikr}/r` outside,
    /// `A = 1`.
    pub fn plane_and_point_source(k: f64) -> Result<Self> {
        let interior: Field = Arc::new(move |x: &Point| {
            let (sx, cx) = (k * x[0]).sin_cos();
            let (sy, cy) = (k * x[1]).sin_cos();
            FieldSample {
                value: C64::new(sx * cy, 0.0),
                gradient: [C64::new(k * cx * cy, 0.0), C64::new(-k * sx * sy, 0.0), C64::new(0.0, 0.0)],
            }
        });
        let source_field = interior.clone();
        let source: Source = Arc::new(move |x, _| k * k * source_field(x).value);
        Self::new(
            "tc1",
            MediumCoefficients::homogeneous(k),
            CaseDomain::Cube { cells: 2 },
            interior,
            Some(point_source(k)),
            source,
        )
    }

    /// `u = s(x) s(y) s(z)` with `s(t) = sin²(5π/2 (t - 0.2))` inside the
    /// unit cube, `e^{ikr}/r` outside, `A = 2` on the inclusion
    /// `(-0.2, 0.2)^3` and `1` elsewhere. `u` and `A ∂u/∂n` are continuous
    /// across the inclusion faces. The coarsest mesh has cells of width 0.1,
    /// four per period of `s'`.
    pub fn inclusion(k: f64) -> Result<Self> {
        const W: f64 = 0.2;
        let a = 2.5 * PI;
        let s = move |t: f64| {
            let (sn, cs) = (a * (t - W)).sin_cos();
            let c2 = (2.0 * a * (t - W)).cos();
            (sn * sn, 2.0 * a * sn * cs, 2.0 * a * a * c2)
        };
        let interior: Field = Arc::new(move |x: &Point| {
            let [(s0, d0, _), (s1, d1, _), (s2, d2, _)] = [s(x[0]), s(x[1]), s(x[2])];
            FieldSample {
                value: C64::new(s0 * s1 * s2, 0.0),
                gradient: [C64::new(d0 * s1 * s2, 0.0), C64::new(s0 * d1 * s2, 0.0), C64::new(s0 * s1 * d2, 0.0)],
            }
        });
        let diffusion = BTreeMap::from([(1, 2.0)]);
        let medium = MediumCoefficients::piecewise_diffusion(k, diffusion.clone());
        let source: Source = Arc::new(move |x, region| {
            let [(s0, _, e0), (s1, _, e1), (s2, _, e2)] = [s(x[0]), s(x[1]), s(x[2])];
            let lap = e0 * s1 * s2 + s0 * e1 * s2 + s0 * s1 * e2;
            let coef = diffusion.get(&region).copied().unwrap_or(1.0);
            C64::new(-coef * lap - k * k * s0 * s1 * s2, 0.0)
        });
        Self::new(
            "tc2",
            medium,
            CaseDomain::Inclusion { breaks: (0..=10).map(|i| -0.5 + 0.1 * f64::from(i)).collect(), half_width: W },
            interior,
            Some(point_source(k)),
            source,
        )
    }

    /// Polynomial interior field of degree `p - 1` and a vanishing exterior
    /// field. The interior field, its mortar `∂u/∂n + iku` and the exterior
    /// trace then lie in the discrete spaces of degree `p`, so the Galerkin
    /// solution reproduces them up to rounding. Needs `p >= 2`.
    pub fn polynomial(k: f64, p: usize) -> Result<Self> {
        if !(2..=3).contains(&p) {
            return Err(Error::InvalidArgument(format!("the polynomial case needs degree 2 or 3, got {p}")));
        }
        let q = (p - 1) as i32;
        let c = [0.4, -0.3, 0.2];
        let lin = move |x: &Point| C64::new(0.7 + geom::dot(&c, x), 0.1);
        let interior: Field = Arc::new(move |x: &Point| {
            let l = lin(x);
            let dl = f64::from(q) * l.powi(q - 1);
            FieldSample { value: l.powi(q), gradient: c.map(|ci| dl * ci) }
        });
        let source: Source = Arc::new(move |x, _| {
            let l = lin(x);
            let lap =
                if q >= 2 { f64::from(q * (q - 1)) * geom::dot(&c, &c) * l.powi(q - 2) } else { C64::new(0.0, 0.0) };
            -lap - k * k * l.powi(q)
        });
        Self::new(
            "poly-exact",
            MediumCoefficients::homogeneous(k),
            CaseDomain::Cube { cells: 2 },
            interior,
            None,
            source,
        )
    }

    pub fn interior(&self, x: &Point) -> FieldSample {
        (self.interior)(x)
    }

    pub fn exterior(&self, x: &Point) -> FieldSample {
        self.exterior.as_ref().map_or_else(FieldSample::zero, |f| f(x))
    }

    /// Whether the exterior field is identically zero.
    pub fn exterior_vanishes(&self) -> bool {
        self.exterior.is_none()
    }

    /// Volume source at `x` in an element of region `region`.
    pub fn source(&self, x: &Point, region: i32) -> C64 {
        (self.source)(x, region)
    }

    /// Dirichlet jump `u_int - u_ext` on the boundary.
    pub fn dirichlet_jump(&self, x: &Point) -> C64 {
        self.interior(x).value - self.exterior(x).value
    }

    /// Neumann jump `∂u_int/∂n - ∂u_ext/∂n` for the outward normal `n`.
    /// The diffusion coefficient equals 1 next to the boundary.
    pub fn neumann_jump(&self, x: &Point, n: &Point) -> C64 {
        self.interior(x).normal_derivative(n) - self.exterior(x).normal_derivative(n)
    }

    /// Exact mortar variable `∂u_int/∂n + ik u_int`.
    pub fn mortar(&self, x: &Point, n: &Point) -> C64 {
        let s = self.interior(x);
        s.normal_derivative(n) + C64::new(0.0, self.k) * s.value
    }

    /// Exact exterior trace.
    pub fn exterior_trace(&self, x: &Point) -> C64 {
        self.exterior(x).value
    }
}

/// `e^{ikr}/r` centred at the origin.
pub fn point_source(k: f64) -> Field {
    Arc::new(move |x: &Point| {
        let r = geom::norm(x);
        let e = C64::new(0.0, k * r).exp();
        let d = e * C64::new(-1.0, k * r) / (r * r * r);
        FieldSample { value: e / r, gradient: x.map(|xi| d * xi) }
    })
}
