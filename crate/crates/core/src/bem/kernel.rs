use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::C64;

/// Helmholtz fundamental solution `exp(ik|x-y|) / (4π|x-y|)`.
pub fn green_kernel(k: f64, x: &Point, y: &Point) -> Result<C64> {
    let r = geom::dist(x, y);
    if r == 0.0 {
        return Err(Error::InvalidArgument("kernel evaluated at coincident points".into()));
    }
    Ok(kernel_parts(k, r).0)
}

/// `(G(r), G'(r) / r)` for distance `r > 0`.
#[inline]
pub(crate) fn kernel_parts(k: f64, r: f64) -> (C64, C64) {
    let (s, c) = (k * r).sin_cos();
    let e = C64::new(c, s);
    let g = e / (4.0 * PI * r);
    // G'(r) = e^{ikr} (ikr - 1) / (4π r²)
    let dg_over_r = e * C64::new(-1.0, k * r) / (4.0 * PI * r * r * r);
    (g, dg_over_r)
}
