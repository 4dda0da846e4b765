//! Gauss–Jacobi rules and conical-product rules on the reference simplices.

use faer::{Mat, Side};

use crate::error::{Error, Result};

/// One-dimensional rule on [0, 1] for the weight `(1 - t)^alpha`.
#[derive(Debug, Clone)]
pub struct Rule1d {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Jacobi rule with `n` points on [0, 1] for weight `(1-t)^alpha`,
/// exact for polynomials of degree `2n - 1`. Computed with the
/// Golub–Welsch eigenvalue method.
pub fn gauss_jacobi(n: usize, alpha: u32) -> Result<Rule1d> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
    }
    let a = alpha as f64;
    let b = 0.0;
    let mut jac = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        let jf = j as f64;
        let s = 2.0 * jf + a + b;
        let diag = if j == 0 { (b - a) / (a + b + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
        jac[(j, j)] = diag;
        if j > 0 {
            let off = (4.0 * jf * (jf + a) * (jf + b) * (jf + a + b) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            jac[(j, j - 1)] = off;
            jac[(j - 1, j)] = off;
        }
    }
    // Total mass of (1-x)^a on [-1, 1].
    let mu0 = 2f64.powf(a + 1.0) / (a + 1.0);
    let eig = jac
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::InvalidArgument("Golub-Welsch eigenproblem failed".into()))?;
    let u = eig.U();
    let s = eig.S();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = s[i];
            let w = mu0 * u[(0, i)] * u[(0, i)];
            ((x + 1.0) / 2.0, w / 2f64.powf(a + 1.0))
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    Ok(Rule1d { points: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

/// Gauss–Legendre rule with `n` points on [0, 1].
pub fn gauss_legendre(n: usize) -> Result<Rule1d> {
    gauss_jacobi(n, 0)
}

/// Rule on a reference simplex `{x_i >= 0, sum x_i <= 1}` of dimension `D`.
#[derive(Debug, Clone)]
pub struct SimplexRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
}

pub type TriangleRule = SimplexRule<2>;
pub type TetRule = SimplexRule<3>;

/// Number of points per direction for exactness of total degree `order`.
pub fn points_for_order(order: usize) -> usize {
    (order + 2) / 2
}

/// Conical-product rule on the reference triangle with `n` points per
/// direction (`n^2` points), exact for total degree `2n - 1`.
pub fn triangle_rule(n: usize) -> Result<TriangleRule> {
    let g1 = gauss_jacobi(n, 1)?;
    let g0 = gauss_jacobi(n, 0)?;
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (t1, w1) in g1.points.iter().zip(&g1.weights) {
        for (t2, w2) in g0.points.iter().zip(&g0.weights) {
            points.push([*t1, (1.0 - t1) * t2]);
            weights.push(w1 * w2);
        }
    }
    Ok(SimplexRule { points, weights })
}

/// Conical-product rule on the reference tetrahedron with `n` points per
/// direction (`n^3` points), exact for total degree `2n - 1`.
pub fn tet_rule(n: usize) -> Result<TetRule> {
    let g2 = gauss_jacobi(n, 2)?;
    let g1 = gauss_jacobi(n, 1)?;
    let g0 = gauss_jacobi(n, 0)?;
    let mut points = Vec::with_capacity(n * n * n);
    let mut weights = Vec::with_capacity(n * n * n);
    for (t1, w1) in g2.points.iter().zip(&g2.weights) {
        for (t2, w2) in g1.points.iter().zip(&g1.weights) {
            for (t3, w3) in g0.points.iter().zip(&g0.weights) {
                let r = 1.0 - t1;
                points.push([*t1, r * t2, r * (1.0 - t2) * t3]);
                weights.push(w1 * w2 * w3);
            }
        }
    }
    Ok(SimplexRule { points, weights })
}
