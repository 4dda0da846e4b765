use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Relative residual `|b - A x| / |b|` at which to stop.
    pub tol: f64,
    pub max_iterations: usize,
    /// Krylov dimension before a restart.
    pub restart: usize,
    pub block_preconditioner: bool,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iterations: 2000, restart: 200, block_preconditioner: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub solution: Vec<C64>,
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Restarted right-preconditioned GMRES for `A x = b` from `x = 0`.
pub fn gmres(
    apply: impl Fn(&[C64]) -> Vec<C64>,
    precondition: impl Fn(&[C64]) -> Vec<C64>,
    b: &[C64],
    opts: &GmresOptions,
) -> Result<GmresOutcome> {
    if !(opts.tol > 0.0) || opts.restart == 0 {
        return Err(Error::InvalidArgument("GMRES needs tol > 0 and restart > 0".into()));
    }
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![C64::new(0.0, 0.0); n];
    if bnorm == 0.0 {
        return Ok(GmresOutcome { solution: x, iterations: 0, residual: 0.0 });
    }
    let mut iterations = 0;
    loop {
        let ax = apply(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm2(&r);
        let mut residual = beta / bnorm;
        if residual <= opts.tol {
            return Ok(GmresOutcome { solution: x, iterations, residual });
        }
        if iterations >= opts.max_iterations {
            return Err(Error::NotConverged { iterations, residual });
        }
        let mut basis: Vec<Vec<C64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut hess: Vec<Vec<C64>> = Vec::new();
        let mut rot: Vec<(C64, C64)> = Vec::new();
        let mut g = vec![C64::new(beta, 0.0)];
        let mut zs: Vec<Vec<C64>> = Vec::new();
        while hess.len() < opts.restart && iterations < opts.max_iterations {
            let j = hess.len();
            let z = precondition(&basis[j]);
            let mut w = apply(&z);
            zs.push(z);
            let mut h = vec![C64::new(0.0, 0.0); j + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(v, &w);
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
                h[i] = hij;
            }
            let wn = norm2(&w);
            h[j + 1] = C64::new(wn, 0.0);
            for (i, &(c, s)) in rot.iter().enumerate() {
                let (a, bb) = (h[i], h[i + 1]);
                h[i] = c.conj() * a + s.conj() * bb;
                h[i + 1] = -s * a + c * bb;
            }
            let (a, bb) = (h[j], h[j + 1]);
            let den = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            let (c, s) = if den == 0.0 { (C64::new(1.0, 0.0), C64::new(0.0, 0.0)) } else { (a / den, bb / den) };
            h[j] = C64::new(den, 0.0);
            h[j + 1] = C64::new(0.0, 0.0);
            rot.push((c, s));
            let gj = g[j];
            g[j] = c.conj() * gj;
            g.push(-s * gj);
            hess.push(h);
            iterations += 1;
            residual = g[j + 1].norm() / bnorm;
            if residual <= opts.tol || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        let m = hess.len();
        let mut y = vec![C64::new(0.0, 0.0); m];
        for i in (0..m).rev() {
            let mut s = g[i];
            for k in i + 1..m {
                s -= hess[k][i] * y[k];
            }
            y[i] = s / hess[i][i];
        }
        for (yk, z) in y.iter().zip(&zs) {
            for (xi, zi) in x.iter_mut().zip(z) {
                *xi += yk * zi;
            }
        }
    }
}
