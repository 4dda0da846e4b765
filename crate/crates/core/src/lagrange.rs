//! Lagrange shape functions of arbitrary degree on reference simplices.

use crate::error::{Error, Result};

/// Nodal Lagrange element of degree `degree` on the reference simplex of
/// dimension `D` (2: triangle, 3: tetrahedron).
///
/// Nodes sit at equispaced barycentric positions `alpha / degree`; for
/// degree 0 the single node is the centroid. The basis function of node
/// `alpha` is the product `prod_i P_{alpha_i}(lambda_i)` with
/// `P_a(s) = prod_{j<a} (degree s - j) / (j + 1)`.
#[derive(Debug, Clone)]
pub struct SimplexLagrange<const D: usize> {
    degree: usize,
    /// Barycentric multi-index `(alpha_0, ..., alpha_D)` of each node.
    nodes: Vec<Vec<usize>>,
}

const MAX_DEGREE: usize = 6;

fn multi_indices(len: usize, total: usize) -> Vec<Vec<usize>> {
    if len == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in multi_indices(len - 1, total - first) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

impl<const D: usize> SimplexLagrange<D> {
    pub fn new(degree: usize) -> Result<Self> {
        if D != 2 && D != 3 {
            return Err(Error::Unsupported(format!("Lagrange elements in dimension {D}")));
        }
        if degree > MAX_DEGREE {
            return Err(Error::Unsupported(format!("Lagrange degree {degree}")));
        }
        Ok(Self { degree, nodes: multi_indices(D + 1, degree) })
    }

    fn node_position(degree: usize, alpha: &[usize]) -> [f64; D] {
        let mut x = [0.0; D];
        for d in 0..D {
            x[d] = if degree == 0 { 1.0 / (D as f64 + 1.0) } else { alpha[d + 1] as f64 / degree as f64 };
        }
        x
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_basis(&self) -> usize {
        self.nodes.len()
    }

    /// Barycentric multi-indices of the nodes, one per basis function.
    pub fn node_indices(&self) -> &[Vec<usize>] {
        &self.nodes
    }

    /// Reference coordinates of node `k`.
    pub fn node_point(&self, k: usize) -> [f64; D] {
        Self::node_position(self.degree, &self.nodes[k])
    }

    /// `P_a(lambda_i)` and its derivative for every barycentric coordinate
    /// `i` and every `a <= degree`.
    fn factor_tables(&self, x: &[f64; D]) -> [[[f64; 2]; MAX_DEGREE + 1]; 4] {
        let p = self.degree as f64;
        let mut t = [[[0.0; 2]; MAX_DEGREE + 1]; 4];
        for i in 0..=D {
            let s = if i == 0 { 1.0 - x.iter().sum::<f64>() } else { x[i - 1] };
            t[i][0] = [1.0, 0.0];
            for a in 1..=self.degree {
                let j = (a - 1) as f64;
                let f = (p * s - j) / (j + 1.0);
                let [v, dv] = t[i][a - 1];
                t[i][a] = [v * f, dv * f + v * p / (j + 1.0)];
            }
        }
        t
    }

    /// Values of all basis functions at reference point `x`.
    pub fn eval(&self, x: &[f64; D], out: &mut [f64]) {
        let t = self.factor_tables(x);
        for (o, alpha) in out.iter_mut().zip(&self.nodes) {
            *o = alpha.iter().enumerate().map(|(i, &a)| t[i][a][0]).product();
        }
    }

    /// Reference gradients of all basis functions at `x`.
    pub fn grad(&self, x: &[f64; D], out: &mut [[f64; D]]) {
        let t = self.factor_tables(x);
        for (o, alpha) in out.iter_mut().zip(&self.nodes) {
            // d/dlambda_i of the product, then the chain rule through
            // lambda_0 = 1 - sum(x).
            let mut dl = [0.0; 4];
            for (i, d) in dl.iter_mut().enumerate().take(D + 1) {
                *d = (0..=D).map(|j| t[j][alpha[j]][usize::from(i == j)]).product();
            }
            for d in 0..D {
                o[d] = dl[d + 1] - dl[0];
            }
        }
    }

    /// Global identity of node `k` on a cell with global vertices
    /// `verts`: the sorted list of (vertex, multiplicity) pairs. Shared
    /// nodes of neighbouring cells get equal keys.
    pub fn node_key(&self, k: usize, verts: &[usize]) -> Vec<(usize, usize)> {
        let mut key: Vec<(usize, usize)> =
            self.nodes[k].iter().zip(verts).filter(|(&a, _)| a > 0).map(|(&a, &v)| (v, a)).collect();
        key.sort_unstable();
        key
    }
}
