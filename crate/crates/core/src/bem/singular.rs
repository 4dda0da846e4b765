//! Product rules for pairs of triangles, including the regularizing
//! transformations for panels that touch.

use crate::error::Result;
use crate::quadrature::{gauss_legendre, triangle_rule};

/// Relative position of two panels, by number of shared vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairClass {
    Far,
    Vertex,
    Edge,
    Identical,
}

impl PairClass {
    pub fn from_shared_vertices(n: usize) -> Option<Self> {
        match n {
            0 => Some(Self::Far),
            1 => Some(Self::Vertex),
            2 => Some(Self::Edge),
            3 => Some(Self::Identical),
            _ => None,
        }
    }
}

/// Quadrature on a pair of reference triangles
/// `T = {(s1, s2) : 0 <= s2 <= s1 <= 1}`, where a panel with vertices
/// `(P0, P1, P2)` is parametrized as `P0 + s1 (P1 - P0) + s2 (P2 - P1)`.
///
/// For touching panels the shared vertex is `P0` in both, the shared edge
/// runs from `P0` to `P1` in both. Weights integrate over `T x T` (total
/// measure 1/4 for the constant 1).
#[derive(Debug, Clone)]
pub struct PairRule {
    pub x: Vec<[f64; 2]>,
    pub y: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl PairRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn push(&mut self, x: [f64; 2], y: [f64; 2], w: f64) {
        self.x.push(x);
        self.y.push(y);
        self.weights.push(w);
    }
}

/// Barycentric coordinates `(l0, l1, l2)` of a point of `T`.
pub fn barycentric(s: &[f64; 2]) -> [f64; 3] {
    [1.0 - s[0], s[0] - s[1], s[1]]
}

/// Pair rule with `n` Gauss points per integration variable.
pub fn panel_quadrature(class: PairClass, n: usize) -> Result<PairRule> {
    let mut rule = PairRule { x: Vec::new(), y: Vec::new(), weights: Vec::new() };
    if class == PairClass::Far {
        let t = triangle_rule(n)?;
        let to_t = |p: &[f64; 2]| [p[0] + p[1], p[1]];
        for (px, wx) in t.points.iter().zip(&t.weights) {
            for (py, wy) in t.points.iter().zip(&t.weights) {
                rule.push(to_t(px), to_t(py), wx * wy);
            }
        }
        return Ok(rule);
    }
    let g = gauss_legendre(n)?;
    let pts: Vec<(f64, f64)> = g.points.iter().copied().zip(g.weights.iter().copied()).collect();
    for &(xi, w0) in &pts {
        for &(e1, w1) in &pts {
            for &(e2, w2) in &pts {
                for &(e3, w3) in &pts {
                    let w = w0 * w1 * w2 * w3;
                    match class {
                        PairClass::Identical => identical(&mut rule, xi, e1, e2, e3, w),
                        PairClass::Edge => edge(&mut rule, xi, e1, e2, e3, w),
                        PairClass::Vertex => vertex(&mut rule, xi, e1, e2, e3, w),
                        PairClass::Far => unreachable!(),
                    }
                }
            }
        }
    }
    Ok(rule)
}

fn identical(r: &mut PairRule, xi: f64, e1: f64, e2: f64, e3: f64, w: f64) {
    let w = w * xi.powi(3) * e1 * e1 * e2;
    let a = ([xi, xi * (1.0 - e1 + e1 * e2)], [xi * (1.0 - e1 * e2 * e3), xi * (1.0 - e1)]);
    let b = ([xi, xi * e1 * (1.0 - e2 + e2 * e3)], [xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2)]);
    let c = ([xi * (1.0 - e1 * e2 * e3), xi * e1 * (1.0 - e2 * e3)], [xi, xi * e1 * (1.0 - e2)]);
    for (x, y) in [a, b, c] {
        r.push(x, y, w);
        r.push(y, x, w);
    }
}

/// Shared edge along `s2 = 0`. Splitting on the sign of `x1 - y1` and
/// scaling by the larger of the two leaves a prism in the remaining
/// relative coordinates, which is cut into two cones with apex at the
/// singular corner.
fn edge(r: &mut PairRule, xi: f64, e1: f64, e2: f64, e3: f64, w: f64) {
    let w = w * xi.powi(3) * e1 * e1;
    let a = ([xi, xi * e1 * e3], [xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2)]);
    let b = ([xi, xi * e1], [xi * (1.0 - e1 * e2 * (1.0 - e3)), xi * e1 * e2 * e3]);
    r.push(a.0, a.1, w);
    r.push(a.1, a.0, w);
    r.push(b.0, b.1, w * e2);
    r.push(b.1, b.0, w * e2);
}

fn vertex(r: &mut PairRule, xi: f64, e1: f64, e2: f64, e3: f64, w: f64) {
    let w = w * xi.powi(3) * e2;
    let x = [xi, xi * e1];
    let y = [xi * e2, xi * e2 * e3];
    r.push(x, y, w);
    r.push(y, x, w);
}
