use std::collections::HashMap;

use super::volume::VolumeMesh;
use crate::error::Result;
use crate::geom::{self, Point};

/// Regular (red) refinement: each tetrahedron is split into four corner
/// tetrahedra and four around the shortest diagonal of the inner
/// octahedron. Ties between diagonals go to the pair with the smallest
/// vertex indices. Region tags are inherited.
pub fn refine_uniform(mesh: &VolumeMesh) -> Result<VolumeMesh> {
    let mut vertices: Vec<Point> = mesh.vertices().to_vec();
    let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut tets = Vec::with_capacity(8 * mesh.num_tets());
    let mut regions = Vec::with_capacity(8 * mesh.num_tets());
    for (t, &reg) in mesh.tets().iter().zip(mesh.regions()) {
        let mut m = [[0usize; 4]; 4];
        for a in 0..4 {
            for b in a + 1..4 {
                let key = (t[a].min(t[b]), t[a].max(t[b]));
                let id = *mids.entry(key).or_insert_with(|| {
                    vertices.push(geom::midpoint(&vertices[t[a]], &vertices[t[b]]));
                    vertices.len() - 1
                });
                m[a][b] = id;
                m[b][a] = id;
            }
        }
        let mut children = vec![
            [t[0], m[0][1], m[0][2], m[0][3]],
            [m[0][1], t[1], m[1][2], m[1][3]],
            [m[0][2], m[1][2], t[2], m[2][3]],
            [m[0][3], m[1][3], m[2][3], t[3]],
        ];
        // Opposite midpoint pairs of the inner octahedron.
        let diagonals = [(m[0][1], m[2][3]), (m[0][2], m[1][3]), (m[0][3], m[1][2])];
        let key = |&(a, b): &(usize, usize)| {
            let len = geom::dist(&vertices[a], &vertices[b]);
            (len, a.min(b), a.max(b))
        };
        let best = (0..3)
            .min_by(|&i, &j| {
                let (li, ai, bi) = key(&diagonals[i]);
                let (lj, aj, bj) = key(&diagonals[j]);
                // Lengths within rounding are treated as equal.
                if (li - lj).abs() <= 1e-12 * li.max(lj) {
                    (ai, bi).cmp(&(aj, bj))
                } else {
                    li.partial_cmp(&lj).unwrap()
                }
            })
            .unwrap();
        let (a, b) = diagonals[best];
        let (c, c2) = diagonals[(best + 1) % 3];
        let (d, d2) = diagonals[(best + 2) % 3];
        children.extend([[a, b, c, d], [a, b, d, c2], [a, b, c2, d2], [a, b, d2, c]]);
        for mut ch in children {
            let p: Vec<Point> = ch.iter().map(|&v| vertices[v]).collect();
            if geom::tet_signed_volume(&p[0], &p[1], &p[2], &p[3]) < 0.0 {
                ch.swap(2, 3);
            }
            tets.push(ch);
            regions.push(reg);
        }
    }
    VolumeMesh::new(vertices, tets, regions)
}
