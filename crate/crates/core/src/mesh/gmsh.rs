use std::collections::HashMap;
use std::path::Path;

use super::volume::{sorted_face, VolumeMesh};
use crate::error::{Error, Result};
use crate::geom::{self, Point};

/// Reads a Gmsh MSH 2.2 ASCII file. See [`parse_gmsh`].
pub fn load_gmsh(path: impl AsRef<Path>) -> Result<VolumeMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_gmsh(&text)
}

/// Parses MSH 2.2 ASCII text into a volume mesh.
///
/// Linear tetrahedra (type 4) become elements with their physical tag as
/// region. Points, lines and triangles (types 15, 1, 2) are skipped; any
/// other element type is rejected. Besides the checks of
/// [`VolumeMesh::new`], vertices lying inside a boundary face or edge
/// (hanging nodes) are reported as non-conforming.
pub fn parse_gmsh(text: &str) -> Result<VolumeMesh> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut nodes: Vec<Point> = Vec::new();
    let mut node_index: HashMap<u64, usize> = HashMap::new();
    let mut tets = Vec::new();
    let mut regions = Vec::new();
    let mut seen_format = false;
    let mut seen_nodes = false;

    let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };

    while let Some((ln, line)) = lines.next() {
        match line {
            "" => continue,
            "$MeshFormat" => {
                let (ln, fmt) = lines.next().ok_or_else(|| perr(ln, "truncated $MeshFormat"))?;
                let mut it = fmt.split_whitespace();
                let version = it.next().unwrap_or("");
                let file_type = it.next().unwrap_or("");
                if !version.starts_with("2.") {
                    return Err(perr(ln, &format!("unsupported MSH version {version}")));
                }
                if file_type != "0" {
                    return Err(perr(ln, "binary MSH files are not supported"));
                }
                expect_end(&mut lines, "$EndMeshFormat")?;
                seen_format = true;
            }
            "$Nodes" => {
                let (ln, count) = lines.next().ok_or_else(|| perr(ln, "truncated $Nodes"))?;
                let n: usize = count.parse().map_err(|_| perr(ln, "bad node count"))?;
                nodes.reserve(n);
                for _ in 0..n {
                    let (ln, l) = lines.next().ok_or_else(|| perr(ln, "truncated $Nodes"))?;
                    let f: Vec<&str> = l.split_whitespace().collect();
                    if f.len() < 4 {
                        return Err(perr(ln, "node line needs id x y z"));
                    }
                    let id: u64 = f[0].parse().map_err(|_| perr(ln, "bad node id"))?;
                    let mut p = [0.0; 3];
                    for d in 0..3 {
                        p[d] = f[d + 1].parse().map_err(|_| perr(ln, "bad coordinate"))?;
                    }
                    if node_index.insert(id, nodes.len()).is_some() {
                        return Err(perr(ln, &format!("duplicate node id {id}")));
                    }
                    nodes.push(p);
                }
                expect_end(&mut lines, "$EndNodes")?;
                seen_nodes = true;
            }
            "$Elements" => {
                if !seen_nodes {
                    return Err(perr(ln, "$Elements before $Nodes"));
                }
                let (ln, count) = lines.next().ok_or_else(|| perr(ln, "truncated $Elements"))?;
                let n: usize = count.parse().map_err(|_| perr(ln, "bad element count"))?;
                for _ in 0..n {
                    let (ln, l) = lines.next().ok_or_else(|| perr(ln, "truncated $Elements"))?;
                    let f: Vec<i64> = l
                        .split_whitespace()
                        .map(|s| s.parse::<i64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| perr(ln, "bad integer in element line"))?;
                    if f.len() < 3 {
                        return Err(perr(ln, "element line too short"));
                    }
                    let etype = f[1];
                    let ntags = usize::try_from(f[2]).map_err(|_| perr(ln, "bad tag count"))?;
                    let rest = &f[3..];
                    if rest.len() < ntags {
                        return Err(perr(ln, "missing element tags"));
                    }
                    let conn = &rest[ntags..];
                    match etype {
                        1 | 2 | 15 => continue,
                        4 => {
                            if conn.len() != 4 {
                                return Err(perr(ln, "tetrahedron needs four nodes"));
                            }
                            let mut t = [0usize; 4];
                            for (k, &id) in conn.iter().enumerate() {
                                t[k] = *u64::try_from(id)
                                    .ok()
                                    .and_then(|id| node_index.get(&id))
                                    .ok_or_else(|| perr(ln, &format!("unknown node {id}")))?;
                            }
                            tets.push(t);
                            regions.push(if ntags > 0 { rest[0] as i32 } else { 0 });
                        }
                        other => return Err(Error::Unsupported(format!("gmsh element type {other} at line {ln}"))),
                    }
                }
                expect_end(&mut lines, "$EndElements")?;
            }
            s if s.starts_with('$') => {
                let end = format!("$End{}", &s[1..]);
                loop {
                    match lines.next() {
                        Some((_, l)) if l == end => break,
                        Some(_) => {}
                        None => return Err(perr(ln, &format!("unterminated section {s}"))),
                    }
                }
            }
            _ => return Err(perr(ln, &format!("unexpected content '{line}'"))),
        }
    }
    if !seen_format {
        return Err(perr(1, "missing $MeshFormat"));
    }
    let mesh = VolumeMesh::new(nodes, tets, regions)?;
    check_hanging_nodes(&mesh)?;
    Ok(mesh)
}

fn expect_end<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, tag: &str) -> Result<()> {
    match lines.next() {
        Some((_, l)) if l == tag => Ok(()),
        Some((ln, l)) => Err(Error::Parse { line: ln, msg: format!("expected {tag}, found '{l}'") }),
        None => Err(Error::Parse { line: 0, msg: format!("missing {tag}") }),
    }
}

/// Rejects meshes where a mesh vertex lies on a boundary face without
/// being one of its corners.
fn check_hanging_nodes(mesh: &VolumeMesh) -> Result<()> {
    let mut count: HashMap<[usize; 3], u32> = HashMap::new();
    for t in mesh.tets() {
        for f in 0..4 {
            *count.entry(sorted_face(t, f)).or_insert(0) += 1;
        }
    }
    let verts = mesh.vertices();
    let mut faces: Vec<[usize; 3]> = count.into_iter().filter(|&(_, c)| c == 1).map(|(f, _)| f).collect();
    faces.sort_unstable();
    for (t, face) in faces.iter().enumerate() {
        let p = [verts[face[0]], verts[face[1]], verts[face[2]]];
        let h = geom::dist(&p[0], &p[1]).max(geom::dist(&p[1], &p[2])).max(geom::dist(&p[0], &p[2]));
        let tol = 1e-10 * h;
        let lo: Vec<f64> = (0..3).map(|d| p.iter().map(|q| q[d]).fold(f64::INFINITY, f64::min) - tol).collect();
        let hi: Vec<f64> = (0..3).map(|d| p.iter().map(|q| q[d]).fold(f64::NEG_INFINITY, f64::max) + tol).collect();
        for (v, x) in verts.iter().enumerate() {
            if (0..3).any(|d| x[d] < lo[d] || x[d] > hi[d]) || face.contains(&v) {
                continue;
            }
            let q = geom::closest_point_on_triangle(x, &p[0], &p[1], &p[2]);
            if geom::dist(&q, x) <= tol {
                return Err(Error::InvalidMesh(format!(
                    "non-conforming mesh: vertex {v} lies on boundary face {t} without being a corner"
                )));
            }
        }
    }
    Ok(())
}
