//! Line-oriented text format for meshes.
//!
//! ```text
//! MESH2 <n_nodes> <n_elems> <n_bedges>
//! x y                  one node per line
//! i j k region         one element per line (region EXTERIOR | CELL_INTERIOR)
//! i j tag              one boundary edge per line (tag OUTER | HOLE)
//! ```
//!
//! Indices are 0-based; floats are written with 17 significant digits so a
//! dump/load round trip is bit-exact.

use super::{BoundaryEdge, BoundaryTag, Mesh, Point2, Region};
use crate::error::{Error, Result};
use std::fmt::Write as _;

/// Formats a float with 17 significant digits (exact f64 round trip).
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Mesh {
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "MESH2 {} {} {}",
            self.n_nodes(),
            self.n_elements(),
            self.boundary_edges.len()
        )
        .unwrap();
        for p in &self.nodes {
            writeln!(out, "{} {}", fmt_f64(p.x), fmt_f64(p.y)).unwrap();
        }
        for (e, tri) in self.elements.iter().enumerate() {
            let region = match self.element_region[e] {
                Region::Exterior => "EXTERIOR",
                Region::CellInterior => "CELL_INTERIOR",
            };
            writeln!(out, "{} {} {} {}", tri[0], tri[1], tri[2], region).unwrap();
        }
        for be in &self.boundary_edges {
            let tag = match be.tag {
                BoundaryTag::Outer => "OUTER",
                BoundaryTag::Hole => "HOLE",
            };
            writeln!(out, "{} {} {}", be.a, be.b, tag).unwrap();
        }
        out
    }

    pub fn load(text: &str) -> Result<Mesh> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty mesh file".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("MESH2") {
            return Err(Error::Parse("missing MESH2 header".into()));
        }
        let counts: Vec<usize> = parts
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad count {t}"))))
            .collect::<Result<_>>()?;
        let [n_nodes, n_elems, n_bedges] = counts[..] else {
            return Err(Error::Parse("header needs three counts".into()));
        };
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let line = lines.next().ok_or_else(|| Error::Parse("truncated node list".into()))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad float {t}"))))
                .collect::<Result<_>>()?;
            let [x, y] = vals[..] else {
                return Err(Error::Parse(format!("node line needs two floats: {line}")));
            };
            nodes.push(Point2::new(x, y));
        }
        let mut elements = Vec::with_capacity(n_elems);
        let mut region = Vec::with_capacity(n_elems);
        for _ in 0..n_elems {
            let line =
                lines.next().ok_or_else(|| Error::Parse("truncated element list".into()))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [i, j, k, r] = toks[..] else {
                return Err(Error::Parse(format!("element line needs i j k region: {line}")));
            };
            let parse_idx = |t: &str| -> Result<usize> {
                let v: usize = t.parse().map_err(|_| Error::Parse(format!("bad index {t}")))?;
                if v >= n_nodes {
                    return Err(Error::Parse(format!("node index {v} out of range")));
                }
                Ok(v)
            };
            elements.push([parse_idx(i)?, parse_idx(j)?, parse_idx(k)?]);
            region.push(match r {
                "EXTERIOR" => Region::Exterior,
                "CELL_INTERIOR" => Region::CellInterior,
                other => return Err(Error::Parse(format!("unknown region {other}"))),
            });
        }
        let mut boundary_edges = Vec::with_capacity(n_bedges);
        for _ in 0..n_bedges {
            let line = lines.next().ok_or_else(|| Error::Parse("truncated edge list".into()))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [i, j, t] = toks[..] else {
                return Err(Error::Parse(format!("edge line needs i j tag: {line}")));
            };
            let a: usize = i.parse().map_err(|_| Error::Parse(format!("bad index {i}")))?;
            let b: usize = j.parse().map_err(|_| Error::Parse(format!("bad index {j}")))?;
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::Parse("edge index out of range".into()));
            }
            let tag = match t {
                "OUTER" => BoundaryTag::Outer,
                "HOLE" => BoundaryTag::Hole,
                other => return Err(Error::Parse(format!("unknown tag {other}"))),
            };
            boundary_edges.push(BoundaryEdge { a, b, tag });
        }

        // The format does not carry h or the hole loop; both are recovered.
        let h = estimate_h(&nodes, &elements);
        let mut hole_loop: Vec<[usize; 2]> = boundary_edges
            .iter()
            .filter(|be| be.tag == BoundaryTag::Hole)
            .map(|be| [be.a, be.b])
            .collect();
        if hole_loop.is_empty() && region.contains(&Region::CellInterior) {
            hole_loop = region_interface_edges(&elements, &region);
        }
        let mesh = Mesh::from_parts(nodes, elements, region, boundary_edges, hole_loop, h);
        mesh.validate()?;
        Ok(mesh)
    }
}

/// Nominal element size of a loaded mesh: median of per-element longest
/// edges.
fn estimate_h(nodes: &[Point2], elements: &[[usize; 3]]) -> f64 {
    if elements.is_empty() {
        return 1.0;
    }
    let mut longest: Vec<f64> = elements
        .iter()
        .map(|&[a, b, c]| {
            nodes[a]
                .dist(nodes[b])
                .max(nodes[b].dist(nodes[c]))
                .max(nodes[c].dist(nodes[a]))
        })
        .collect();
    longest.sort_by(|x, y| x.partial_cmp(y).unwrap());
    longest[longest.len() / 2]
}

/// Edges separating exterior from cell-interior elements, oriented with
/// the exterior on the left.
fn region_interface_edges(elements: &[[usize; 3]], region: &[Region]) -> Vec<[usize; 2]> {
    use std::collections::BTreeMap;
    let mut owner: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
    for (e, tri) in elements.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            owner
                .entry((a.min(b), a.max(b)))
                .or_default()
                .push((e, a < b));
        }
    }
    let mut interface = Vec::new();
    for ((lo, hi), owners) in owner {
        if owners.len() != 2 {
            continue;
        }
        let regions = [region[owners[0].0], region[owners[1].0]];
        if regions[0] == regions[1] {
            continue;
        }
        // Orient so the exterior element sees the edge as (a, b) with the
        // exterior on the left, matching its own counterclockwise order.
        let ext = if regions[0] == Region::Exterior { owners[0] } else { owners[1] };
        if ext.1 {
            interface.push([lo, hi]);
        } else {
            interface.push([hi, lo]);
        }
    }
    interface
}
