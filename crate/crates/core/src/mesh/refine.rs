//! Uniform red refinement: every triangle splits into four congruent
//! children through its edge midpoints.

use super::{BoundaryEdge, Mesh, Point2};
use std::collections::BTreeMap;

/// Refines the mesh once. Boundary tags and region tags are inherited;
/// hole-loop edges split at their midpoints, which stay on the polygonal
/// hole boundary (the polygon is not re-curved).
pub fn refine(mesh: &Mesh) -> Mesh {
    let mut nodes = mesh.nodes.clone();
    let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut mid = |a: usize, b: usize, nodes: &mut Vec<Point2>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoint.entry(key).or_insert_with(|| {
            let p = Point2::new(
                0.5 * (nodes[a].x + nodes[b].x),
                0.5 * (nodes[a].y + nodes[b].y),
            );
            nodes.push(p);
            nodes.len() - 1
        })
    };

    let mut elements = Vec::with_capacity(4 * mesh.elements.len());
    let mut region = Vec::with_capacity(4 * mesh.elements.len());
    for (e, &[a, b, c]) in mesh.elements.iter().enumerate() {
        let ab = mid(a, b, &mut nodes);
        let bc = mid(b, c, &mut nodes);
        let ca = mid(c, a, &mut nodes);
        for child in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
            elements.push(child);
            region.push(mesh.element_region[e]);
        }
    }

    let mut boundary_edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for be in &mesh.boundary_edges {
        let m = mid(be.a, be.b, &mut nodes);
        boundary_edges.push(BoundaryEdge { a: be.a, b: m, tag: be.tag });
        boundary_edges.push(BoundaryEdge { a: m, b: be.b, tag: be.tag });
    }
    let mut hole_loop = Vec::with_capacity(2 * mesh.hole_loop.len());
    for &[a, b] in &mesh.hole_loop {
        let m = mid(a, b, &mut nodes);
        hole_loop.push([a, m]);
        hole_loop.push([m, b]);
    }

    Mesh::from_parts(nodes, elements, region, boundary_edges, hole_loop, mesh.h / 2.0)
}
