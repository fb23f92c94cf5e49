//! Mesh generation: structured square grids, and local re-triangulation
//! around a polygonal cell boundary.
//!
//! The hole generator works on a structured background grid: polygon
//! vertices (plus split points so no boundary piece exceeds h) are inserted
//! as nodes, every grid triangle touching the polygon is removed, and the
//! annular gap between the cavity rim and the polygon is re-triangulated
//! by ear clipping followed by Delaunay flips. Grid nodes that would sit
//! closer than a fraction of h to the polygon are pushed radially outward
//! first so no sliver elements appear.

use super::geo;
use super::{BoundaryEdge, BoundaryTag, Mesh, Point2, Region, SubdomainSpec};
use crate::cellmodel::PolygonApprox;
use crate::error::{Error, Result};

/// Minimum element angle accepted by the generators (5 degrees).
const MIN_ANGLE_RAD: f64 = 5.0 * std::f64::consts::PI / 180.0;

/// Absolute area of the polygon with the given vertex loop.
pub fn polygon_area(poly: &[Point2]) -> f64 {
    geo::polygon_signed_area(poly).abs()
}

fn divides(extent: f64, h: f64) -> Option<usize> {
    let ratio = extent / h;
    let rounded = ratio.round();
    if rounded >= 1.0 && (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        Some(rounded as usize)
    } else {
        None
    }
}

fn check_alignment(half: f64, h: f64, subdomain: &SubdomainSpec) -> Result<usize> {
    if h <= 0.0 {
        return Err(Error::MeshAlignment(format!("element size {h} must be positive")));
    }
    let n = divides(2.0 * half, h).ok_or_else(|| {
        Error::MeshAlignment(format!("h = {h} does not divide the domain extent {}", 2.0 * half))
    })?;
    match subdomain {
        SubdomainSpec::AxisAlignedSquare { half_width } => {
            if *half_width >= half {
                return Err(Error::MeshAlignment(format!(
                    "subdomain half-width {half_width} is not strictly inside the domain"
                )));
            }
            // The lines |x| = w, |y| = w are grid lines iff h divides the
            // margin between the domain and subdomain boundaries.
            divides(half - half_width, h).ok_or_else(|| {
                Error::MeshAlignment(format!(
                    "h = {h} does not align the subdomain half-width {half_width} with the grid"
                ))
            })?;
        }
        SubdomainSpec::Polygon(pts) => {
            for p in pts {
                let fi = (p.x + half) / h;
                let fj = (p.y + half) / h;
                if (fi - fi.round()).abs() > 1e-9 || (fj - fj.round()).abs() > 1e-9 {
                    return Err(Error::MeshAlignment(format!(
                        "subdomain polygon vertex ({}, {}) is not a grid point",
                        p.x, p.y
                    )));
                }
            }
        }
    }
    Ok(n)
}

struct GridParts {
    nodes: Vec<Point2>,
    elements: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

/// Structured triangulation of (-half, half)²: each grid square is split
/// along alternating diagonals (checkerboard), which keeps the mesh
/// mirror-symmetric about both axes.
fn structured_grid(half: f64, h: f64, n: usize) -> GridParts {
    let stride = n + 1;
    let mut nodes = Vec::with_capacity(stride * stride);
    for j in 0..=n {
        for i in 0..=n {
            nodes.push(Point2::new(-half + i as f64 * h, -half + j as f64 * h));
        }
    }
    let id = |i: usize, j: usize| j * stride + i;
    let mut elements = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let bl = id(i, j);
            let br = id(i + 1, j);
            let tr = id(i + 1, j + 1);
            let tl = id(i, j + 1);
            if (i + j) % 2 == 0 {
                elements.push([bl, br, tr]);
                elements.push([bl, tr, tl]);
            } else {
                elements.push([bl, br, tl]);
                elements.push([br, tr, tl]);
            }
        }
    }
    let mut boundary_edges = Vec::with_capacity(4 * n);
    for i in 0..n {
        boundary_edges.push(BoundaryEdge { a: id(i, 0), b: id(i + 1, 0), tag: BoundaryTag::Outer });
    }
    for j in 0..n {
        boundary_edges.push(BoundaryEdge { a: id(n, j), b: id(n, j + 1), tag: BoundaryTag::Outer });
    }
    for i in (0..n).rev() {
        boundary_edges.push(BoundaryEdge { a: id(i + 1, n), b: id(i, n), tag: BoundaryTag::Outer });
    }
    for j in (0..n).rev() {
        boundary_edges.push(BoundaryEdge { a: id(0, j + 1), b: id(0, j), tag: BoundaryTag::Outer });
    }
    GridParts { nodes, elements, boundary_edges }
}

/// Structured triangulation of the square domain, all boundary edges
/// tagged OUTER. The subdomain must be grid-aligned so its boundary is a
/// union of mesh edges.
pub fn generate_square_mesh(
    side_half_length: f64,
    h: f64,
    subdomain: &SubdomainSpec,
) -> Result<Mesh> {
    let n = check_alignment(side_half_length, h, subdomain)?;
    let grid = structured_grid(side_half_length, h, n);
    let region = vec![Region::Exterior; grid.elements.len()];
    let mesh = Mesh::from_parts(grid.nodes, grid.elements, region, grid.boundary_edges, Vec::new(), h);
    mesh.validate()?;
    Ok(mesh)
}

/// Triangulation conforming to the polygon with the region inside it left
/// unmeshed; the polygonal boundary pieces become boundary edges tagged
/// HOLE.
pub fn generate_hole_mesh(
    side_half_length: f64,
    polygon: &PolygonApprox,
    h: f64,
    subdomain: &SubdomainSpec,
) -> Result<Mesh> {
    let (mesh, _) = holed_mesh_parts(side_half_length, polygon, h, subdomain)?;
    mesh.validate()?;
    Ok(mesh)
}

/// Same triangulation as [`generate_hole_mesh`], with the polygon interior
/// also triangulated and tagged CELL_INTERIOR. Exterior nodes and elements
/// keep exactly the hole-mesh indices.
pub fn generate_cell_conforming_mesh(
    side_half_length: f64,
    polygon: &PolygonApprox,
    h: f64,
    subdomain: &SubdomainSpec,
) -> Result<Mesh> {
    let (hole, loop_nodes) = holed_mesh_parts(side_half_length, polygon, h, subdomain)?;
    let mut nodes = hole.nodes.clone();
    let mut elements = hole.elements.clone();
    let mut region = hole.element_region.clone();
    // The hole boundary stays in `hole_loop` but is interior here.
    let boundary_edges: Vec<BoundaryEdge> = hole
        .boundary_edges
        .iter()
        .copied()
        .filter(|be| be.tag == BoundaryTag::Outer)
        .collect();

    // Interior: concentric scaled copies of the boundary loop, quad strips
    // between consecutive rings, and a fan around the center.
    let center = polygon.center;
    let mean_radius = loop_nodes
        .iter()
        .map(|&i| nodes[i].dist(center))
        .sum::<f64>()
        / loop_nodes.len() as f64;
    let n_rings = (mean_radius / h).round().max(1.0) as usize;
    let m = loop_nodes.len();
    let mut rings: Vec<Vec<usize>> = Vec::with_capacity(n_rings);
    for k in 1..n_rings {
        let frac = k as f64 / n_rings as f64;
        let ring: Vec<usize> = loop_nodes
            .iter()
            .map(|&i| {
                let p = center + (nodes[i] - center) * frac;
                nodes.push(p);
                nodes.len() - 1
            })
            .collect();
        rings.push(ring);
    }
    rings.push(loop_nodes.clone());
    let center_id = {
        nodes.push(center);
        nodes.len() - 1
    };
    for i in 0..m {
        let j = (i + 1) % m;
        elements.push([center_id, rings[0][i], rings[0][j]]);
        region.push(Region::CellInterior);
    }
    for k in 0..n_rings - 1 {
        for i in 0..m {
            let j = (i + 1) % m;
            let (ai, aj) = (rings[k][i], rings[k][j]);
            let (bi, bj) = (rings[k + 1][i], rings[k + 1][j]);
            elements.push([ai, bi, bj]);
            region.push(Region::CellInterior);
            elements.push([ai, bj, aj]);
            region.push(Region::CellInterior);
        }
    }
    let mesh = Mesh::from_parts(nodes, elements, region, boundary_edges, hole.hole_loop.clone(), h);
    mesh.validate()?;
    Ok(mesh)
}

/// Shared construction for hole and cell-conforming meshes. Returns the
/// hole mesh and the hole-loop node ids in counterclockwise order.
fn holed_mesh_parts(
    half: f64,
    polygon: &PolygonApprox,
    h: f64,
    subdomain: &SubdomainSpec,
) -> Result<(Mesh, Vec<usize>)> {
    let n = check_alignment(half, h, subdomain)?;
    let poly = &polygon.vertices;
    if geo::polygon_signed_area(poly) <= 0.0 {
        return Err(Error::DegenerateGeometry("polygon must be counterclockwise".into()));
    }
    let nv = poly.len();
    for i in 0..nv {
        let len = poly[i].dist(poly[(i + 1) % nv]);
        if len < 1e-3 * h {
            return Err(Error::DegenerateGeometry(format!(
                "polygon edge {i} of length {len:.3e} is shorter than 1e-3 h"
            )));
        }
    }
    match subdomain {
        SubdomainSpec::AxisAlignedSquare { half_width } => {
            for p in poly {
                if p.x.abs() >= *half_width || p.y.abs() >= *half_width {
                    return Err(Error::DegenerateGeometry(
                        "polygon is not strictly inside the subdomain".into(),
                    ));
                }
            }
        }
        SubdomainSpec::Polygon(sub) => {
            for p in poly {
                if !geo::point_in_polygon(*p, sub) {
                    return Err(Error::DegenerateGeometry(
                        "polygon is not strictly inside the subdomain".into(),
                    ));
                }
            }
        }
    }

    // Split each polygon edge into pieces no longer than h so the boundary
    // resolution matches the grid.
    let mut loop_pts: Vec<Point2> = Vec::new();
    for i in 0..nv {
        let a = poly[i];
        let b = poly[(i + 1) % nv];
        let pieces = (a.dist(b) / h).ceil().max(1.0) as usize;
        for k in 0..pieces {
            let t = k as f64 / pieces as f64;
            loop_pts.push(a + (b - a) * t);
        }
    }

    let protected = |p: Point2| -> bool {
        let tol = 1e-9 * h;
        let on_line = |v: f64, line: f64| (v - line).abs() <= tol;
        let mut lines = vec![half, -half];
        if let SubdomainSpec::AxisAlignedSquare { half_width } = subdomain {
            lines.push(*half_width);
            lines.push(-*half_width);
        }
        lines.iter().any(|&l| on_line(p.x, l) || on_line(p.y, l))
    };

    // Retry with increasing clearance if a sliver slips through.
    let mut last_err = None;
    for clearance_frac in [0.25, 0.18, 0.3] {
        match try_holed_mesh(half, h, n, polygon, &loop_pts, clearance_frac, &protected, subdomain)
        {
            Ok(found) => return Ok(found),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

#[allow(clippy::too_many_arguments)]
fn try_holed_mesh(
    half: f64,
    h: f64,
    n: usize,
    polygon: &PolygonApprox,
    loop_pts: &[Point2],
    clearance_frac: f64,
    protected: &dyn Fn(Point2) -> bool,
    subdomain: &SubdomainSpec,
) -> Result<(Mesh, Vec<usize>)> {
    let grid = structured_grid(half, h, n);
    let mut nodes = grid.nodes;
    let poly = &polygon.vertices;
    let snap_tol = 1e-9 * h;
    let clearance = clearance_frac * h;

    // Push exterior grid nodes off the polygon boundary. Nodes coinciding
    // with a loop point are left alone (they become loop nodes); nodes
    // strictly inside will be removed with their elements.
    let mut snapped: Vec<Option<usize>> = vec![None; loop_pts.len()];
    for (li, lp) in loop_pts.iter().enumerate() {
        let gi = ((lp.x + half) / h).round() as i64;
        let gj = ((lp.y + half) / h).round() as i64;
        if (0..=n as i64).contains(&gi) && (0..=n as i64).contains(&gj) {
            let idx = gj as usize * (n + 1) + gi as usize;
            if nodes[idx].dist(*lp) <= snap_tol {
                nodes[idx] = *lp;
                snapped[li] = Some(idx);
            }
        }
    }
    let snapped_ids: std::collections::BTreeSet<usize> =
        snapped.iter().flatten().copied().collect();
    for (idx, node) in nodes.iter_mut().enumerate() {
        if snapped_ids.contains(&idx) {
            continue;
        }
        let d = geo::dist_to_polygon(*node, poly);
        if d >= clearance {
            continue;
        }
        let inside = geo::point_in_polygon(*node, poly);
        if inside && d > snap_tol {
            continue; // removed together with its elements
        }
        if protected(*node) {
            return Err(Error::DegenerateGeometry(
                "polygon approaches a domain or subdomain boundary line too closely".into(),
            ));
        }
        let dir = *node - polygon.center;
        let norm = (dir.x * dir.x + dir.y * dir.y).sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateGeometry("grid node at the cell center".into()));
        }
        let mut step = (clearance - d).min(0.3 * h);
        let mut moved = *node + dir * (step / norm);
        // Radial motion may gain less distance than its length; take one
        // corrective step within the 0.3 h budget.
        if geo::dist_to_polygon(moved, poly) < 0.9 * clearance {
            step = (step * 1.5).min(0.3 * h);
            moved = *node + dir * (step / norm);
        }
        *node = moved;
    }

    // Remove every grid triangle whose closed hull touches the polygon.
    let mut removed = vec![false; grid.elements.len()];
    for (e, tri) in grid.elements.iter().enumerate() {
        let [a, b, c] = tri.map(|i| nodes[i]);
        let vertex_touches = [a, b, c].iter().any(|&v| {
            geo::point_in_polygon(v, poly) || geo::dist_to_polygon(v, poly) <= snap_tol
        });
        let contains_loop_point = loop_pts
            .iter()
            .any(|&lp| geo::point_in_triangle(lp, a, b, c, 1e-12));
        let crosses = (0..poly.len()).any(|i| {
            let (pa, pb) = (poly[i], poly[(i + 1) % poly.len()]);
            [(a, b), (b, c), (c, a)]
                .iter()
                .any(|&(ta, tb)| geo::segments_properly_intersect(ta, tb, pa, pb))
        });
        removed[e] = vertex_touches || contains_loop_point || crosses;
    }
    if !removed.iter().any(|&r| r) {
        return Err(Error::DegenerateGeometry(
            "polygon does not intersect any grid element".into(),
        ));
    }

    // The cavity must not eat into the outer boundary or the grid-aligned
    // subdomain boundary, or their loops would no longer be mesh edges.
    let guard_lines: Vec<f64> = match subdomain {
        SubdomainSpec::AxisAlignedSquare { half_width } => {
            vec![half, -half, *half_width, -*half_width]
        }
        SubdomainSpec::Polygon(_) => vec![half, -half],
    };
    for (e, tri) in grid.elements.iter().enumerate() {
        if !removed[e] {
            continue;
        }
        for k in 0..3 {
            let (pa, pb) = (nodes[tri[k]], nodes[tri[(k + 1) % 3]]);
            let tol = 1e-9 * h;
            for &line in &guard_lines {
                let on_v = (pa.x - line).abs() <= tol && (pb.x - line).abs() <= tol;
                let on_h = (pa.y - line).abs() <= tol && (pb.y - line).abs() <= tol;
                if on_v || on_h {
                    return Err(Error::DegenerateGeometry(
                        "cavity around the polygon reaches a domain or subdomain boundary".into(),
                    ));
                }
            }
        }
    }

    // Loop node ids: snapped grid nodes or fresh nodes.
    let loop_ids: Vec<usize> = loop_pts
        .iter()
        .enumerate()
        .map(|(li, lp)| {
            snapped[li].unwrap_or_else(|| {
                nodes.push(*lp);
                nodes.len() - 1
            })
        })
        .collect();

    // Cavity rim: edges with exactly one retained incident triangle that
    // also bound a removed one, oriented with the annulus on the left.
    let mut retained_count: std::collections::BTreeMap<(usize, usize), u8> = Default::default();
    for (e, tri) in grid.elements.iter().enumerate() {
        if removed[e] {
            continue;
        }
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            *retained_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut rim_next: std::collections::BTreeMap<usize, usize> = Default::default();
    for (e, tri) in grid.elements.iter().enumerate() {
        if removed[e] {
            continue;
        }
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let shared = retained_count[&(a.min(b), a.max(b))];
            let was_interior = grid
                .boundary_edges
                .iter()
                .all(|be| (be.a.min(be.b), be.a.max(be.b)) != (a.min(b), a.max(b)));
            if shared == 1 && was_interior {
                // Reverse the retained orientation so the cavity side is on
                // the left.
                if rim_next.insert(b, a).is_some() {
                    return Err(Error::DegenerateGeometry(
                        "cavity rim is non-manifold".into(),
                    ));
                }
            }
        }
    }
    if rim_next.is_empty() {
        return Err(Error::DegenerateGeometry("cavity has no rim".into()));
    }
    let rim_start = *rim_next.keys().next().unwrap();
    let mut rim = vec![rim_start];
    let mut cur = rim_start;
    loop {
        cur = *rim_next
            .get(&cur)
            .ok_or_else(|| Error::DegenerateGeometry("cavity rim is open".into()))?;
        if cur == rim_start {
            break;
        }
        rim.push(cur);
        if rim.len() > rim_next.len() {
            return Err(Error::DegenerateGeometry("cavity rim does not close".into()));
        }
    }
    if rim.len() != rim_next.len() {
        return Err(Error::DegenerateGeometry(
            "cavity rim splits into multiple loops".into(),
        ));
    }

    // Triangulate the annulus between the rim (counterclockwise) and the
    // polygon loop (clockwise), then improve with Delaunay flips.
    let inner_cw: Vec<usize> = loop_ids.iter().rev().copied().collect();
    let annulus = triangulate_annulus(&nodes, &rim, &inner_cw)?;

    // Assemble: retained grid triangles plus annulus triangles, dropping
    // orphaned grid nodes.
    let mut elements: Vec<[usize; 3]> = grid
        .elements
        .iter()
        .enumerate()
        .filter(|&(e, _)| !removed[e])
        .map(|(_, t)| *t)
        .collect();
    elements.extend(annulus);
    let mut used = vec![false; nodes.len()];
    for tri in &elements {
        for &i in tri {
            used[i] = true;
        }
    }
    for &i in &loop_ids {
        used[i] = true;
    }
    let mut node_map = vec![usize::MAX; nodes.len()];
    let mut final_nodes = Vec::new();
    for i in 0..nodes.len() {
        if used[i] {
            node_map[i] = final_nodes.len();
            final_nodes.push(nodes[i]);
        }
    }
    let elements: Vec<[usize; 3]> = elements.iter().map(|t| t.map(|i| node_map[i])).collect();

    for (e, tri) in elements.iter().enumerate() {
        let [a, b, c] = tri.map(|i| final_nodes[i]);
        if geo::orient(a, b, c) <= 0.0 {
            return Err(Error::DegenerateGeometry(format!(
                "generated element {e} is inverted"
            )));
        }
        if geo::min_angle(a, b, c) < MIN_ANGLE_RAD {
            return Err(Error::DegenerateGeometry(format!(
                "generated element {e} [({:.6}, {:.6}), ({:.6}, {:.6}), ({:.6}, {:.6})] has a corner of {:.3} degrees",
                a.x, a.y, b.x, b.y, c.x, c.y,
                geo::min_angle(a, b, c).to_degrees()
            )));
        }
    }

    let mut boundary_edges: Vec<BoundaryEdge> = grid
        .boundary_edges
        .iter()
        .map(|be| BoundaryEdge { a: node_map[be.a], b: node_map[be.b], tag: be.tag })
        .collect();
    // Hole edges oriented clockwise around the polygon: domain on the left.
    let m = loop_ids.len();
    let mut hole_loop = Vec::with_capacity(m);
    for i in 0..m {
        let a = node_map[loop_ids[(i + 1) % m]];
        let b = node_map[loop_ids[i]];
        boundary_edges.push(BoundaryEdge { a, b, tag: BoundaryTag::Hole });
        hole_loop.push([a, b]);
    }
    let loop_ids_final: Vec<usize> = loop_ids.iter().map(|&i| node_map[i]).collect();
    let region = vec![Region::Exterior; elements.len()];
    let mesh = Mesh::from_parts(final_nodes, elements, region, boundary_edges, hole_loop, h);
    Ok((mesh, loop_ids_final))
}

/// Ear-clips the region between an outer ring (counterclockwise) and an
/// inner ring (clockwise) after joining them with a bridge at a mutually
/// visible vertex pair.
fn triangulate_annulus(
    nodes: &[Point2],
    outer: &[usize],
    inner: &[usize],
) -> Result<Vec<[usize; 3]>> {
    // Rightmost inner vertex bridges to a visible outer vertex.
    let k = (0..inner.len())
        .max_by(|&a, &b| {
            nodes[inner[a]]
                .x
                .partial_cmp(&nodes[inner[b]].x)
                .unwrap()
        })
        .unwrap();
    let m_pt = nodes[inner[k]];

    let ring_edges = |ring: &[usize]| -> Vec<(Point2, Point2)> {
        (0..ring.len())
            .map(|i| (nodes[ring[i]], nodes[ring[(i + 1) % ring.len()]]))
            .collect()
    };
    let mut all_edges = ring_edges(outer);
    all_edges.extend(ring_edges(inner));

    let mut candidates: Vec<usize> = (0..outer.len()).collect();
    candidates.sort_by(|&a, &b| {
        nodes[outer[a]]
            .dist(m_pt)
            .partial_cmp(&nodes[outer[b]].dist(m_pt))
            .unwrap()
    });
    let inner_poly: Vec<Point2> = inner.iter().map(|&i| nodes[i]).collect();
    let mut bridge = None;
    'cand: for &j in &candidates {
        let o_pt = nodes[outer[j]];
        for &(ea, eb) in &all_edges {
            if geo::segments_properly_intersect(m_pt, o_pt, ea, eb) {
                continue 'cand;
            }
        }
        // The bridge midpoint must lie in the annulus, not in the hole.
        let mid = Point2::new(0.5 * (m_pt.x + o_pt.x), 0.5 * (m_pt.y + o_pt.y));
        if geo::point_in_polygon(mid, &inner_poly) {
            continue;
        }
        bridge = Some(j);
        break;
    }
    let j = bridge.ok_or_else(|| {
        Error::DegenerateGeometry("no visible bridge between cavity rim and polygon".into())
    })?;

    // Merged simple polygon: outer ring from j around to j, then inner ring
    // from k around to k, then back to the outer start.
    let mut merged: Vec<usize> = Vec::with_capacity(outer.len() + inner.len() + 2);
    for t in 0..=outer.len() {
        merged.push(outer[(j + t) % outer.len()]);
    }
    for t in 0..=inner.len() {
        merged.push(inner[(k + t) % inner.len()]);
    }

    let tris = ear_clip(nodes, &merged)?;
    Ok(delaunay_flip(nodes, tris, outer, inner))
}

fn ear_clip(nodes: &[Point2], polygon: &[usize]) -> Result<Vec<[usize; 3]>> {
    let mut ids: Vec<usize> = polygon.to_vec();
    let mut tris = Vec::with_capacity(ids.len().saturating_sub(2));
    let area_scale: f64 = {
        let pts: Vec<Point2> = ids.iter().map(|&i| nodes[i]).collect();
        geo::polygon_signed_area(&pts).abs().max(f64::MIN_POSITIVE)
    };
    let eps = 1e-14 * area_scale;
    while ids.len() > 3 {
        let n = ids.len();
        let mut clipped = false;
        for i in 0..n {
            let (ip, ic, inx) = (ids[(i + n - 1) % n], ids[i], ids[(i + 1) % n]);
            if ip == ic || ic == inx || ip == inx {
                continue;
            }
            let (a, b, c) = (nodes[ip], nodes[ic], nodes[inx]);
            if geo::orient(a, b, c) <= eps {
                continue;
            }
            // Closed containment: vertices exactly on the candidate diagonal
            // block the ear, which prevents T-junctions on collinear runs.
            let blocked = ids.iter().any(|&other| {
                if other == ip || other == ic || other == inx {
                    return false;
                }
                let p = nodes[other];
                if p.dist(a) < 1e-30 || p.dist(b) < 1e-30 || p.dist(c) < 1e-30 {
                    return false;
                }
                geo::point_in_triangle(p, a, b, c, 1e-12)
            });
            if blocked {
                continue;
            }
            tris.push([ip, ic, inx]);
            ids.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            // Duplicated bridge vertices can leave a degenerate pair; drop
            // exact repeats and retry once before giving up.
            let before = ids.len();
            ids.dedup();
            if ids.len() >= 2 && ids[0] == *ids.last().unwrap() {
                ids.pop();
            }
            if ids.len() == before {
                return Err(Error::DegenerateGeometry("ear clipping stalled".into()));
            }
        }
    }
    if ids.len() == 3 && ids[0] != ids[1] && ids[1] != ids[2] && ids[0] != ids[2] {
        let (a, b, c) = (nodes[ids[0]], nodes[ids[1]], nodes[ids[2]]);
        if geo::orient(a, b, c) > eps {
            tris.push([ids[0], ids[1], ids[2]]);
        }
    }
    Ok(tris)
}

/// Lawson flips toward the constrained Delaunay triangulation of the
/// patch, which maximizes the minimum angle over all triangulations of
/// the same vertex set. Ring edges are constrained and never flipped.
fn delaunay_flip(
    nodes: &[Point2],
    mut tris: Vec<[usize; 3]>,
    outer: &[usize],
    inner: &[usize],
) -> Vec<[usize; 3]> {
    use std::collections::BTreeSet;
    let mut constrained: BTreeSet<(usize, usize)> = BTreeSet::new();
    for ring in [outer, inner] {
        for i in 0..ring.len() {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            constrained.insert((a.min(b), a.max(b)));
        }
    }
    let max_flips = 40 * tris.len().max(10);
    for _pass in 0..max_flips {
        let mut flipped = false;
        let mut edge_owner: std::collections::BTreeMap<(usize, usize), Vec<usize>> =
            Default::default();
        for (ti, t) in tris.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edge_owner.entry((a.min(b), a.max(b))).or_default().push(ti);
            }
        }
        'edges: for (&edge, owners) in &edge_owner {
            if owners.len() != 2 || constrained.contains(&edge) {
                continue;
            }
            let (t1, t2) = (owners[0], owners[1]);
            // Directed edge (p, q) as it appears in t1; t2 holds (q, p).
            let tri1 = tris[t1];
            let Some(k) = (0..3).find(|&k| {
                let (a, b) = (tri1[k], tri1[(k + 1) % 3]);
                (a.min(b), a.max(b)) == edge
            }) else {
                continue;
            };
            let (p, q) = (tri1[k], tri1[(k + 1) % 3]);
            let c = tri1[(k + 2) % 3];
            let Some(d) = tris[t2].iter().copied().find(|&v| v != p && v != q) else {
                continue;
            };
            if c == d {
                continue;
            }
            // The flip is valid only for a strictly convex quad p, d, q, c.
            let area_eps = 1e-12 * geo::orient(nodes[p], nodes[q], nodes[c]).abs();
            let new1 = [p, d, c];
            let new2 = [d, q, c];
            if geo::orient(nodes[new1[0]], nodes[new1[1]], nodes[new1[2]]) <= area_eps
                || geo::orient(nodes[new2[0]], nodes[new2[1]], nodes[new2[2]]) <= area_eps
            {
                continue 'edges;
            }
            if in_circumcircle(nodes[p], nodes[q], nodes[c], nodes[d]) {
                tris[t1] = new1;
                tris[t2] = new2;
                flipped = true;
                break;
            }
        }
        if !flipped {
            break;
        }
    }
    tris
}

/// Strict incircle test for the counterclockwise triangle (a, b, c): true
/// if `d` lies inside its circumcircle, with a scaled hysteresis so
/// cocircular grid configurations do not flip forever.
fn in_circumcircle(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let m = [
        [a.x - d.x, a.y - d.y, (a.x - d.x).powi(2) + (a.y - d.y).powi(2)],
        [b.x - d.x, b.y - d.y, (b.x - d.x).powi(2) + (b.y - d.y).powi(2)],
        [c.x - d.x, c.y - d.y, (c.x - d.x).powi(2) + (c.y - d.y).powi(2)],
    ];
    let terms = [
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]),
        -m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]),
        m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]),
    ];
    let det: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    det > 1e-9 * scale.max(f64::MIN_POSITIVE)
}
