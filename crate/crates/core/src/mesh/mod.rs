//! Conforming triangulations of the square domain, with and without a
//! polygonal hole representing the cell.
//!
//! Meshes are generated once and treated as immutable afterwards; every
//! query below is read-only, so a `Mesh` can be shared freely across
//! threads.

mod generate;
mod io;
mod refine;

pub(crate) mod geo;

pub use generate::{
    generate_cell_conforming_mesh, generate_hole_mesh, generate_square_mesh, polygon_area,
};

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// A point in the plane, coordinates in µm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

/// Tag carried by boundary edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    /// Outer boundary of the square domain (Robin condition lives here).
    Outer,
    /// Boundary of the excised cell region (traction condition lives here).
    Hole,
}

/// Region tag carried by elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Exterior,
    CellInterior,
}

/// An observation subdomain inside the computational domain.
#[derive(Debug, Clone)]
pub enum SubdomainSpec {
    /// Axis-aligned square centered at the origin with the given half-width (µm).
    AxisAlignedSquare { half_width: f64 },
    /// Arbitrary polygon given by its vertices in counterclockwise order.
    Polygon(Vec<Point2>),
}

/// An oriented boundary edge; the domain interior lies to the left of a → b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: BoundaryTag,
}

/// A conforming triangulation of the (possibly holed) square domain.
///
/// Elements are counterclockwise node triples. `hole_loop` lists the edges
/// of the polygonal cell boundary on both hole meshes (where they are also
/// boundary edges tagged [`BoundaryTag::Hole`]) and cell-conforming meshes
/// (where they are interior interface edges); it is empty for plain square
/// meshes. Hole-loop edges are oriented with the exterior region on the
/// left.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<Point2>,
    pub elements: Vec<[usize; 3]>,
    pub element_region: Vec<Region>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub hole_loop: Vec<[usize; 2]>,
    /// Nominal element size h (µm).
    pub h: f64,
    bins: Bins,
}

/// Uniform spatial bins over element bounding boxes, used by `locate`.
#[derive(Debug, Clone, Default)]
struct Bins {
    x0: f64,
    y0: f64,
    size: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl Bins {
    fn build(nodes: &[Point2], elements: &[[usize; 3]], h: f64) -> Bins {
        let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
        let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in nodes {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        let size = h.max(1e-12);
        let nx = (((x1 - x0) / size).ceil() as usize).max(1);
        let ny = (((y1 - y0) / size).ceil() as usize).max(1);
        let mut cells = vec![Vec::new(); nx * ny];
        let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
        for (e, tri) in elements.iter().enumerate() {
            let xs = tri.map(|i| nodes[i].x);
            let ys = tri.map(|i| nodes[i].y);
            let ix0 = clamp(((xs.iter().cloned().fold(f64::INFINITY, f64::min) - x0) / size).floor() as isize, nx);
            let ix1 = clamp(((xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x0) / size).floor() as isize, nx);
            let iy0 = clamp(((ys.iter().cloned().fold(f64::INFINITY, f64::min) - y0) / size).floor() as isize, ny);
            let iy1 = clamp(((ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - y0) / size).floor() as isize, ny);
            for iy in iy0..=iy1 {
                for ix in ix0..=ix1 {
                    cells[iy * nx + ix].push(e as u32);
                }
            }
        }
        Bins { x0, y0, size, nx, ny, cells }
    }

    fn candidates(&self, p: Point2) -> &[u32] {
        let ix = (((p.x - self.x0) / self.size).floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let iy = (((p.y - self.y0) / self.size).floor() as isize).clamp(0, self.ny as isize - 1) as usize;
        &self.cells[iy * self.nx + ix]
    }
}

impl Mesh {
    /// Assembles a mesh from parts and builds the locate index.
    pub(crate) fn from_parts(
        nodes: Vec<Point2>,
        elements: Vec<[usize; 3]>,
        element_region: Vec<Region>,
        boundary_edges: Vec<BoundaryEdge>,
        hole_loop: Vec<[usize; 2]>,
        h: f64,
    ) -> Mesh {
        let bins = Bins::build(&nodes, &elements, h);
        Mesh { nodes, elements, element_region, boundary_edges, hole_loop, h, bins }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Twice the signed area of element `e` (positive for counterclockwise).
    pub fn signed_area_x2(&self, e: usize) -> f64 {
        let [a, b, c] = self.elements[e].map(|i| self.nodes[i]);
        geo::cross(b - a, c - a)
    }

    pub fn element_area(&self, e: usize) -> f64 {
        0.5 * self.signed_area_x2(e)
    }

    pub fn element_centroid(&self, e: usize) -> Point2 {
        let [a, b, c] = self.elements[e].map(|i| self.nodes[i]);
        Point2::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_elements()).map(|e| self.element_area(e)).sum()
    }

    pub fn edge_length(&self, a: usize, b: usize) -> f64 {
        self.nodes[a].dist(self.nodes[b])
    }

    /// Barycentric coordinates of `p` with respect to element `e`.
    pub fn barycentric(&self, e: usize, p: Point2) -> [f64; 3] {
        let [a, b, c] = self.elements[e].map(|i| self.nodes[i]);
        let d = geo::cross(b - a, c - a);
        [
            geo::cross(b - p, c - p) / d,
            geo::cross(c - p, a - p) / d,
            geo::cross(a - p, b - p) / d,
        ]
    }

    /// Finds the element containing `p` and its barycentric coordinates.
    ///
    /// Points on shared edges resolve to the lowest containing element
    /// index; the weights are identical either way. Returns
    /// [`Error::PointNotFound`] for points outside the domain or inside a
    /// hole.
    pub fn locate(&self, p: Point2) -> Result<(usize, [f64; 3])> {
        let tol = 1e-12;
        let mut cand: Vec<u32> = self.bins.candidates(p).to_vec();
        cand.sort_unstable();
        for &e in &cand {
            let w = self.barycentric(e as usize, p);
            if w.iter().all(|&wi| wi >= -tol) {
                let mut w = w.map(|wi| wi.max(0.0));
                let s: f64 = w.iter().sum();
                for wi in &mut w {
                    *wi /= s;
                }
                return Ok((e as usize, w));
            }
        }
        Err(Error::PointNotFound { x: p.x, y: p.y })
    }

    /// Interpolates node positions at barycentric coordinates in element `e`.
    pub fn point_at(&self, e: usize, w: [f64; 3]) -> Point2 {
        let [a, b, c] = self.elements[e].map(|i| self.nodes[i]);
        Point2::new(
            w[0] * a.x + w[1] * b.x + w[2] * c.x,
            w[0] * a.y + w[1] * b.y + w[2] * c.y,
        )
    }

    /// Index of the mesh node at `p`, within `tol`.
    pub fn node_at(&self, p: Point2, tol: f64) -> Option<usize> {
        // Candidate elements around p share the node if there is one.
        if let Ok((e, _)) = self.locate(p) {
            for &i in &self.elements[e] {
                if self.nodes[i].dist(p) <= tol {
                    return Some(i);
                }
            }
        }
        // Fall back to a scan (p may be outside the domain by rounding).
        self.nodes.iter().position(|&q| q.dist(p) <= tol)
    }

    /// Census of all element edges: sorted node pair → number of incident elements.
    pub fn edge_census(&self) -> BTreeMap<(usize, usize), u8> {
        let mut census = BTreeMap::new();
        for tri in &self.elements {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                *census.entry(key).or_insert(0u8) += 1;
            }
        }
        census
    }

    /// V − E + F; 1 for a simply connected mesh, 0 with one hole.
    pub fn euler_characteristic(&self) -> i64 {
        let e = self.edge_census().len() as i64;
        self.n_nodes() as i64 - e + self.n_elements() as i64
    }

    /// Checks the structural invariants; returns the first violation found.
    pub fn validate(&self) -> Result<()> {
        if self.elements.len() != self.element_region.len() {
            return Err(Error::MeshInvariant("element_region length mismatch".into()));
        }
        for (i, p) in self.nodes.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(Error::MeshInvariant(format!("node {i} not finite")));
            }
        }
        for e in 0..self.n_elements() {
            if self.signed_area_x2(e) <= 0.0 {
                return Err(Error::MeshInvariant(format!(
                    "element {e} has non-positive signed area"
                )));
            }
        }
        let census = self.edge_census();
        let mut boundary_set = BTreeMap::new();
        for be in &self.boundary_edges {
            let key = (be.a.min(be.b), be.a.max(be.b));
            if boundary_set.insert(key, be.tag).is_some() {
                return Err(Error::MeshInvariant(format!(
                    "duplicate boundary edge ({}, {})",
                    be.a, be.b
                )));
            }
        }
        for (&key, &count) in &census {
            if count > 2 {
                return Err(Error::MeshInvariant(format!(
                    "edge {key:?} shared by {count} elements"
                )));
            }
            let on_boundary = boundary_set.contains_key(&key);
            if count == 1 && !on_boundary {
                return Err(Error::MeshInvariant(format!(
                    "edge {key:?} has one element but is not a boundary edge"
                )));
            }
            if count == 2 && on_boundary {
                return Err(Error::MeshInvariant(format!(
                    "boundary edge {key:?} is shared by two elements"
                )));
            }
        }
        for (&key, _) in &boundary_set {
            if census.get(&key).copied().unwrap_or(0) != 1 {
                return Err(Error::MeshInvariant(format!(
                    "boundary edge {key:?} is not an element edge"
                )));
            }
        }
        // Closed loops per tag: every touched node has one incoming and one
        // outgoing edge of that tag.
        for tag in [BoundaryTag::Outer, BoundaryTag::Hole] {
            let mut out_deg = BTreeMap::new();
            let mut in_deg = BTreeMap::new();
            for be in self.boundary_edges.iter().filter(|be| be.tag == tag) {
                *out_deg.entry(be.a).or_insert(0) += 1;
                *in_deg.entry(be.b).or_insert(0) += 1;
            }
            for (&n, &d) in &out_deg {
                if d != 1 || in_deg.get(&n) != Some(&1) {
                    return Err(Error::MeshInvariant(format!(
                        "boundary loop ({tag:?}) is open or non-manifold at node {n}"
                    )));
                }
            }
            if in_deg.keys().any(|n| !out_deg.contains_key(n)) {
                return Err(Error::MeshInvariant(format!(
                    "boundary loop ({tag:?}) is open"
                )));
            }
        }
        let has_hole_boundary = self
            .boundary_edges
            .iter()
            .any(|be| be.tag == BoundaryTag::Hole);
        if has_hole_boundary
            && self.element_region.iter().any(|&r| r == Region::CellInterior)
        {
            return Err(Error::MeshInvariant(
                "hole mesh contains CELL_INTERIOR elements".into(),
            ));
        }
        for &[a, b] in &self.hole_loop {
            let key = (a.min(b), a.max(b));
            if !census.contains_key(&key) {
                return Err(Error::MeshInvariant(format!(
                    "hole loop edge ({a}, {b}) is not a mesh edge"
                )));
            }
        }
        Ok(())
    }

    /// Element indices whose centroid lies in the given subdomain.
    pub fn elements_in(&self, sub: &SubdomainSpec) -> Vec<usize> {
        (0..self.n_elements())
            .filter(|&e| {
                let c = self.element_centroid(e);
                match sub {
                    SubdomainSpec::AxisAlignedSquare { half_width } => {
                        c.x.abs() < *half_width && c.y.abs() < *half_width
                    }
                    SubdomainSpec::Polygon(poly) => geo::point_in_polygon(c, poly),
                }
            })
            .collect()
    }

    /// Ordered node loop (counterclockwise) of the axis-aligned square
    /// `|x| = |y| = half_width`; the square must be grid-aligned so that
    /// its boundary is resolved by mesh nodes.
    pub fn square_boundary_loop(&self, half_width: f64) -> Result<Vec<usize>> {
        let w = half_width;
        let tol = 1e-9 * self.h.max(1.0);
        let mut on_loop: Vec<(f64, usize)> = Vec::new();
        for (i, p) in self.nodes.iter().enumerate() {
            if p.x.abs() > w + tol || p.y.abs() > w + tol {
                continue;
            }
            // Perimeter parameter, walking counterclockwise from (-w, -w).
            let t = if (p.y + w).abs() <= tol {
                p.x + w
            } else if (p.x - w).abs() <= tol {
                2.0 * w + (p.y + w)
            } else if (p.y - w).abs() <= tol {
                4.0 * w + (w - p.x)
            } else if (p.x + w).abs() <= tol {
                6.0 * w + (w - p.y)
            } else {
                continue;
            };
            on_loop.push((t, i));
        }
        if on_loop.len() < 4 {
            return Err(Error::InvalidPolygon(format!(
                "square loop at half-width {w} has only {} nodes",
                on_loop.len()
            )));
        }
        on_loop.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for pair in on_loop.windows(2) {
            if (pair[1].0 - pair[0].0).abs() <= tol {
                return Err(Error::InvalidPolygon(
                    "square loop has coincident nodes (non-manifold)".into(),
                ));
            }
        }
        Ok(on_loop.into_iter().map(|(_, i)| i).collect())
    }

    /// Ordered node loop of the boundary edges with the given tag.
    pub fn boundary_loop(&self, tag: BoundaryTag) -> Result<Vec<usize>> {
        let edges: Vec<&BoundaryEdge> =
            self.boundary_edges.iter().filter(|be| be.tag == tag).collect();
        if edges.is_empty() {
            return Err(Error::InvalidPolygon(format!("no boundary edges tagged {tag:?}")));
        }
        Self::walk_loop(edges.iter().map(|be| [be.a, be.b]))
    }

    /// Ordered node loop of the polygonal cell boundary (`hole_loop` edges).
    pub fn hole_boundary_loop(&self) -> Result<Vec<usize>> {
        if self.hole_loop.is_empty() {
            return Err(Error::InvalidPolygon("mesh has no hole loop".into()));
        }
        Self::walk_loop(self.hole_loop.iter().copied())
    }

    fn walk_loop(edges: impl Iterator<Item = [usize; 2]>) -> Result<Vec<usize>> {
        let mut next = BTreeMap::new();
        let mut count = 0usize;
        for [a, b] in edges {
            if next.insert(a, b).is_some() {
                return Err(Error::InvalidPolygon(format!("non-manifold loop at node {a}")));
            }
            count += 1;
        }
        let start = *next.keys().next().unwrap();
        let mut loop_nodes = vec![start];
        let mut cur = start;
        for _ in 0..count {
            cur = *next
                .get(&cur)
                .ok_or_else(|| Error::InvalidPolygon(format!("open loop at node {cur}")))?;
            if cur == start {
                break;
            }
            loop_nodes.push(cur);
        }
        if loop_nodes.len() != count {
            return Err(Error::InvalidPolygon(
                "boundary edges form more than one loop".into(),
            ));
        }
        Ok(loop_nodes)
    }

    /// Restriction of a cell-conforming mesh to its exterior elements.
    ///
    /// Surviving nodes keep their relative order, so a mesh built by
    /// [`generate_cell_conforming_mesh`] restricts to exactly the matching
    /// [`generate_hole_mesh`] output, indices included. Hole-loop edges
    /// become boundary edges tagged [`BoundaryTag::Hole`].
    pub fn exterior_restriction(&self) -> Result<Mesh> {
        let keep: Vec<usize> = (0..self.n_elements())
            .filter(|&e| self.element_region[e] == Region::Exterior)
            .collect();
        let mut node_map = vec![usize::MAX; self.n_nodes()];
        let mut used: Vec<bool> = vec![false; self.n_nodes()];
        for &e in &keep {
            for &i in &self.elements[e] {
                used[i] = true;
            }
        }
        let mut nodes = Vec::new();
        for i in 0..self.n_nodes() {
            if used[i] {
                node_map[i] = nodes.len();
                nodes.push(self.nodes[i]);
            }
        }
        let elements: Vec<[usize; 3]> = keep
            .iter()
            .map(|&e| self.elements[e].map(|i| node_map[i]))
            .collect();
        let element_region = vec![Region::Exterior; elements.len()];
        let mut boundary_edges: Vec<BoundaryEdge> = self
            .boundary_edges
            .iter()
            .map(|be| BoundaryEdge { a: node_map[be.a], b: node_map[be.b], tag: be.tag })
            .collect();
        let hole_loop: Vec<[usize; 2]> = self
            .hole_loop
            .iter()
            .map(|&[a, b]| [node_map[a], node_map[b]])
            .collect();
        if !boundary_edges.iter().any(|be| be.tag == BoundaryTag::Hole) {
            boundary_edges.extend(
                hole_loop
                    .iter()
                    .map(|&[a, b]| BoundaryEdge { a, b, tag: BoundaryTag::Hole }),
            );
        }
        let mesh = Mesh::from_parts(nodes, elements, element_region, boundary_edges, hole_loop, self.h);
        mesh.validate()?;
        Ok(mesh)
    }
}

pub use refine::refine;

#[cfg(test)]
mod tests;
