//! Deformed geometry and contraction metrics: shoelace areas of displaced
//! boundary loops, deformation-gradient areas, reduction ratios, norms, and
//! empirical convergence rates.

use crate::elasticity::{element_gradient, DisplacementField};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, Mesh, Point2, SubdomainSpec};

/// A boundary loop after displacement x = X + u(X).
#[derive(Debug, Clone)]
pub struct DeformedPolygon {
    pub vertices: Vec<Point2>,
}

/// Which boundary loop of the mesh to extract.
#[derive(Debug, Clone)]
pub enum LoopSelector {
    /// Boundary edges with the given tag.
    Tag(BoundaryTag),
    /// The polygonal cell boundary (works on hole and cell-conforming meshes).
    HoleLoop,
    /// A grid-aligned subdomain boundary.
    Subdomain(SubdomainSpec),
}

/// Shoelace area ½|Σ (x_i y_{i+1} − x_{i+1} y_i)|; exact for any simple
/// polygon, independent of orientation.
pub fn shoelace_area(poly: &DeformedPolygon) -> Result<f64> {
    let pts = &poly.vertices;
    if pts.len() < 3 {
        return Err(Error::InvalidPolygon(format!(
            "shoelace needs at least 3 vertices, got {}",
            pts.len()
        )));
    }
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        acc += pts[i].x * pts[j].y - pts[j].x * pts[i].y;
    }
    Ok(0.5 * acc.abs())
}

/// Extracts the selected boundary loop and displaces every node by its
/// solved displacement.
pub fn deformed_boundary(
    mesh: &Mesh,
    field: &DisplacementField,
    selector: &LoopSelector,
) -> Result<DeformedPolygon> {
    let nodes = match selector {
        LoopSelector::Tag(tag) => mesh.boundary_loop(*tag)?,
        LoopSelector::HoleLoop => mesh.hole_boundary_loop()?,
        LoopSelector::Subdomain(SubdomainSpec::AxisAlignedSquare { half_width }) => {
            mesh.square_boundary_loop(*half_width)?
        }
        LoopSelector::Subdomain(SubdomainSpec::Polygon(pts)) => {
            let tol = 1e-9 * mesh.h.max(1.0);
            pts.iter()
                .map(|p| {
                    mesh.node_at(*p, tol).ok_or_else(|| {
                        Error::InvalidPolygon(format!(
                            "subdomain polygon vertex ({}, {}) is not a mesh node",
                            p.x, p.y
                        ))
                    })
                })
                .collect::<Result<Vec<usize>>>()?
        }
    };
    let vertices = nodes
        .iter()
        .map(|&i| {
            let p = mesh.nodes[i];
            Point2::new(p.x + field.u[i][0], p.y + field.u[i][1])
        })
        .collect();
    Ok(DeformedPolygon { vertices })
}

/// Deformed area of an element subset: Σ det(I + ∇u)·area, exact for P1
/// fields since the deformation gradient is constant per element.
#[derive(Debug, Clone, Copy)]
pub struct JacobianArea {
    pub area: f64,
    /// Number of elements with det(I + J) ≤ 0 (folded by the displacement).
    pub inverted_elements: usize,
}

pub fn jacobian_area(mesh: &Mesh, field: &DisplacementField, elements: &[usize]) -> JacobianArea {
    let mut area = 0.0;
    let mut inverted = 0;
    for &e in elements {
        let j = element_gradient(mesh, field, e);
        let det = (1.0 + j[0][0]) * (1.0 + j[1][1]) - j[0][1] * j[1][0];
        if det <= 0.0 {
            inverted += 1;
        }
        area += det * mesh.element_area(e);
    }
    JacobianArea { area, inverted_elements: inverted }
}

/// Reduction ratio |A − A⁰| / A⁰.
pub fn reduction_ratio(area_now: f64, area_initial: f64) -> Result<f64> {
    if area_initial <= 0.0 {
        return Err(Error::InvalidPolygon(format!(
            "initial area {area_initial} must be positive"
        )));
    }
    Ok((area_now - area_initial).abs() / area_initial)
}

/// Values of one quantity on three nested uniform refinements h, h/2, h/4.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceTriple {
    pub q_h: f64,
    pub q_h2: f64,
    pub q_h4: f64,
}

/// Empirical order log₂(|Q_h − Q_{h/2}| / |Q_{h/2} − Q_{h/4}|).
pub fn convergence_rate(triple: ConvergenceTriple) -> Result<f64> {
    let d1 = triple.q_h - triple.q_h2;
    let d2 = triple.q_h2 - triple.q_h4;
    if d2 == 0.0 || d1 == 0.0 {
        return Err(Error::IndeterminateRate(format!(
            "differences {d1:.3e}, {d2:.3e} do not determine a rate"
        )));
    }
    Ok((d1.abs() / d2.abs()).log2())
}
