//! Assembly of the plane-strain stiffness matrix, the Robin boundary mass
//! matrix, and the right-hand sides for point loads, hole tractions, and
//! smooth body forces.

use super::sparse::TripletMatrix;
use super::{LinearSystem, MaterialField, PointLoad};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, Mesh, Point2};

/// Constant strain-displacement rows for a P1 triangle: gradients of the
/// three shape functions, from the signed doubled area.
fn shape_gradients(coords: [Point2; 3]) -> ([[f64; 2]; 3], f64) {
    let [a, b, c] = coords;
    let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    let inv = 1.0 / det;
    let grads = [
        [(b.y - c.y) * inv, (c.x - b.x) * inv],
        [(c.y - a.y) * inv, (a.x - c.x) * inv],
        [(a.y - b.y) * inv, (b.x - a.x) * inv],
    ];
    (grads, det)
}

/// Plane-strain constitutive matrix in Voigt order (εxx, εyy, γxy).
fn constitutive(e: f64, nu: f64) -> [[f64; 3]; 3] {
    let f = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
    [
        [f * (1.0 - nu), f * nu, 0.0],
        [f * nu, f * (1.0 - nu), 0.0],
        [0.0, 0.0, f * (1.0 - 2.0 * nu) / 2.0],
    ]
}

/// 6x6 element stiffness A · Bᵀ D B, mirrored for exact symmetry.
pub(crate) fn element_stiffness(coords: [Point2; 3], e: f64, nu: f64) -> Result<[[f64; 6]; 6]> {
    let (grads, det) = shape_gradients(coords);
    if det <= 0.0 {
        return Err(Error::InvertedElement { element: usize::MAX });
    }
    let area = 0.5 * det;
    // B is 3x6: rows (εxx, εyy, γxy), columns (u1, v1, u2, v2, u3, v3).
    let mut b = [[0.0; 6]; 3];
    for k in 0..3 {
        b[0][2 * k] = grads[k][0];
        b[1][2 * k + 1] = grads[k][1];
        b[2][2 * k] = grads[k][1];
        b[2][2 * k + 1] = grads[k][0];
    }
    let d = constitutive(e, nu);
    let mut db = [[0.0; 6]; 3];
    for r in 0..3 {
        for c in 0..6 {
            db[r][c] = (0..3).map(|k| d[r][k] * b[k][c]).sum();
        }
    }
    let mut k_e = [[0.0; 6]; 6];
    for i in 0..6 {
        for j in i..6 {
            let v: f64 = (0..3).map(|r| b[r][i] * db[r][j]).sum::<f64>() * area;
            k_e[i][j] = v;
            k_e[j][i] = v;
        }
    }
    Ok(k_e)
}

/// Assembles the global P1 plane-strain stiffness matrix; CELL_INTERIOR
/// elements use the interior stiffness, everything else the exterior one.
/// The right-hand side starts at zero.
pub fn assemble_stiffness(mesh: &Mesh, mat: &MaterialField) -> Result<LinearSystem> {
    let n_dofs = 2 * mesh.n_nodes();
    let mut triplets = TripletMatrix::new(n_dofs);
    for (e, tri) in mesh.elements.iter().enumerate() {
        let coords = tri.map(|i| mesh.nodes[i]);
        let e_mod = mat.element_e(mesh.element_region[e]);
        if e_mod == 0.0 {
            continue;
        }
        let k_e = element_stiffness(coords, e_mod, mat.nu)
            .map_err(|_| Error::InvertedElement { element: e })?;
        let dofs = [
            2 * tri[0],
            2 * tri[0] + 1,
            2 * tri[1],
            2 * tri[1] + 1,
            2 * tri[2],
            2 * tri[2] + 1,
        ];
        for i in 0..6 {
            for j in 0..6 {
                triplets.push(dofs[i], dofs[j], k_e[i][j]);
            }
        }
    }
    Ok(LinearSystem { matrix: triplets.to_csr(), rhs: vec![0.0; n_dofs] })
}

/// Robin boundary contribution κ ∫ φi φj dΓ on OUTER edges: per edge of
/// length L the exact two-point mass matrix κL/6 · [[2, 1], [1, 2]] per
/// displacement component.
pub fn assemble_robin(mesh: &Mesh, kappa: f64) -> LinearSystem {
    let n_dofs = 2 * mesh.n_nodes();
    let mut triplets = TripletMatrix::new(n_dofs);
    if kappa != 0.0 {
        for be in mesh.boundary_edges.iter().filter(|be| be.tag == BoundaryTag::Outer) {
            let len = mesh.edge_length(be.a, be.b);
            let w = kappa * len / 6.0;
            for comp in 0..2 {
                let (da, db) = (2 * be.a + comp, 2 * be.b + comp);
                triplets.push(da, da, 2.0 * w);
                triplets.push(db, db, 2.0 * w);
                triplets.push(da, db, w);
                triplets.push(db, da, w);
            }
        }
    }
    LinearSystem { matrix: triplets.to_csr(), rhs: vec![0.0; n_dofs] }
}

/// Stiffness plus Robin term with the material's κ.
pub fn assemble_system(mesh: &Mesh, mat: &MaterialField) -> Result<LinearSystem> {
    let mut system = assemble_stiffness(mesh, mat)?;
    let robin = assemble_robin(mesh, mat.kappa);
    system.add_matrix(&robin.matrix);
    Ok(system)
}

/// Scatters concentrated forces to the nodes of the containing elements
/// with barycentric weights; each load's total force is preserved exactly.
pub fn assemble_point_loads(mesh: &Mesh, loads: &[PointLoad]) -> Result<Vec<f64>> {
    let mut rhs = vec![0.0; 2 * mesh.n_nodes()];
    for load in loads {
        let (e, w) = mesh.locate(load.location)?;
        for (k, &node) in mesh.elements[e].iter().enumerate() {
            rhs[2 * node] += load.force[0] * w[k];
            rhs[2 * node + 1] += load.force[1] * w[k];
        }
    }
    Ok(rhs)
}

/// Traction P·n on the hole boundary, n the unit normal pointing into the
/// cell; each edge endpoint receives P·n·ΔΓ/2 (exact for constant P and
/// linear shape functions).
pub fn assemble_traction(mesh: &Mesh, p: f64) -> Result<Vec<f64>> {
    if mesh.hole_loop.is_empty() {
        return Err(Error::InvalidPolygon("mesh has no hole boundary for traction".into()));
    }
    let mut cx = 0.0;
    let mut cy = 0.0;
    for &[a, _] in &mesh.hole_loop {
        cx += mesh.nodes[a].x;
        cy += mesh.nodes[a].y;
    }
    let center = Point2::new(cx / mesh.hole_loop.len() as f64, cy / mesh.hole_loop.len() as f64);

    let mut rhs = vec![0.0; 2 * mesh.n_nodes()];
    for &[a, b] in &mesh.hole_loop {
        let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
        let len = pa.dist(pb);
        // Hole edges keep the domain on the left; the right normal points
        // into the cell.
        let n = [(pb.y - pa.y) / len, -(pb.x - pa.x) / len];
        let mid = Point2::new(0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y));
        if n[0] * (center.x - mid.x) + n[1] * (center.y - mid.y) <= 0.0 {
            return Err(Error::EdgeOrientation { a, b });
        }
        let half_force = [0.5 * p * n[0] * len, 0.5 * p * n[1] * len];
        for node in [a, b] {
            rhs[2 * node] += half_force[0];
            rhs[2 * node + 1] += half_force[1];
        }
    }
    Ok(rhs)
}

/// Smooth body-force right-hand side ∫ f · φ dΩ with the 3-midpoint rule
/// (exact for quadratic integrands).
pub fn assemble_body_force(mesh: &Mesh, f: impl Fn(Point2) -> [f64; 2]) -> Vec<f64> {
    let mut rhs = vec![0.0; 2 * mesh.n_nodes()];
    for (e, tri) in mesh.elements.iter().enumerate() {
        let [a, b, c] = tri.map(|i| mesh.nodes[i]);
        let area = mesh.element_area(e);
        let mids = [
            Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y)),
            Point2::new(0.5 * (b.x + c.x), 0.5 * (b.y + c.y)),
            Point2::new(0.5 * (c.x + a.x), 0.5 * (c.y + a.y)),
        ];
        // Shape function values at the opposite edge midpoints are 0 on the
        // adjacent two and 1/2 on the other two midpoints.
        let phi = [
            [0.5, 0.0, 0.5], // node a at midpoints (ab, bc, ca)
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
        ];
        for (m, &mid) in mids.iter().enumerate() {
            let fv = f(mid);
            let w = area / 3.0;
            for (k, &node) in tri.iter().enumerate() {
                rhs[2 * node] += w * fv[0] * phi[k][m];
                rhs[2 * node + 1] += w * fv[1] * phi[k][m];
            }
        }
    }
    rhs
}
