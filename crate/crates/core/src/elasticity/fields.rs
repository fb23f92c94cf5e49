//! Derived quantities of a solved displacement field: per-element strain
//! and stress, strain energies, energy and L2 norms, and the outer-boundary
//! momentum integral.

use super::{DisplacementField, MaterialField};
use crate::mesh::{BoundaryTag, Mesh};

/// Constant displacement gradient J with J[i][j] = ∂u_i/∂x_j on element `e`.
pub fn element_gradient(mesh: &Mesh, field: &DisplacementField, e: usize) -> [[f64; 2]; 2] {
    let tri = mesh.elements[e];
    let [a, b, c] = tri.map(|i| mesh.nodes[i]);
    let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    let inv = 1.0 / det;
    let grads = [
        [(b.y - c.y) * inv, (c.x - b.x) * inv],
        [(c.y - a.y) * inv, (a.x - c.x) * inv],
        [(a.y - b.y) * inv, (b.x - a.x) * inv],
    ];
    let mut j = [[0.0; 2]; 2];
    for (k, &node) in tri.iter().enumerate() {
        for i in 0..2 {
            for d in 0..2 {
                j[i][d] += field.u[node][i] * grads[k][d];
            }
        }
    }
    j
}

/// Infinitesimal strain ε = (∇u + ∇uᵀ)/2 and plane-strain stress
/// σ = E/(1+ν)·(ε + tr(ε)·ν/(1−2ν)·I), both constant per element.
pub fn element_strain_stress(
    mesh: &Mesh,
    field: &DisplacementField,
    mat: &MaterialField,
    e: usize,
) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    let j = element_gradient(mesh, field, e);
    let eps = [
        [j[0][0], 0.5 * (j[0][1] + j[1][0])],
        [0.5 * (j[0][1] + j[1][0]), j[1][1]],
    ];
    let e_mod = mat.element_e(mesh.element_region[e]);
    let factor = e_mod / (1.0 + mat.nu);
    let trace_term = (eps[0][0] + eps[1][1]) * mat.nu / (1.0 - 2.0 * mat.nu);
    let sigma = [
        [factor * (eps[0][0] + trace_term), factor * eps[0][1]],
        [factor * eps[1][0], factor * (eps[1][1] + trace_term)],
    ];
    (eps, sigma)
}

fn tensor_contraction(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

/// Σ over the element subset of ½ σ:ε · area.
pub fn strain_energy(
    mesh: &Mesh,
    field: &DisplacementField,
    mat: &MaterialField,
    elements: &[usize],
) -> f64 {
    elements
        .iter()
        .map(|&e| {
            let (eps, sigma) = element_strain_stress(mesh, field, mat, e);
            0.5 * tensor_contraction(sigma, eps) * mesh.element_area(e)
        })
        .sum()
}

/// Robin boundary quadratic form ∫ κ |u|² dΓ over OUTER edges, exact for
/// linear traces.
fn robin_quadratic(mesh: &Mesh, field: &DisplacementField, kappa: f64) -> f64 {
    let mut total = 0.0;
    for be in mesh.boundary_edges.iter().filter(|be| be.tag == BoundaryTag::Outer) {
        let len = mesh.edge_length(be.a, be.b);
        let (ua, ub) = (field.u[be.a], field.u[be.b]);
        for comp in 0..2 {
            let (a, b) = (ua[comp], ub[comp]);
            total += kappa * len / 6.0 * (2.0 * a * a + 2.0 * a * b + 2.0 * b * b);
        }
    }
    total
}

/// Energy norm (∫ σ:ε dΩ + ∫ κ|u|² dΓ)^(1/2) over the whole mesh.
pub fn energy_norm(mesh: &Mesh, field: &DisplacementField, mat: &MaterialField) -> f64 {
    let all: Vec<usize> = (0..mesh.n_elements()).collect();
    energy_norm_subset(mesh, field, mat, &all)
}

/// Energy norm restricted to an element subset; the Robin boundary term is
/// always the full outer boundary.
pub fn energy_norm_subset(
    mesh: &Mesh,
    field: &DisplacementField,
    mat: &MaterialField,
    elements: &[usize],
) -> f64 {
    let interior: f64 = elements
        .iter()
        .map(|&e| {
            let (eps, sigma) = element_strain_stress(mesh, field, mat, e);
            tensor_contraction(sigma, eps) * mesh.element_area(e)
        })
        .sum();
    (interior + robin_quadratic(mesh, field, mat.kappa)).sqrt()
}

/// L2 norm (∫ |u|² dΩ)^(1/2) with the exact P1 mass quadrature
/// A/12 · (|u_a + u_b + u_c|² + |u_a|² + |u_b|² + |u_c|²) per element.
pub fn l2_norm(mesh: &Mesh, field: &DisplacementField) -> f64 {
    let mut total = 0.0;
    for (e, tri) in mesh.elements.iter().enumerate() {
        let area = mesh.element_area(e);
        let [ua, ub, uc] = tri.map(|i| field.u[i]);
        for comp in 0..2 {
            let (a, b, c) = (ua[comp], ub[comp], uc[comp]);
            let s = a + b + c;
            total += area / 12.0 * (s * s + a * a + b * b + c * c);
        }
    }
    total.sqrt()
}

/// ∫ κ u dΓ over the outer boundary, edge-wise trapezoid (exact for
/// linear traces). By global equilibrium this equals the total applied
/// force.
pub fn boundary_momentum_integral(mesh: &Mesh, field: &DisplacementField, kappa: f64) -> [f64; 2] {
    let mut total = [0.0; 2];
    for be in mesh.boundary_edges.iter().filter(|be| be.tag == BoundaryTag::Outer) {
        let len = mesh.edge_length(be.a, be.b);
        for comp in 0..2 {
            total[comp] += kappa * len * 0.5 * (field.u[be.a][comp] + field.u[be.b][comp]);
        }
    }
    total
}
