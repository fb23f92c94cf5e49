//! Plane-strain linear elasticity on P1 triangles: assembly of the
//! stiffness and Robin boundary terms, point-force and traction right-hand
//! sides, the sparse solve, and derived strain/stress/energy quantities.

mod assemble;
mod fields;
pub mod sparse;

pub use assemble::{
    assemble_body_force, assemble_point_loads, assemble_robin, assemble_stiffness,
    assemble_system, assemble_traction,
};
pub use fields::{
    boundary_momentum_integral, element_gradient, element_strain_stress, energy_norm,
    energy_norm_subset, l2_norm, strain_energy,
};

use crate::error::Result;
use crate::mesh::{Mesh, Point2, Region};
use sparse::{cg_solve, CsrMatrix, SolveStats};

/// Piecewise material data: stiffness outside and inside the cell, Poisson
/// ratio, and the Robin spring coefficient on the outer boundary.
#[derive(Debug, Clone, Copy)]
pub struct MaterialField {
    /// Young's modulus on EXTERIOR elements (kg/(µm·min²)).
    pub e_exterior: f64,
    /// Young's modulus γ on CELL_INTERIOR elements; zero switches the cell
    /// interior off entirely.
    pub e_interior: f64,
    /// Poisson ratio, in [0, 0.5).
    pub nu: f64,
    /// Robin coefficient κ on the outer boundary.
    pub kappa: f64,
}

impl MaterialField {
    pub fn uniform(e: f64, nu: f64, kappa: f64) -> Self {
        Self::with_interior(e, e, nu, kappa)
    }

    pub fn with_interior(e: f64, gamma: f64, nu: f64, kappa: f64) -> Self {
        assert!(e > 0.0, "exterior stiffness must be positive");
        assert!(gamma >= 0.0, "interior stiffness must be nonnegative");
        assert!((0.0..0.5).contains(&nu), "Poisson ratio must be in [0, 0.5)");
        assert!(kappa >= 0.0, "Robin coefficient must be nonnegative");
        Self { e_exterior: e, e_interior: gamma, nu, kappa }
    }

    pub fn element_e(&self, region: Region) -> f64 {
        match region {
            Region::Exterior => self.e_exterior,
            Region::CellInterior => self.e_interior,
        }
    }
}

/// A concentrated force at a point of the domain.
#[derive(Debug, Clone, Copy)]
pub struct PointLoad {
    pub location: Point2,
    pub force: [f64; 2],
}

/// Nodal displacement vectors over a mesh.
#[derive(Debug, Clone)]
pub struct DisplacementField {
    pub u: Vec<[f64; 2]>,
}

impl DisplacementField {
    pub fn zero(n_nodes: usize) -> Self {
        Self { u: vec![[0.0, 0.0]; n_nodes] }
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        assert_eq!(flat.len() % 2, 0);
        Self { u: flat.chunks_exact(2).map(|c| [c[0], c[1]]).collect() }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(2 * self.u.len());
        for v in &self.u {
            flat.push(v[0]);
            flat.push(v[1]);
        }
        flat
    }

    pub fn n_nodes(&self) -> usize {
        self.u.len()
    }

    /// Linear interpolation at barycentric coordinates of element `e`.
    pub fn interpolate(&self, mesh: &Mesh, e: usize, w: [f64; 3]) -> [f64; 2] {
        let [a, b, c] = mesh.elements[e];
        [
            w[0] * self.u[a][0] + w[1] * self.u[b][0] + w[2] * self.u[c][0],
            w[0] * self.u[a][1] + w[1] * self.u[b][1] + w[2] * self.u[c][1],
        ]
    }
}

/// Assembled symmetric system K u = f with two degrees of freedom per node
/// (dof 2i, 2i+1 for node i).
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

impl LinearSystem {
    pub fn n_dofs(&self) -> usize {
        self.matrix.n()
    }

    /// Adds another assembled contribution (e.g. the Robin boundary term).
    pub fn add_matrix(&mut self, other: &CsrMatrix) {
        self.matrix = self.matrix.add(other);
    }

    pub fn add_rhs(&mut self, extra: &[f64]) {
        assert_eq!(extra.len(), self.rhs.len());
        for (r, e) in self.rhs.iter_mut().zip(extra) {
            *r += e;
        }
    }

    /// x' K x, used for boundary quadratic forms and energy checks.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matrix.quadratic_form(x)
    }

    /// Pins `dof` to `value` by row/column elimination.
    pub fn apply_dirichlet(&mut self, constraints: &[(usize, f64)]) {
        for &(dof, value) in constraints {
            self.matrix.eliminate_dof(dof, value, &mut self.rhs);
        }
    }
}

/// Default relative residual for [`solve`].
pub const DEFAULT_SOLVE_TOL: f64 = 1e-10;

const MAX_CG_ITERATIONS: usize = 200_000;

/// Solves the assembled system to the requested relative residual with
/// Jacobi-preconditioned conjugate gradients. Deterministic for fixed
/// inputs.
pub fn solve(system: &LinearSystem, tol: f64) -> Result<DisplacementField> {
    let (x, _) = solve_with_stats(system, tol)?;
    Ok(x)
}

pub fn solve_with_stats(system: &LinearSystem, tol: f64) -> Result<(DisplacementField, SolveStats)> {
    let (flat, stats) = cg_solve(&system.matrix, &system.rhs, tol, MAX_CG_ITERATIONS)?;
    Ok((DisplacementField::from_flat(&flat), stats))
}
