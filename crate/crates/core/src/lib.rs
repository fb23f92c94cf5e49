//! 2D finite-element engine for tissue contraction driven by cellular
//! pulling forces.
//!
//! Cells (fibroblasts, myofibroblasts) pull on the extracellular matrix
//! along their boundaries. This crate solves the resulting plane-strain
//! linear elasticity problem with three interchangeable force formalisms:
//!
//! - **immersed boundary**: the cell boundary is discretized into segments
//!   and each segment exerts an inward point force at its midpoint; the
//!   cell interior stays part of the computational domain,
//! - **adjusted immersed boundary**: same loads, but the stiffness inside
//!   the cell is dropped to a small constant `gamma` (or zero),
//! - **hole approach**: the cell region is excised from the mesh and the
//!   pulling force enters as a traction boundary condition on the hole.
//!
//! Supporting machinery: structured triangulations of a square domain that
//! conform to a polygonal cell boundary ([`mesh`]), polygonal cell
//! approximations and Poisson-process cell placement ([`cellmodel`]),
//! analytic Green's-function oracles for the point-force singularity
//! ([`greens`]), and contraction metrics — deformed areas, reduction
//! ratios, empirical convergence rates ([`metrics`]).

pub mod cellmodel;
pub mod elasticity;
pub mod error;
pub mod greens;
pub mod mesh;
pub mod metrics;

pub use error::{Error, Result};
pub use mesh::{BoundaryTag, Mesh, Point2, Region, SubdomainSpec};
