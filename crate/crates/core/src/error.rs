//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Element size does not divide a domain or subdomain extent.
    #[error("mesh alignment: {0}")]
    MeshAlignment(String),

    /// Geometry rejected before meshing (sliver edges, out-of-bounds polygon, ...).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// A generated or loaded mesh violates a structural invariant.
    #[error("mesh invariant violated: {0}")]
    MeshInvariant(String),

    /// Point location failed: the point is outside the domain or inside a hole.
    #[error("point ({x}, {y}) not inside any element")]
    PointNotFound { x: f64, y: f64 },

    /// Assembly found an element with non-positive signed area.
    #[error("inverted element {element} during assembly")]
    InvertedElement { element: usize },

    /// Boundary edge orientation is inconsistent with the hole interior.
    #[error("hole edge ({a}, {b}) fails the normal orientation test")]
    EdgeOrientation { a: usize, b: usize },

    /// Iterative solver failed to reach the requested residual.
    #[error("solver did not converge: relative residual {residual:.3e} after {iterations} iterations")]
    SolverNonConvergence { residual: f64, iterations: usize },

    /// The system matrix is not positive definite.
    #[error("solver detected an indefinite or singular matrix (p'Ap = {curvature:.3e})")]
    SolverIndefinite { curvature: f64 },

    /// Cell sampling could not satisfy the separation constraints.
    #[error("cell placement failed after {attempts} attempts (region too crowded)")]
    SamplingFailed { attempts: usize },

    /// A polygon handed to the metrics layer is unusable.
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    /// Convergence rate is indeterminate (zero difference in the denominator).
    #[error("indeterminate convergence rate: {0}")]
    IndeterminateRate(String),

    /// Text-format parse failure for mesh/field/cell files.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
