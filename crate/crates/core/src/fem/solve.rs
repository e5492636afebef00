use std::sync::Arc;

use super::assemble::{assemble_robin_system, SparseSystem};
use super::field::ScalarField;
use super::sparse::conjugate_gradient;
use crate::geometry::TriangleMesh;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative residual target ‖Ax − b‖ / ‖b‖.
    pub tolerance: f64,
    /// Iteration cap; `None` means 20 × number of unknowns.
    pub max_iterations: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1e-12,
            max_iterations: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                reason: format!("must lie in (0, 1), got {}", self.tolerance),
            });
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Solves the assembled system; the result must be strictly positive.
pub fn solve(system: &SparseSystem, options: &SolveOptions) -> Result<ScalarField> {
    options.validate()?;
    let n = system.matrix.dim();
    let cap = options.max_iterations.unwrap_or(20 * n.max(1));
    let (x, _) = conjugate_gradient(&system.matrix, &system.rhs, options.tolerance, cap)?;
    if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::Discretization(format!(
            "solution value {v} at vertex {i} is not positive"
        )));
    }
    ScalarField::new(system.mesh.clone(), x)
}

/// Assemble and solve in one step.
pub fn solve_torsion(mesh: Arc<TriangleMesh>, beta: f64, options: &SolveOptions) -> Result<ScalarField> {
    solve(&assemble_robin_system(mesh, beta)?, options)
}
