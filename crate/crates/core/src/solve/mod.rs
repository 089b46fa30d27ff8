//! Pluggable LP solving: a backend contract, a sparse revised-simplex
//! reference backend (microlp), a bundled dense simplex used for
//! cross-checking, and backend-independent residual verification.

mod microlp_backend;
mod simplex;

pub use microlp_backend::MicrolpBackend;
pub use simplex::DenseSimplexBackend;

use std::collections::HashMap;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub feasibility: f64,
    pub optimality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-7,
            optimality: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub iterations: usize,
    pub seconds: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            iterations: 1_000_000,
            seconds: 600.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: f64,
    /// Primal values, aligned with `lp.variables`. Empty unless optimal.
    pub primal: Vec<f64>,
    pub max_primal_residual: f64,
    pub solve_time: Duration,
}

impl SolveResult {
    pub fn value(&self, lp: &LinearProgram, name: &str) -> Option<f64> {
        lp.var_index(name).and_then(|i| self.primal.get(i).copied())
    }

    pub fn primal_map(&self, lp: &LinearProgram) -> HashMap<String, f64> {
        lp.variables
            .iter()
            .zip(&self.primal)
            .map(|(v, &x)| (v.name.clone(), x))
            .collect()
    }
}

pub trait Backend: Sync {
    fn name(&self) -> &'static str;

    fn solve(&self, lp: &LinearProgram, tol: Tolerances, limits: Limits) -> Result<SolveResult>;
}

pub fn backend_by_name(name: &str) -> Result<Box<dyn Backend>> {
    match name {
        "microlp" => Ok(Box::new(MicrolpBackend)),
        "simplex" => Ok(Box::new(DenseSimplexBackend)),
        other => Err(Error::Argument(format!(
            "unknown solver backend {other:?} (available: microlp, simplex)"
        ))),
    }
}

/// Convenience: solve with the default backend and default tolerances,
/// returning an error unless the solve is optimal.
pub fn solve_optimal(lp: &LinearProgram, backend: &dyn Backend) -> Result<SolveResult> {
    let result = backend.solve(lp, Tolerances::default(), Limits::default())?;
    if result.status != SolveStatus::Optimal {
        return Err(Error::Solve {
            status: result.status,
            message: format!("{} returned non-optimal status", backend.name()),
        });
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub max_constraint_residual: f64,
    pub max_bound_violation: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.max_constraint_residual.max(self.max_bound_violation)
    }
}

/// Evaluates constraint rows and bounds directly, independent of any backend.
pub fn verify(lp: &LinearProgram, primal: &[f64]) -> Result<ResidualReport> {
    if primal.len() != lp.num_vars() {
        return Err(Error::Argument(format!(
            "primal has {} values, program has {} variables",
            primal.len(),
            lp.num_vars()
        )));
    }
    let mut max_constraint = 0.0f64;
    for c in &lp.constraints {
        let lhs: f64 = c.coeffs.iter().map(|&(j, a)| a * primal[j]).sum();
        let violation = match c.sense {
            Sense::Le => (lhs - c.rhs).max(0.0),
            Sense::Ge => (c.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - c.rhs).abs(),
        };
        max_constraint = max_constraint.max(violation);
    }
    let mut max_bound = 0.0f64;
    for (v, &x) in lp.variables.iter().zip(primal) {
        max_bound = max_bound.max(v.lower - x).max(x - v.upper);
    }
    Ok(ResidualReport {
        max_constraint_residual: max_constraint,
        max_bound_violation: max_bound,
    })
}
