use std::time::{Duration, Instant};

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOptions};

use crate::error::{Error, Result};
use crate::lp::{Direction, LinearProgram, Sense};

use super::{verify, Backend, Limits, SolveResult, SolveStatus, Tolerances};

/// Reference backend: the microlp sparse revised-simplex solver.
pub struct MicrolpBackend;

impl Backend for MicrolpBackend {
    fn name(&self) -> &'static str {
        "microlp"
    }

    fn solve(&self, lp: &LinearProgram, _tol: Tolerances, limits: Limits) -> Result<SolveResult> {
        let start = Instant::now();
        let direction = match lp.direction {
            Direction::Minimize => OptimizationDirection::Minimize,
            Direction::Maximize => OptimizationDirection::Maximize,
        };
        let mut problem = Problem::new(direction);
        let vars: Vec<_> = lp
            .variables
            .iter()
            .map(|v| problem.add_var(v.objective, (v.lower, v.upper)))
            .collect();
        for c in &lp.constraints {
            let op = match c.sense {
                Sense::Le => ComparisonOp::Le,
                Sense::Eq => ComparisonOp::Eq,
                Sense::Ge => ComparisonOp::Ge,
            };
            let expr: Vec<_> = c.coeffs.iter().map(|&(j, a)| (vars[j], a)).collect();
            problem.add_constraint(expr, op, c.rhs);
        }
        let mut options = SolveOptions::default();
        options.time_limit = Some(Duration::from_secs_f64(limits.seconds));
        let outcome = match problem.solve_with(options) {
            Ok(outcome) => outcome,
            Err(microlp::Error::Infeasible) => {
                return Ok(non_optimal(SolveStatus::Infeasible, start))
            }
            Err(microlp::Error::Unbounded) => {
                return Ok(non_optimal(SolveStatus::Unbounded, start))
            }
            Err(err) => {
                return Err(Error::Solve {
                    status: SolveStatus::IterationLimit,
                    message: err.to_string(),
                })
            }
        };
        let Some(solution) = outcome.solution() else {
            return Ok(non_optimal(SolveStatus::IterationLimit, start));
        };
        let primal: Vec<f64> = vars.iter().map(|&v| solution.var_value(v)).collect();
        let residual = verify(lp, &primal)?.max();
        Ok(SolveResult {
            status: SolveStatus::Optimal,
            objective: solution.objective() + lp.offset,
            primal,
            max_primal_residual: residual,
            solve_time: start.elapsed(),
        })
    }
}

fn non_optimal(status: SolveStatus, start: Instant) -> SolveResult {
    SolveResult {
        status,
        objective: f64::NAN,
        primal: Vec::new(),
        max_primal_residual: f64::NAN,
        solve_time: start.elapsed(),
    }
}
