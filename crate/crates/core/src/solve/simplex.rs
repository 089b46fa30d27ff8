//! Bundled dense two-phase simplex for bounded variables.
//!
//! Kept deliberately simple: explicit basis inverse with eta updates and
//! periodic refactorization. Intended for desk-scale instances and as an
//! independent cross-check of the sparse reference backend.

use std::time::Instant;

use crate::error::Result;
use crate::lp::{Direction, LinearProgram, Sense};

use super::{verify, Backend, Limits, SolveResult, SolveStatus, Tolerances};

pub struct DenseSimplexBackend;

impl Backend for DenseSimplexBackend {
    fn name(&self) -> &'static str {
        "simplex"
    }

    fn solve(&self, lp: &LinearProgram, tol: Tolerances, limits: Limits) -> Result<SolveResult> {
        let start = Instant::now();
        let mut tableau = Tableau::from_lp(lp, tol);
        let status = tableau.run(limits, start);
        match status {
            SolveStatus::Optimal => {
                let primal = tableau.structural_values();
                let residual = verify(lp, &primal)?.max();
                Ok(SolveResult {
                    status,
                    objective: lp.objective_value(&primal),
                    primal,
                    max_primal_residual: residual,
                    solve_time: start.elapsed(),
                })
            }
            _ => Ok(SolveResult {
                status,
                objective: f64::NAN,
                primal: Vec::new(),
                max_primal_residual: f64::NAN,
                solve_time: start.elapsed(),
            }),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable parked at zero.
    FreeZero,
}

/// Standard form: A x + I s + sigma a = b, minimize.
struct Tableau {
    rows: usize,
    /// Total columns: structural + slack + artificial.
    cols: usize,
    n_struct: usize,
    /// Column-major constraint matrix (structural and slack columns;
    /// artificial columns are +/- unit vectors stored as signs).
    matrix: Vec<Vec<(usize, f64)>>,
    art_sign: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    basic_vals: Vec<f64>,
    binv: Vec<Vec<f64>>,
    feas_tol: f64,
    opt_tol: f64,
    pivots_since_refactor: usize,
}

impl Tableau {
    fn from_lp(lp: &LinearProgram, tol: Tolerances) -> Self {
        let m = lp.num_constraints();
        let n = lp.num_vars();
        let n_slack = m;
        let cols = n + n_slack + m;

        let sign = match lp.direction {
            Direction::Minimize => 1.0,
            Direction::Maximize => -1.0,
        };

        let mut matrix: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + n_slack];
        let mut lower = Vec::with_capacity(cols);
        let mut upper = Vec::with_capacity(cols);
        let mut cost = vec![0.0; cols];
        for (j, v) in lp.variables.iter().enumerate() {
            lower.push(v.lower);
            upper.push(v.upper);
            cost[j] = sign * v.objective;
        }
        let mut rhs = Vec::with_capacity(m);
        for (i, c) in lp.constraints.iter().enumerate() {
            for &(j, a) in &c.coeffs {
                if a != 0.0 {
                    matrix[j].push((i, a));
                }
            }
            // Slack column for row i.
            matrix[n + i].push((i, 1.0));
            let (sl, su) = match c.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lower.push(sl);
            upper.push(su);
            rhs.push(c.rhs);
        }
        // Artificial bounds; signs are fixed once residuals are known.
        for _ in 0..m {
            lower.push(0.0);
            upper.push(f64::INFINITY);
        }

        let mut tableau = Self {
            rows: m,
            cols,
            n_struct: n,
            matrix,
            art_sign: vec![1.0; m],
            lower,
            upper,
            cost,
            rhs,
            state: vec![VarState::AtLower; cols],
            basis: (0..m).map(|i| n + n_slack + i).collect(),
            basic_vals: vec![0.0; m],
            binv: identity(m),
            feas_tol: tol.feasibility,
            opt_tol: tol.optimality.max(1e-10),
            pivots_since_refactor: 0,
        };

        // Park every non-artificial column at a finite bound (or zero if free).
        for j in 0..n + n_slack {
            tableau.state[j] = if tableau.lower[j].is_finite() {
                VarState::AtLower
            } else if tableau.upper[j].is_finite() {
                VarState::AtUpper
            } else {
                VarState::FreeZero
            };
        }
        // Residual of each row decides the artificial's sign so it starts >= 0.
        let residual = tableau.row_residuals();
        for i in 0..m {
            tableau.art_sign[i] = if residual[i] >= 0.0 { 1.0 } else { -1.0 };
            tableau.binv[i][i] = tableau.art_sign[i];
            tableau.basic_vals[i] = residual[i].abs();
            tableau.state[n + n_slack + i] = VarState::Basic(i);
        }
        tableau
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            VarState::FreeZero => 0.0,
            VarState::Basic(i) => self.basic_vals[i],
        }
    }

    fn row_residuals(&self) -> Vec<f64> {
        let mut r = self.rhs.clone();
        for j in 0..self.n_struct + self.rows {
            let x = self.nonbasic_value(j);
            if x != 0.0 {
                for &(i, a) in &self.matrix[j] {
                    r[i] -= a * x;
                }
            }
        }
        r
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        out.fill(0.0);
        if j >= self.n_struct + self.rows {
            out[j - self.n_struct - self.rows] = self.art_sign[j - self.n_struct - self.rows];
        } else {
            for &(i, a) in &self.matrix[j] {
                out[i] = a;
            }
        }
    }

    /// w = B^-1 * column(j)
    fn ftran(&self, j: usize, col: &mut [f64], w: &mut [f64]) {
        self.column(j, col);
        for (i, wi) in w.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &ck) in col.iter().enumerate() {
                if ck != 0.0 {
                    acc += self.binv[i][k] * ck;
                }
            }
            *wi = acc;
        }
    }

    /// y = c_B^T * B^-1
    fn duals(&self, phase1: bool, y: &mut [f64]) {
        y.fill(0.0);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = self.basic_cost(b, phase1);
            if cb != 0.0 {
                for k in 0..self.rows {
                    y[k] += cb * self.binv[i][k];
                }
            }
        }
    }

    fn basic_cost(&self, j: usize, phase1: bool) -> f64 {
        if phase1 {
            if j >= self.n_struct + self.rows {
                1.0
            } else {
                0.0
            }
        } else {
            self.cost[j]
        }
    }

    fn reduced_cost(&self, j: usize, y: &[f64], phase1: bool) -> f64 {
        let mut d = self.basic_cost(j, phase1);
        if j >= self.n_struct + self.rows {
            d -= y[j - self.n_struct - self.rows] * self.art_sign[j - self.n_struct - self.rows];
        } else {
            for &(i, a) in &self.matrix[j] {
                d -= y[i] * a;
            }
        }
        d
    }

    fn refactorize(&mut self) -> bool {
        let m = self.rows;
        let mut b = vec![vec![0.0; m]; m];
        let mut col = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for i in 0..m {
                b[i][k] = col[i];
            }
        }
        match invert(&mut b) {
            Some(inv) => {
                self.binv = inv;
                // Recompute basic values from scratch.
                let r = {
                    let mut rhs = self.rhs.clone();
                    for j in 0..self.cols {
                        if matches!(self.state[j], VarState::Basic(_)) {
                            continue;
                        }
                        let x = self.nonbasic_value(j);
                        if x != 0.0 {
                            let sign_col = if j >= self.n_struct + self.rows {
                                Some((j - self.n_struct - self.rows, self.art_sign[j - self.n_struct - self.rows]))
                            } else {
                                None
                            };
                            if let Some((i, s)) = sign_col {
                                rhs[i] -= s * x;
                            } else {
                                for &(i, a) in &self.matrix[j] {
                                    rhs[i] -= a * x;
                                }
                            }
                        }
                    }
                    rhs
                };
                for i in 0..m {
                    let mut acc = 0.0;
                    for k in 0..m {
                        acc += self.binv[i][k] * r[k];
                    }
                    self.basic_vals[i] = acc;
                }
                self.pivots_since_refactor = 0;
                true
            }
            None => false,
        }
    }

    fn run(&mut self, limits: Limits, start: Instant) -> SolveStatus {
        let mut iterations = 0usize;
        // Phase 1: drive artificials to zero.
        match self.iterate(true, limits, start, &mut iterations) {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded => return SolveStatus::Infeasible, // cannot happen: phase-1 bounded below
            PhaseEnd::Limit => return SolveStatus::IterationLimit,
        }
        let art_total: f64 = (0..self.rows)
            .map(|i| {
                let j = self.n_struct + self.rows + i;
                match self.state[j] {
                    VarState::Basic(row) => self.basic_vals[row],
                    _ => self.nonbasic_value(j),
                }
            })
            .sum();
        if art_total > self.feas_tol.max(1e-7) {
            return SolveStatus::Infeasible;
        }
        // Lock artificials at zero for phase 2.
        for i in 0..self.rows {
            let j = self.n_struct + self.rows + i;
            self.upper[j] = 0.0;
        }
        match self.iterate(false, limits, start, &mut iterations) {
            PhaseEnd::Optimal => SolveStatus::Optimal,
            PhaseEnd::Unbounded => SolveStatus::Unbounded,
            PhaseEnd::Limit => SolveStatus::IterationLimit,
        }
    }

    fn iterate(
        &mut self,
        phase1: bool,
        limits: Limits,
        start: Instant,
        iterations: &mut usize,
    ) -> PhaseEnd {
        let m = self.rows;
        let mut y = vec![0.0; m];
        let mut col = vec![0.0; m];
        let mut w = vec![0.0; m];
        let mut stalled = 0usize;
        loop {
            if *iterations >= limits.iterations || start.elapsed().as_secs_f64() > limits.seconds {
                return PhaseEnd::Limit;
            }
            *iterations += 1;
            self.duals(phase1, &mut y);

            // Pricing. Dantzig rule normally, Bland's rule when stalling.
            let bland = stalled > 2 * (m + self.cols);
            let mut entering: Option<(usize, f64, f64)> = None; // (col, |d|, direction)
            for j in 0..self.cols {
                if matches!(self.state[j], VarState::Basic(_)) {
                    continue;
                }
                if self.lower[j] == self.upper[j] {
                    continue; // fixed
                }
                let d = self.reduced_cost(j, &y, phase1);
                let dir = match self.state[j] {
                    VarState::AtLower if d < -self.opt_tol => 1.0,
                    VarState::AtUpper if d > self.opt_tol => -1.0,
                    VarState::FreeZero if d.abs() > self.opt_tol => -d.signum(),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, d.abs(), dir));
                    break;
                }
                if entering.map_or(true, |(_, best, _)| d.abs() > best) {
                    entering = Some((j, d.abs(), dir));
                }
            }
            let Some((j_in, _, dir)) = entering else {
                return PhaseEnd::Optimal;
            };

            self.ftran(j_in, &mut col, &mut w);

            // Ratio test: step t >= 0 moves x_in by dir * t; basic values move
            // by -dir * t * w.
            let own_range = self.upper[j_in] - self.lower[j_in];
            let mut t_best = own_range; // bound flip distance (may be inf)
            let mut leaving: Option<(usize, VarState)> = None;
            for i in 0..m {
                let delta = -dir * w[i];
                if delta < -1e-11 {
                    // basic value decreases toward its lower bound
                    let lb = self.lower[self.basis[i]];
                    if lb.is_finite() {
                        let t = (self.basic_vals[i] - lb) / -delta;
                        if t < t_best - 1e-12 || (bland && t <= t_best && leaving.is_none()) {
                            t_best = t.max(0.0);
                            leaving = Some((i, VarState::AtLower));
                        }
                    }
                } else if delta > 1e-11 {
                    let ub = self.upper[self.basis[i]];
                    if ub.is_finite() {
                        let t = (ub - self.basic_vals[i]) / delta;
                        if t < t_best - 1e-12 || (bland && t <= t_best && leaving.is_none()) {
                            t_best = t.max(0.0);
                            leaving = Some((i, VarState::AtUpper));
                        }
                    }
                }
            }
            if !t_best.is_finite() {
                return PhaseEnd::Unbounded;
            }
            if t_best < 1e-12 {
                stalled += 1;
            } else {
                stalled = 0;
            }

            // Apply the step.
            for i in 0..m {
                self.basic_vals[i] -= dir * t_best * w[i];
            }
            match leaving {
                None => {
                    // Bound flip: x_in traverses its whole range.
                    self.state[j_in] = match self.state[j_in] {
                        VarState::AtLower => VarState::AtUpper,
                        VarState::AtUpper => VarState::AtLower,
                        other => other, // free with finite range cannot happen
                    };
                }
                Some((row, exit_state)) => {
                    let j_out = self.basis[row];
                    let entering_val = self.nonbasic_value(j_in) + dir * t_best;
                    self.state[j_out] = exit_state;
                    self.state[j_in] = VarState::Basic(row);
                    self.basis[row] = j_in;
                    self.basic_vals[row] = entering_val;

                    // Eta update of B^-1.
                    let pivot = w[row];
                    if pivot.abs() < 1e-9 || self.pivots_since_refactor >= 64 {
                        if !self.refactorize() {
                            return PhaseEnd::Limit;
                        }
                    } else {
                        let inv_pivot = 1.0 / pivot;
                        let pivot_row: Vec<f64> =
                            self.binv[row].iter().map(|&v| v * inv_pivot).collect();
                        for i in 0..m {
                            if i == row {
                                continue;
                            }
                            let factor = w[i];
                            if factor != 0.0 {
                                for k in 0..m {
                                    self.binv[i][k] -= factor * pivot_row[k];
                                }
                            }
                        }
                        self.binv[row] = pivot_row;
                        self.pivots_since_refactor += 1;
                    }
                }
            }
        }
    }

    fn structural_values(&self) -> Vec<f64> {
        (0..self.n_struct).map(|j| self.nonbasic_value(j)).collect()
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    Limit,
}

fn identity(m: usize) -> Vec<Vec<f64>> {
    let mut id = vec![vec![0.0; m]; m];
    for (i, row) in id.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    id
}

/// Gauss-Jordan inverse with partial pivoting. Returns None if singular.
fn invert(a: &mut [Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let m = a.len();
    let mut inv = identity(m);
    for col in 0..m {
        let mut pivot_row = col;
        let mut best = a[col][col].abs();
        for r in col + 1..m {
            if a[r][col].abs() > best {
                best = a[r][col].abs();
                pivot_row = r;
            }
        }
        if best < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let p = a[col][col];
        for k in 0..m {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for r in 0..m {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for k in 0..m {
                        a[r][k] -= f * a[col][k];
                        inv[r][k] -= f * inv[col][k];
                    }
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{Direction, LinearProgram, Sense};
    use crate::solve::{Backend, Limits, Tolerances};

    fn solve(lp: &LinearProgram) -> SolveResult {
        DenseSimplexBackend
            .solve(lp, Tolerances::default(), Limits::default())
            .unwrap()
    }

    #[test]
    fn equality_with_bounded_vars() {
        // min 2x + 3y s.t. x + y = 10, x <= 6, y <= 8
        let mut lp = LinearProgram::new(Direction::Minimize);
        let x = lp.add_var("x", 0.0, 6.0, 2.0).unwrap();
        let y = lp.add_var("y", 0.0, 8.0, 3.0).unwrap();
        lp.add_constraint("bal", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 10.0)
            .unwrap();
        let r = solve(&lp);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 24.0).abs() < 1e-8); // x=6, y=4
    }

    #[test]
    fn maximize_with_upper_bounds() {
        // max x + 2y s.t. x + y <= 4, y <= 3
        let mut lp = LinearProgram::new(Direction::Maximize);
        let x = lp.add_var("x", 0.0, f64::INFINITY, 1.0).unwrap();
        let y = lp.add_var("y", 0.0, 3.0, 2.0).unwrap();
        lp.add_constraint("cap", vec![(x, 1.0), (y, 1.0)], Sense::Le, 4.0)
            .unwrap();
        let r = solve(&lp);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 7.0).abs() < 1e-8); // y=3, x=1
    }

    #[test]
    fn free_variable_enters() {
        // min |ish|: min y s.t. y >= x - 3, y >= 3 - x, x free -> y = 0 at x = 3
        let mut lp = LinearProgram::new(Direction::Minimize);
        let x = lp.add_var("x", f64::NEG_INFINITY, f64::INFINITY, 0.0).unwrap();
        let y = lp.add_var("y", 0.0, f64::INFINITY, 1.0).unwrap();
        lp.add_constraint("a", vec![(y, 1.0), (x, -1.0)], Sense::Ge, -3.0)
            .unwrap();
        lp.add_constraint("b", vec![(y, 1.0), (x, 1.0)], Sense::Ge, 3.0)
            .unwrap();
        let r = solve(&lp);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!(r.objective.abs() < 1e-8);
    }

    #[test]
    fn agrees_with_microlp_on_random_programs() {
        use crate::solve::MicrolpBackend;
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut optimal_seen = 0;
        for case in 0..160 {
            let n = rng.gen_range(2..8);
            let m = rng.gen_range(1..8);
            let mut lp = LinearProgram::new(if rng.gen_bool(0.5) {
                Direction::Minimize
            } else {
                Direction::Maximize
            });
            for j in 0..n {
                let lower = if rng.gen_bool(0.8) {
                    rng.gen_range(-5.0..2.0)
                } else {
                    f64::NEG_INFINITY
                };
                let upper = if rng.gen_bool(0.8) {
                    lower.max(0.0) + rng.gen_range(0.0..8.0)
                } else {
                    f64::INFINITY
                };
                lp.add_var(format!("x{j}"), lower, upper, rng.gen_range(-3.0..3.0))
                    .unwrap();
            }
            for i in 0..m {
                let mut coeffs = Vec::new();
                for j in 0..n {
                    if rng.gen_bool(0.7) {
                        coeffs.push((j, rng.gen_range(-2.0..2.0)));
                    }
                }
                if coeffs.is_empty() {
                    continue;
                }
                let sense = match rng.gen_range(0..3) {
                    0 => Sense::Le,
                    1 => Sense::Ge,
                    _ => Sense::Eq,
                };
                lp.add_constraint(format!("c{i}"), coeffs, sense, rng.gen_range(-4.0..4.0))
                    .unwrap();
            }
            let ours = solve(&lp);
            let reference = MicrolpBackend
                .solve(&lp, Tolerances::default(), Limits::default())
                .unwrap();
            assert_eq!(ours.status, reference.status, "case {case}");
            if ours.status == SolveStatus::Optimal {
                optimal_seen += 1;
                let scale = 1.0f64.max(reference.objective.abs());
                assert!(
                    (ours.objective - reference.objective).abs() / scale < 1e-6,
                    "case {case}: {} vs {}",
                    ours.objective,
                    reference.objective
                );
                assert!(ours.max_primal_residual < 1e-6, "case {case}");
            }
        }
        assert!(optimal_seen >= 20, "only {optimal_seen} optimal cases");
    }

    #[test]
    fn negative_lower_bounds() {
        // min x s.t. x >= -5
        let mut lp = LinearProgram::new(Direction::Minimize);
        lp.add_var("x", -5.0, f64::INFINITY, 1.0).unwrap();
        let r = solve(&lp);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective + 5.0).abs() < 1e-9);
    }
}
