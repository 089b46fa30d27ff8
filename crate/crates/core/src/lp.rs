//! Sparse linear program carrier shared by the formulation module and the
//! solver backends, plus a plain-text LP-format exporter for cross-checking
//! against external solvers.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    /// Sparse row: (variable index, coefficient).
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub direction: Direction,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Constant objective term (e.g. FO&M on fixed installed capacity).
    pub offset: f64,
    index: HashMap<String, usize>,
}

impl LinearProgram {
    pub fn new(direction: Direction) -> Self {
        Self {
            direction,
            variables: Vec::new(),
            constraints: Vec::new(),
            offset: 0.0,
            index: HashMap::new(),
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        objective: f64,
    ) -> Result<usize> {
        let name = name.into();
        if lower > upper {
            return Err(Error::Argument(format!(
                "variable {name}: lower bound {lower} exceeds upper bound {upper}"
            )));
        }
        if self.index.contains_key(&name) {
            return Err(Error::Argument(format!("duplicate variable name {name}")));
        }
        let idx = self.variables.len();
        self.index.insert(name.clone(), idx);
        self.variables.push(Variable {
            name,
            lower,
            upper,
            objective,
        });
        Ok(idx)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<usize> {
        let name = name.into();
        for &(var, _) in &coeffs {
            if var >= self.variables.len() {
                return Err(Error::Argument(format!(
                    "constraint {name} references unknown variable index {var}"
                )));
            }
        }
        let idx = self.constraints.len();
        self.constraints.push(Constraint {
            name,
            coeffs,
            sense,
            rhs,
        });
        Ok(idx)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Objective value of a primal point, including the constant offset.
    pub fn objective_value(&self, primal: &[f64]) -> f64 {
        self.offset
            + self
                .variables
                .iter()
                .zip(primal)
                .map(|(v, x)| v.objective * x)
                .sum::<f64>()
    }

    /// Writes the program in CPLEX LP text format.
    pub fn export_lp(&self, w: &mut impl Write) -> std::io::Result<()> {
        match self.direction {
            Direction::Minimize => writeln!(w, "Minimize")?,
            Direction::Maximize => writeln!(w, "Maximize")?,
        }
        write!(w, " obj:")?;
        let mut any = false;
        for v in &self.variables {
            if v.objective != 0.0 {
                write!(w, " {} {} {}", sign(v.objective), v.objective.abs(), v.name)?;
                any = true;
            }
        }
        if !any {
            // LP format requires at least one term.
            write!(w, " 0 {}", self.variables[0].name)?;
        }
        if self.offset != 0.0 {
            write!(w, " {} {}", sign(self.offset), self.offset.abs())?;
        }
        writeln!(w)?;
        writeln!(w, "Subject To")?;
        for c in &self.constraints {
            write!(w, " {}:", c.name)?;
            if c.coeffs.is_empty() {
                write!(w, " 0 {}", self.variables[0].name)?;
            }
            for &(j, a) in &c.coeffs {
                write!(w, " {} {} {}", sign(a), a.abs(), self.variables[j].name)?;
            }
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
                Sense::Ge => ">=",
            };
            writeln!(w, " {} {}", op, c.rhs)?;
        }
        writeln!(w, "Bounds")?;
        for v in &self.variables {
            match (v.lower.is_finite(), v.upper.is_finite()) {
                (true, true) => writeln!(w, " {} <= {} <= {}", v.lower, v.name, v.upper)?,
                (true, false) => writeln!(w, " {} >= {}", v.name, v.lower)?,
                (false, true) => {
                    writeln!(w, " {} free", v.name)?;
                    writeln!(w, " {} <= {}", v.name, v.upper)?
                }
                (false, false) => writeln!(w, " {} free", v.name)?,
            }
        }
        writeln!(w, "End")
    }
}

fn sign(x: f64) -> char {
    if x < 0.0 {
        '-'
    } else {
        '+'
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_names_and_crossed_bounds() {
        let mut lp = LinearProgram::new(Direction::Minimize);
        lp.add_var("x", 0.0, 1.0, 1.0).unwrap();
        assert!(lp.add_var("x", 0.0, 1.0, 1.0).is_err());
        assert!(lp.add_var("y", 2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_variable_reference() {
        let mut lp = LinearProgram::new(Direction::Minimize);
        lp.add_var("x", 0.0, 1.0, 1.0).unwrap();
        assert!(lp
            .add_constraint("c", vec![(3, 1.0)], Sense::Le, 1.0)
            .is_err());
    }

    #[test]
    fn lp_export_round_numbers() {
        let mut lp = LinearProgram::new(Direction::Minimize);
        let x = lp.add_var("x", 0.0, f64::INFINITY, 2.0).unwrap();
        let y = lp.add_var("y", f64::NEG_INFINITY, f64::INFINITY, -1.0).unwrap();
        lp.add_constraint("bal", vec![(x, 1.0), (y, -3.0)], Sense::Ge, 4.0)
            .unwrap();
        let mut buf = Vec::new();
        lp.export_lp(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("Minimize"));
        assert!(text.contains("bal: + 1 x - 3 y >= 4"));
        assert!(text.contains("y free"));
    }
}
