//! Linear programs over exact rationals.
//!
//! All variables are non-negative and may carry an upper bound; the
//! objective is always maximized. [`solve_lp`] returns a basic optimal
//! solution chosen deterministically (Bland's rule), so solving the same
//! program twice gives identical values.

mod build;
mod simplex;

use std::fmt::Write as _;

use num::{Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

pub use build::{build_joint_lp, build_mcpk_lp, JointProgram, McpkProgram};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub upper: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint `{constraint}` references undeclared variable {var}")]
    UnknownVariable { constraint: String, var: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearProgram {
    variables: Vec<Variable>,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, upper: Option<Rational>) -> usize {
        self.variables.push(Variable { name: name.into(), upper });
        self.objective.push(Rational::zero());
        self.variables.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coeff: Rational) {
        self.objective[var] = coeff;
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<(), LpError> {
        let name = name.into();
        if let Some(&(var, _)) = coeffs.iter().find(|(v, _)| *v >= self.variables.len()) {
            return Err(LpError::UnknownVariable { constraint: name, var });
        }
        self.constraints.push(Constraint { name, coeffs, relation, rhs });
        Ok(())
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Exact check that `values` satisfies every constraint and bound.
    pub fn is_feasible(&self, values: &[Rational]) -> bool {
        if values.len() != self.variables.len() {
            return false;
        }
        let bounds_ok = self.variables.iter().zip(values).all(|(var, v)| {
            !v.is_negative() && var.upper.as_ref().is_none_or(|ub| v <= ub)
        });
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().map(|(v, a)| a * &values[*v]).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    pub fn evaluate(&self, values: &[Rational]) -> Rational {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// CPLEX-style LP text (`Maximize` / `Subject To` / `Bounds` / `End`).
    /// Coefficients are printed as exact rationals.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::from("Maximize\n obj:");
        write_terms(
            &mut out,
            &self.variables,
            self.objective.iter().enumerate().filter(|(_, c)| !c.is_zero()),
        );
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            write_terms(&mut out, &self.variables, c.coeffs.iter().map(|(v, a)| (*v, a)));
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            let _ = writeln!(out, " {rel} {}", c.rhs);
        }
        out.push_str("Bounds\n");
        for var in &self.variables {
            match &var.upper {
                Some(ub) => {
                    let _ = writeln!(out, " 0 <= {} <= {ub}", var.name);
                }
                None => {
                    let _ = writeln!(out, " {} >= 0", var.name);
                }
            }
        }
        out.push_str("End\n");
        out
    }
}

fn write_terms<'a>(
    out: &mut String,
    vars: &[Variable],
    terms: impl Iterator<Item = (usize, &'a Rational)>,
) {
    let mut any = false;
    for (v, a) in terms {
        let sign = if a.is_negative() { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", a.abs(), vars[v].name);
        any = true;
    }
    if !any {
        out.push_str(" 0");
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// One value per variable when optimal, empty otherwise.
    pub values: Vec<Rational>,
    pub objective_value: Rational,
}

impl LpSolution {
    fn infeasible() -> Self {
        Self { status: LpStatus::Infeasible, values: Vec::new(), objective_value: Rational::zero() }
    }

    fn unbounded() -> Self {
        Self { status: LpStatus::Unbounded, values: Vec::new(), objective_value: Rational::zero() }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub fn solve_lp(lp: &LinearProgram) -> LpSolution {
    simplex::solve(lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn single_bounded_variable() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", None);
        lp.set_objective(x, int(1));
        lp.add_constraint("c", vec![(x, int(1))], Relation::Le, int(3)).unwrap();
        let sol = solve_lp(&lp);
        assert!(sol.is_optimal());
        assert_eq!(sol.values, vec![int(3)]);
        assert_eq!(sol.objective_value, int(3));
    }

    #[test]
    fn ties_resolve_to_a_vertex() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", None);
        let y = lp.add_variable("y", None);
        lp.set_objective(x, int(1));
        lp.set_objective(y, int(1));
        lp.add_constraint("c", vec![(x, int(1)), (y, int(1))], Relation::Le, int(1)).unwrap();
        let sol = solve_lp(&lp);
        assert_eq!(sol.objective_value, int(1));
        // Bland enters x first and never needs y.
        assert_eq!(sol.values, vec![int(1), int(0)]);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", Some(int(1)));
        lp.add_constraint("c", vec![(x, int(1))], Relation::Ge, int(2)).unwrap();
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", None);
        let y = lp.add_variable("y", None);
        lp.set_objective(x, int(1));
        lp.add_constraint("c", vec![(x, int(1)), (y, int(-1))], Relation::Le, int(1)).unwrap();
        assert_eq!(solve_lp(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_negative_rhs_rows() {
        // max x + 2y  s.t.  x + y = 3/2,  -x <= -1/2,  y <= 1
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", None);
        let y = lp.add_variable("y", Some(int(1)));
        lp.set_objective(x, int(1));
        lp.set_objective(y, int(2));
        lp.add_constraint("sum", vec![(x, int(1)), (y, int(1))], Relation::Eq, ratio(3, 2))
            .unwrap();
        lp.add_constraint("lo", vec![(x, int(-1))], Relation::Le, ratio(-1, 2)).unwrap();
        let sol = solve_lp(&lp);
        assert!(sol.is_optimal());
        assert_eq!(sol.values, vec![ratio(1, 2), int(1)]);
        assert_eq!(sol.objective_value, ratio(5, 2));
        assert!(lp.is_feasible(&sol.values));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", None);
        lp.set_objective(x, int(-1));
        lp.add_constraint("a", vec![(x, int(1))], Relation::Eq, int(2)).unwrap();
        lp.add_constraint("b", vec![(x, int(2))], Relation::Eq, int(4)).unwrap();
        let sol = solve_lp(&lp);
        assert_eq!(sol.values, vec![int(2)]);
    }

    #[test]
    fn degenerate_program_terminates() {
        // Classic cycling example under the textbook rule (Beale).
        let mut lp = LinearProgram::new();
        let v: Vec<usize> = (0..4).map(|i| lp.add_variable(format!("x{i}"), None)).collect();
        for (var, c) in v.iter().zip([ratio(3, 4), int(-150), ratio(1, 50), int(-6)]) {
            lp.set_objective(*var, c);
        }
        let rows = [
            [ratio(1, 4), int(-60), ratio(-1, 25), int(9)],
            [ratio(1, 2), int(-90), ratio(-1, 50), int(3)],
            [int(0), int(0), int(1), int(0)],
        ];
        for (r, (row, rhs)) in rows.iter().zip([int(0), int(0), int(1)]).enumerate() {
            let coeffs = v.iter().copied().zip(row.iter().cloned()).collect();
            lp.add_constraint(format!("r{r}"), coeffs, Relation::Le, rhs).unwrap();
        }
        let sol = solve_lp(&lp);
        assert!(sol.is_optimal());
        assert_eq!(sol.objective_value, ratio(1, 20));
    }

    #[test]
    fn rejects_unknown_variables() {
        let mut lp = LinearProgram::new();
        lp.add_variable("x", None);
        assert!(lp.add_constraint("c", vec![(3, int(1))], Relation::Le, int(1)).is_err());
    }

    #[test]
    fn lp_text_layout() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x_0_1", Some(int(1)));
        let y = lp.add_variable("y_0", None);
        lp.set_objective(y, int(4));
        lp.add_constraint("cap_1", vec![(x, int(2))], Relation::Le, int(1)).unwrap();
        lp.add_constraint("cover_0", vec![(y, int(1)), (x, int(-1))], Relation::Le, int(0))
            .unwrap();
        assert_eq!(
            lp.to_lp_text(),
            "Maximize\n obj: + 4 y_0\nSubject To\n cap_1: + 2 x_0_1 <= 1\n \
             cover_0: + 1 y_0 - 1 x_0_1 <= 0\nBounds\n 0 <= x_0_1 <= 1\n y_0 >= 0\nEnd\n"
        );
    }
}
