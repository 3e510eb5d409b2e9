//! Rounding a fractional coverage solution into one with the bounded split
//! property: the linear objective `L`, the product surrogate `F`, the
//! support graph, cycle and S-S path elimination, and the S-saturating
//! matching. [`solve_mcpk_alg1`] strings them together for knapsacks
//! without cluster constraints.

mod graph;

use std::collections::BTreeSet;

use num::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lp::{build_mcpk_lp, solve_lp, LpStatus};
use crate::model::{Assignment, FractionalSolution, Instance};
use crate::rational::{format_rational, ratio_or_one, Rational};

pub use graph::{
    eliminate_cycles, eliminate_cycles_traced, eliminate_ss_paths, find_ss_path,
    saturating_matching, Matching, Node, PathAdjustment, Shift, SupportGraph,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipageError {
    #[error("support graph has an S-S path between sets {0} and {1}")]
    SsPath(usize, usize),
    #[error("support graph has a cycle through set {0}")]
    Cycle(usize),
    #[error("relaxation is {0:?}")]
    Lp(LpStatus),
    #[error("capacity list has {got} entries for {expected} knapsacks")]
    Capacities { expected: usize, got: usize },
    #[error("candidate `{candidate}` is infeasible: {detail}")]
    Infeasible { candidate: &'static str, detail: String },
}

/// `L(x) = sum_i p_i min{1, sum_{j in S(i)} sum_k x_jk}`.
pub fn evaluate_l(inst: &Instance, x: &FractionalSolution) -> Rational {
    x.implied_y(inst).iter().zip(inst.items()).map(|(y, item)| y * &item.profit).sum()
}

/// `F(x) = sum_i p_i (1 - prod_{j in S(i)} (1 - sum_k x_jk))`.
pub fn evaluate_f(inst: &Instance, x: &FractionalSolution) -> Rational {
    let totals: Vec<Rational> = (0..inst.num_sets()).map(|j| x.set_total(j)).collect();
    inst.items()
        .iter()
        .map(|item| {
            let miss: Rational = inst
                .sets_containing(item.id)
                .iter()
                .map(|&j| Rational::one() - &totals[j])
                .product();
            (Rational::one() - miss) * &item.profit
        })
        .sum()
}

/// Output of the rounding pipeline before decomposition.
#[derive(Clone, Debug)]
pub struct PipageTrace {
    pub lp_solution: FractionalSolution,
    pub acyclic: FractionalSolution,
    pub rounded: FractionalSolution,
    pub path_steps: Vec<PathAdjustment>,
    pub matching: Matching,
}

/// Cycle elimination, then S-S path elimination, then the matching.
pub fn bounded_split(inst: &Instance, x: &FractionalSolution) -> Result<PipageTrace, PipageError> {
    let acyclic = eliminate_cycles(inst, x);
    let (rounded, path_steps) = eliminate_ss_paths(inst, &acyclic);
    let matching = saturating_matching(&SupportGraph::new(&rounded))?;
    Ok(PipageTrace { lp_solution: x.clone(), acyclic, rounded, path_steps, matching })
}

/// Integral part, and the matched fractional edges split by whether the
/// knapsack is in `critical`.
pub fn decompose(
    x: &FractionalSolution,
    matching: &Matching,
    num_sets: usize,
    critical: &BTreeSet<usize>,
) -> (Assignment, Assignment, Assignment) {
    let mut x1 = Assignment::unassigned(num_sets);
    for (j, k, v) in x.x_entries() {
        if v.is_one() {
            x1.assign(j, k);
        }
    }
    let mut x2 = Assignment::unassigned(num_sets);
    let mut x3 = Assignment::unassigned(num_sets);
    for &(j, k) in matching.pairs() {
        let v = x.x(j, k);
        if v.is_zero() || v.is_one() {
            continue;
        }
        if critical.contains(&k) {
            x3.assign(j, k);
        } else {
            x2.assign(j, k);
        }
    }
    (x1, x2, x3)
}

/// Value of an integral assignment viewed as a fractional point.
pub fn assignment_value(inst: &Instance, a: &Assignment) -> Rational {
    crate::model::evaluate_assignment(inst, a).expect("assignment built from instance ids")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alg1Certificate {
    #[serde(serialize_with = "ser_rational")]
    pub lp_value: Rational,
    pub candidates: Alg1Candidates,
    pub chosen: &'static str,
    #[serde(serialize_with = "ser_rational")]
    pub ratio_vs_lp: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alg1Candidates {
    #[serde(serialize_with = "ser_rational")]
    pub x1: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub x2: Rational,
}

pub(crate) fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(v))
}

#[derive(Clone, Debug)]
pub struct Alg1Outcome {
    pub assignment: Assignment,
    pub value: Rational,
    pub certificate: Alg1Certificate,
    pub trace: PipageTrace,
}

/// LP, bounded split, and the better of the integral part and the matched
/// fractional part. `effective[k]` caps the load of knapsack `k`; for an
/// instance without binding clusters pass the capacities themselves.
pub fn solve_mcpk_alg1(inst: &Instance, effective: &[Rational]) -> Result<Alg1Outcome, PipageError> {
    if effective.len() != inst.num_knapsacks() {
        return Err(PipageError::Capacities { expected: inst.num_knapsacks(), got: effective.len() });
    }
    let prog = build_mcpk_lp(inst, effective);
    let sol = solve_lp(&prog.lp);
    if !sol.is_optimal() {
        return Err(PipageError::Lp(sol.status));
    }
    let x = prog.fractional_solution(&sol);
    let trace = bounded_split(inst, &x)?;
    let (x1, x2, _) = decompose(&trace.rounded, &trace.matching, inst.num_sets(), &BTreeSet::new());
    let v1 = assignment_value(inst, &x1);
    let v2 = assignment_value(inst, &x2);
    for (name, cand) in [("x1", &x1), ("x2", &x2)] {
        let report = crate::model::check_feasible(inst, cand).expect("ids come from the instance");
        if !report.is_feasible() {
            let detail = report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
            return Err(PipageError::Infeasible { candidate: name, detail });
        }
    }
    let (chosen, assignment, value) =
        if v1 >= v2 { ("x1", x1, v1.clone()) } else { ("x2", x2, v2.clone()) };
    let certificate = Alg1Certificate {
        ratio_vs_lp: ratio_or_one(&value, &sol.objective_value),
        lp_value: sol.objective_value,
        candidates: Alg1Candidates { x1: v1, x2: v2 },
        chosen,
    };
    Ok(Alg1Outcome { assignment, value, certificate, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{tests::raw, validate_and_normalize};
    use crate::rational::{int, ratio};

    #[test]
    fn l_caps_coverage_at_one() {
        let inst = validate_and_normalize(raw(
            &[6],
            &[(1, &[0]), (1, &[0])],
            &[(1, 0), (1, 0)],
            &[2],
        ))
        .unwrap();
        let mut x = FractionalSolution::new();
        assert_eq!(evaluate_l(&inst, &x), int(0));
        x.set_x(0, 0, ratio(1, 2));
        x.set_x(1, 1, ratio(1, 2));
        assert_eq!(evaluate_l(&inst, &x), int(6));
        assert_eq!(evaluate_f(&inst, &x), ratio(9, 2));
    }

    #[test]
    fn f_equals_l_on_integral_points() {
        let inst = validate_and_normalize(raw(
            &[3, 5, 2],
            &[(1, &[0, 1]), (1, &[1, 2])],
            &[(2, 0)],
            &[2],
        ))
        .unwrap();
        let mut x = FractionalSolution::new();
        x.set_x(0, 0, int(1));
        x.set_x(1, 0, int(1));
        assert_eq!(evaluate_f(&inst, &x), evaluate_l(&inst, &x));
        assert_eq!(evaluate_l(&inst, &x), int(10));
    }

    #[test]
    fn alg1_returns_integral_optimum_unchanged() {
        let inst =
            validate_and_normalize(raw(&[3, 4], &[(1, &[0]), (1, &[1])], &[(2, 0)], &[2])).unwrap();
        let caps: Vec<_> = inst.knapsacks().iter().map(|k| k.capacity.clone()).collect();
        let out = solve_mcpk_alg1(&inst, &caps).unwrap();
        assert_eq!(out.value, int(7));
        assert_eq!(out.certificate.lp_value, int(7));
        assert_eq!(out.certificate.chosen, "x1");
    }

    #[test]
    fn alg1_skips_sets_too_large_for_a_knapsack() {
        // the second knapsack is too small for either set
        let inst = validate_and_normalize(raw(
            &[4, 2],
            &[(2, &[0]), (2, &[1])],
            &[(2, 0), (1, 0)],
            &[3],
        ))
        .unwrap();
        let out = solve_mcpk_alg1(&inst, &[int(2), int(1)]).unwrap();
        assert_eq!(out.certificate.lp_value, int(4));
        assert_eq!(out.value, int(4));
        assert_eq!(out.assignment.slots(), &[Some(0), None]);
    }
}
