use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};
use serde::Serialize;

use crate::lp::{build_joint_lp, build_mcpk_lp, solve_lp};
use crate::mcpc::effective_capacities;
use crate::mkpc::{greedy_lp, solve_mkpc_iterative, IterativeConfig};
use crate::pipage::ser_rational;
use crate::model::Instance;
use crate::rational::Rational;

/// One exact equality between two values that should agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    #[serde(serialize_with = "ser_rational")]
    pub left: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub right: Rational,
    pub ok: bool,
}

impl CrossCheck {
    fn new(name: impl Into<String>, left: Rational, right: Rational) -> Self {
        let ok = left == right;
        Self { name: name.into(), left, right, ok }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub checks: Vec<CrossCheck>,
    /// Checks that could not run, with the reason.
    pub skipped: Vec<String>,
}

impl CrossCheckReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CrossCheck> {
        self.checks.iter().filter(|c| !c.ok)
    }
}

fn lp_value(lp: &crate::lp::LinearProgram) -> Option<Rational> {
    let sol = solve_lp(lp);
    sol.is_optimal().then_some(sol.objective_value)
}

/// Solves the same relaxations in independent ways and compares them:
///
/// * `greedy=simplex`: greedy value against the simplex optimum of the
///   reduced program (one-item sets only);
/// * `joint=fixed`: the program with the shares as variables against the
///   program with `z*` fixed;
/// * `iteration_t`: after each round of iterative rounding, the joint
///   program with the rounded clusters pinned against the fixed profit plus
///   the relaxation value of what is left.
pub fn lp_cross_check(inst: &Instance) -> CrossCheckReport {
    let mut report = CrossCheckReport::default();
    let effective = effective_capacities(inst);
    let Some(fixed) = lp_value(&build_mcpk_lp(inst, &effective).lp) else {
        report.skipped.push("reduced program has no optimum".into());
        return report;
    };
    let Some(joint) = lp_value(&build_joint_lp(inst, &BTreeMap::new()).lp) else {
        report.skipped.push("joint program has no optimum".into());
        return report;
    };
    report.checks.push(CrossCheck::new("joint=fixed", joint, fixed.clone()));
    if !inst.is_singleton() {
        report.skipped.push("sets are not one-item sets".into());
        return report;
    }
    match greedy_lp(inst) {
        Ok(g) => report.checks.push(CrossCheck::new("greedy=simplex", g.objective, fixed)),
        Err(e) => report.skipped.push(format!("greedy: {e}")),
    }

    let out = match solve_mkpc_iterative(inst, IterativeConfig::default()) {
        Ok(out) => out,
        Err(e) => {
            report.skipped.push(format!("iterative: {e}"));
            return report;
        }
    };
    let mut placed: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut rounded: BTreeSet<usize> = BTreeSet::new();
    for (t, rec) in out.certificate.iterations.iter().enumerate() {
        placed.extend(rec.placed.iter().copied());
        rounded.extend(inst.clusters()[rec.cluster].knapsacks.iter().copied());
        let mut fixings = BTreeMap::new();
        for &k in &rounded {
            for j in 0..inst.num_sets() {
                if inst.fits(j, k) {
                    fixings.insert((j, k), Rational::zero());
                }
            }
        }
        for &(j, k) in &placed {
            fixings.insert((j, k), Rational::one());
        }
        let name = format!("iteration_{}", t + 1);
        match lp_value(&build_joint_lp(inst, &fixings).lp) {
            Some(v) => report.checks.push(CrossCheck::new(
                name,
                v,
                &rec.fixed_profit + &rec.remaining_lp_value,
            )),
            None => report.checks.push(CrossCheck {
                name,
                left: Rational::zero(),
                right: &rec.fixed_profit + &rec.remaining_lp_value,
                ok: false,
            }),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{tests::raw, validate_and_normalize};

    #[test]
    fn e1_all_agree() {
        let inst = validate_and_normalize(raw(
            &[4, 2],
            &[(2, &[0]), (2, &[1])],
            &[(2, 0), (2, 0)],
            &[3],
        ))
        .unwrap();
        let r = lp_cross_check(&inst);
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["joint=fixed", "greedy=simplex", "iteration_1"]);
        assert!(r.all_ok(), "{r:?}");
    }

    #[test]
    fn two_clusters_pinned_in_turn() {
        let inst = validate_and_normalize(raw(
            &[6, 5, 4, 3],
            &[(3, &[0]), (2, &[1]), (2, &[2]), (1, &[3])],
            &[(3, 0), (3, 0), (2, 1), (1, 1)],
            &[4, 2],
        ))
        .unwrap();
        let r = lp_cross_check(&inst);
        assert!(r.all_ok(), "{r:?}");
        assert!(r.checks.iter().any(|c| c.name == "iteration_2"), "{r:?}");
    }

    #[test]
    fn overlapping_sets_still_match() {
        let inst = validate_and_normalize(raw(
            &[3, 3, 3],
            &[(2, &[0, 1]), (2, &[1, 2])],
            &[(2, 0), (2, 0)],
            &[3],
        ))
        .unwrap();
        let r = lp_cross_check(&inst);
        assert_eq!(r.checks.len(), 1);
        assert_eq!(r.checks[0].left, r.checks[0].right);
    }
}
