//! Cluster constraints via a fixed capacity split: each binding cluster
//! hands full capacity to its largest knapsacks up to the critical one, the
//! remainder to the critical knapsack, and nothing to the rest. The reduced
//! problem is a plain coverage relaxation, rounded three ways.

use std::collections::BTreeSet;

use num::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::lp::{build_mcpk_lp, solve_lp};
use crate::model::{check_feasible, Assignment, FractionalSolution, Instance};
use crate::pipage::{
    assignment_value, bounded_split, decompose, ser_rational, Matching, PipageError, PipageTrace,
};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McpcError {
    #[error("cluster {0} is redundant and has no critical knapsack")]
    Redundant(usize),
    #[error("unknown cluster {0}")]
    UnknownCluster(usize),
    #[error(transparent)]
    Pipage(#[from] PipageError),
}

/// Capacity split of one cluster. Vectors follow the cluster's canonical
/// knapsack order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterAnalysis {
    pub cluster: usize,
    /// `None` for redundant clusters.
    pub critical: Option<usize>,
    pub z_star: Vec<(usize, Rational)>,
    pub effective: Vec<(usize, Rational)>,
}

/// The knapsack `r` with `sum_{k<r} B_k <= U < sum_{k<=r} B_k` in the
/// cluster's canonical order.
pub fn critical_knapsack(inst: &Instance, cluster: usize) -> Result<usize, McpcError> {
    let cl = inst.clusters().get(cluster).ok_or(McpcError::UnknownCluster(cluster))?;
    if cl.redundant {
        return Err(McpcError::Redundant(cluster));
    }
    let mut prefix = Rational::zero();
    for &k in &cl.knapsacks {
        prefix += inst.capacity(k);
        if prefix > cl.capacity {
            return Ok(k);
        }
    }
    unreachable!("a binding cluster exceeds its capacity somewhere")
}

pub fn analyze_cluster(inst: &Instance, cluster: usize) -> Result<ClusterAnalysis, McpcError> {
    let cl = inst.clusters().get(cluster).ok_or(McpcError::UnknownCluster(cluster))?;
    let u = &cl.capacity;
    if cl.redundant {
        let z_star = cl.knapsacks.iter().map(|&k| (k, inst.capacity(k) / u)).collect();
        let effective = cl.knapsacks.iter().map(|&k| (k, inst.capacity(k).clone())).collect();
        return Ok(ClusterAnalysis { cluster, critical: None, z_star, effective });
    }
    let r = critical_knapsack(inst, cluster)?;
    let mut z_star = Vec::with_capacity(cl.knapsacks.len());
    let mut effective = Vec::with_capacity(cl.knapsacks.len());
    let mut used = Rational::zero();
    let mut before = true;
    for &k in &cl.knapsacks {
        let cap = if k == r {
            before = false;
            u - &used
        } else if before {
            inst.capacity(k).clone()
        } else {
            Rational::zero()
        };
        used += &cap;
        z_star.push((k, &cap / u));
        effective.push((k, cap));
    }
    Ok(ClusterAnalysis { cluster, critical: Some(r), z_star, effective })
}

pub fn compute_z_star(inst: &Instance) -> Vec<ClusterAnalysis> {
    (0..inst.num_clusters())
        .map(|l| analyze_cluster(inst, l).expect("cluster ids are dense"))
        .collect()
}

/// Effective capacity per knapsack id.
pub fn effective_capacities(inst: &Instance) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); inst.num_knapsacks()];
    for a in compute_z_star(inst) {
        for (k, cap) in a.effective {
            out[k] = cap;
        }
    }
    out
}

pub fn critical_knapsacks(inst: &Instance) -> BTreeSet<usize> {
    compute_z_star(inst).into_iter().filter_map(|a| a.critical).collect()
}

/// `z*` as a fractional solution (no `x` entries).
pub fn z_star_solution(inst: &Instance) -> FractionalSolution {
    let mut out = FractionalSolution::new();
    for a in compute_z_star(inst) {
        for (k, z) in a.z_star {
            out.set_z(k, a.cluster, z);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alg2Certificate {
    #[serde(serialize_with = "ser_rational")]
    pub lp_value: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub x1: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub x2: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub x3: Rational,
    pub chosen: &'static str,
}

#[derive(Clone, Debug)]
pub struct ThreeWay {
    pub x1: Assignment,
    pub x2: Assignment,
    pub x3: Assignment,
    pub values: [Rational; 3],
    pub chosen: usize,
}

impl ThreeWay {
    pub fn chosen_name(&self) -> &'static str {
        ["x1", "x2", "x3"][self.chosen]
    }

    pub fn chosen_assignment(&self) -> &Assignment {
        [&self.x1, &self.x2, &self.x3][self.chosen]
    }

    pub fn chosen_value(&self) -> &Rational {
        &self.values[self.chosen]
    }
}

/// Integral part, matched fractional part on ordinary knapsacks, matched
/// fractional part on critical knapsacks; each checked feasible, the first
/// best kept.
pub fn three_way_round(
    inst: &Instance,
    x: &FractionalSolution,
    matching: &Matching,
) -> Result<ThreeWay, PipageError> {
    let critical = critical_knapsacks(inst);
    let (x1, x2, x3) = decompose(x, matching, inst.num_sets(), &critical);
    for (name, cand) in [("x1", &x1), ("x2", &x2), ("x3", &x3)] {
        let report = check_feasible(inst, cand).expect("ids come from the instance");
        if !report.is_feasible() {
            let detail =
                report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
            return Err(PipageError::Infeasible { candidate: name, detail });
        }
    }
    let values = [assignment_value(inst, &x1), assignment_value(inst, &x2), assignment_value(inst, &x3)];
    let mut chosen = 0;
    for c in 1..3 {
        if values[c] > values[chosen] {
            chosen = c;
        }
    }
    Ok(ThreeWay { x1, x2, x3, values, chosen })
}

#[derive(Clone, Debug)]
pub struct Alg2Outcome {
    pub assignment: Assignment,
    pub value: Rational,
    pub certificate: Alg2Certificate,
    pub trace: PipageTrace,
    pub rounding: ThreeWay,
}

/// Fix `z*`, solve the reduced relaxation, make it bounded-split, and keep
/// the best of the three roundings.
pub fn solve_mcpc_alg2(inst: &Instance) -> Result<Alg2Outcome, McpcError> {
    let effective = effective_capacities(inst);
    let prog = build_mcpk_lp(inst, &effective);
    let sol = solve_lp(&prog.lp);
    if !sol.is_optimal() {
        return Err(PipageError::Lp(sol.status).into());
    }
    let x = prog.fractional_solution(&sol);
    let trace = bounded_split(inst, &x)?;
    let rounding = three_way_round(inst, &trace.rounded, &trace.matching)?;
    let certificate = Alg2Certificate {
        lp_value: sol.objective_value,
        x1: rounding.values[0].clone(),
        x2: rounding.values[1].clone(),
        x3: rounding.values[2].clone(),
        chosen: rounding.chosen_name(),
    };
    Ok(Alg2Outcome {
        assignment: rounding.chosen_assignment().clone(),
        value: rounding.chosen_value().clone(),
        certificate,
        trace,
        rounding,
    })
}
