//! Multiple knapsacks with cluster constraints and one item per set: the
//! greedy that solves the reduced relaxation exactly, the rounding that
//! keeps a third of it, and iterative rounding for clusters that can be
//! peeled off one at a time.

mod iterative;

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::lp::{build_mcpk_lp, solve_lp};
use crate::mcpc::{effective_capacities, three_way_round, z_star_solution, Alg2Certificate, ThreeWay};
use crate::model::{Assignment, FractionalSolution, Instance, ModelError, ProblemKind};
use crate::pipage::{saturating_matching, Matching, PipageError, SupportGraph};
use crate::rational::{min, Rational};

pub use iterative::{
    find_isolated_cluster, is_isolated, reduce_instance, round_cluster, solve_mkpc_iterative,
    ClusterRounding, IterationRecord, IterativeCertificate, IterativeConfig, IterativeOutcome,
    SubInstance,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MkpcError {
    #[error("{0} instance has sets that are not distinct singletons")]
    NotSingleton(ProblemKind),
    #[error("greedy value {greedy} differs from the simplex optimum {simplex}")]
    NotOptimal { greedy: String, simplex: String },
    #[error("knapsack {knapsack} is the first host of split items {first} and {second}")]
    SplitNotUnique { knapsack: usize, first: usize, second: usize },
    #[error("greedy solution lacks the bounded split property: {0}")]
    BoundedSplit(PipageError),
    #[error("no isolated cluster among {remaining:?} in iteration {iteration}")]
    NoIsolatedCluster { iteration: usize, remaining: Vec<usize> },
    #[error("cluster {cluster} pools {size} items, more than the limit of {limit}")]
    PoolTooLarge { cluster: usize, size: usize, limit: usize },
    #[error("rounding cluster {cluster} broke its profit bound: {detail}")]
    RoundingBound { cluster: usize, detail: String },
    #[error("assembled assignment is infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Pipage(#[from] PipageError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Greedy solution of the reduced relaxation with its item classification.
/// Items are identified with their sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyAnnotation {
    /// `x` entries and the `z*` shares.
    pub x: FractionalSolution,
    pub objective: Rational,
    pub effective: Vec<Rational>,
    /// `effective[k]` minus the load of `k`.
    pub residual: Vec<Rational>,
    pub split_items: BTreeSet<usize>,
    pub unsplit_items: BTreeSet<usize>,
    /// Knapsack -> the split item whose first host it is.
    pub split_of: BTreeMap<usize, usize>,
    /// Knapsack -> unsplit items placed whole in it.
    pub us_of: BTreeMap<usize, BTreeSet<usize>>,
    pub matching: Matching,
}

impl GreedyAnnotation {
    /// `US(l) ∪ SS(l)`: unsplit items in the cluster's knapsacks and split
    /// items whose first host lies in the cluster.
    pub fn pool(&self, inst: &Instance, cluster: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &k in &inst.clusters()[cluster].knapsacks {
            if let Some(us) = self.us_of.get(&k) {
                out.extend(us.iter().copied());
            }
            if let Some(&j) = self.split_of.get(&k) {
                out.insert(j);
            }
        }
        out
    }

    /// `sum_j sum_{k in K(l)} p_j x_jk`.
    pub fn cluster_profit(&self, inst: &Instance, cluster: usize) -> Rational {
        let knaps: BTreeSet<usize> = inst.clusters()[cluster].knapsacks.iter().copied().collect();
        self.x
            .x_entries()
            .filter(|(_, k, _)| knaps.contains(k))
            .map(|(j, _, v)| inst.set_profit(j) * v)
            .sum()
    }
}

/// Knapsacks able to hold set `j`, smallest capacity first, larger id first
/// among equal capacities.
pub fn host_order(inst: &Instance, set: usize) -> Vec<usize> {
    let mut hosts: Vec<usize> = (0..inst.num_knapsacks()).filter(|&k| inst.fits(set, k)).collect();
    hosts.sort_by(|&a, &b| inst.capacity(a).cmp(inst.capacity(b)).then(b.cmp(&a)));
    hosts
}

/// Items by non-increasing `p_j / c_j`, lower id first on ties.
pub fn efficiency_order(inst: &Instance) -> Vec<usize> {
    let ratio: Vec<Rational> = (0..inst.num_sets()).map(|j| inst.set_profit(j) / inst.cost(j)).collect();
    let mut order: Vec<usize> = (0..inst.num_sets()).collect();
    order.sort_by(|&a, &b| ratio[b].cmp(&ratio[a]).then(a.cmp(&b)));
    order
}

pub(crate) fn require_singleton(inst: &Instance) -> Result<(), MkpcError> {
    if inst.is_singleton() {
        Ok(())
    } else {
        Err(MkpcError::NotSingleton(inst.kind()))
    }
}

/// Fills items into knapsacks by efficiency: each goes to the smallest
/// knapsack that can hold it and still has room under its effective
/// capacity, spilling into the next such knapsack when that one fills up.
pub fn greedy_lp(inst: &Instance) -> Result<GreedyAnnotation, MkpcError> {
    require_singleton(inst)?;
    let effective = effective_capacities(inst);
    let mut residual = effective.clone();
    let mut x = z_star_solution(inst);
    let mut first_host = BTreeMap::new();

    for j in efficiency_order(inst) {
        let cost = inst.cost(j);
        let mut left = Rational::one();
        for k in host_order(inst, j) {
            if left.is_zero() {
                break;
            }
            if !residual[k].is_positive() {
                continue;
            }
            let amount = min(&left, &(&residual[k] / cost));
            residual[k] -= &amount * cost;
            left -= &amount;
            first_host.entry(j).or_insert(k);
            x.set_x(j, k, amount);
        }
    }

    let objective = (0..inst.num_sets()).map(|j| inst.set_profit(j) * x.set_total(j)).sum();
    let mut split_items = BTreeSet::new();
    let mut unsplit_items = BTreeSet::new();
    let mut split_of = BTreeMap::new();
    let mut us_of: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (&j, &k) in &first_host {
        if x.x(j, k).is_one() {
            unsplit_items.insert(j);
            us_of.entry(k).or_default().insert(j);
        } else {
            split_items.insert(j);
            if let Some(prev) = split_of.insert(k, j) {
                return Err(MkpcError::SplitNotUnique {
                    knapsack: k,
                    first: prev.min(j),
                    second: prev.max(j),
                });
            }
        }
    }
    let matching = saturating_matching(&SupportGraph::new(&x)).map_err(MkpcError::BoundedSplit)?;
    Ok(GreedyAnnotation {
        x,
        objective,
        effective,
        residual,
        split_items,
        unsplit_items,
        split_of,
        us_of,
        matching,
    })
}

/// [`greedy_lp`], with its value compared exactly to the simplex optimum of
/// the same program.
pub fn greedy_lp_checked(inst: &Instance) -> Result<GreedyAnnotation, MkpcError> {
    let g = greedy_lp(inst)?;
    let sol = solve_lp(&build_mcpk_lp(inst, &g.effective).lp);
    if !sol.is_optimal() || sol.objective_value != g.objective {
        return Err(MkpcError::NotOptimal {
            greedy: g.objective.to_string(),
            simplex: sol.objective_value.to_string(),
        });
    }
    Ok(g)
}

#[derive(Clone, Debug)]
pub struct ThirdOutcome {
    pub assignment: Assignment,
    pub value: Rational,
    pub certificate: Alg2Certificate,
    pub greedy: GreedyAnnotation,
    pub rounding: ThreeWay,
}

/// The three-way rounding applied directly to the greedy solution, which
/// already has the bounded split property.
pub fn solve_mkpc_third(inst: &Instance) -> Result<ThirdOutcome, MkpcError> {
    let greedy = greedy_lp(inst)?;
    let rounding = three_way_round(inst, &greedy.x, &greedy.matching)?;
    let certificate = Alg2Certificate {
        lp_value: greedy.objective.clone(),
        x1: rounding.values[0].clone(),
        x2: rounding.values[1].clone(),
        x3: rounding.values[2].clone(),
        chosen: rounding.chosen_name(),
    };
    Ok(ThirdOutcome {
        assignment: rounding.chosen_assignment().clone(),
        value: rounding.chosen_value().clone(),
        certificate,
        greedy,
        rounding,
    })
}

/// Cluster order in which every knapsack of an earlier cluster is at least
/// as large as every knapsack of a later one, if there is one. Clusters
/// without knapsacks go last.
pub fn detect_disentangled(inst: &Instance) -> Option<Vec<usize>> {
    let band = |l: usize| {
        let caps = inst.clusters()[l].knapsacks.iter().map(|&k| inst.capacity(k));
        (caps.clone().max().cloned(), caps.min().cloned())
    };
    let (mut order, empty): (Vec<usize>, Vec<usize>) =
        (0..inst.num_clusters()).partition(|&l| !inst.clusters()[l].knapsacks.is_empty());
    let bands: Vec<_> = (0..inst.num_clusters()).map(band).collect();
    order.sort_by(|&a, &b| {
        let (ma, na) = &bands[a];
        let (mb, nb) = &bands[b];
        mb.cmp(ma).then(nb.cmp(na)).then(a.cmp(&b))
    });
    let ok = order.windows(2).all(|w| bands[w[0]].1 >= bands[w[1]].0);
    ok.then(|| order.into_iter().chain(empty).collect())
}
