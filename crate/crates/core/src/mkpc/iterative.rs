use std::collections::BTreeSet;

use num::{One, Zero};
use serde::Serialize;

use super::{greedy_lp, require_singleton, GreedyAnnotation, MkpcError};
use crate::model::{
    check_feasible, evaluate_assignment, validate_and_normalize, Assignment, Instance, RawInstance,
};
use crate::pipage::ser_rational;
use crate::rational::{ratio, Rational};

/// No item pooled by another cluster carries any fraction on `cluster`'s
/// knapsacks.
pub fn is_isolated(inst: &Instance, g: &GreedyAnnotation, cluster: usize) -> bool {
    let own = &inst.clusters()[cluster].knapsacks;
    (0..inst.num_clusters()).filter(|&l| l != cluster).all(|l| {
        g.pool(inst, l).into_iter().all(|j| own.iter().all(|&k| g.x.x(j, k).is_zero()))
    })
}

/// Lowest-id isolated cluster among `candidates`.
pub fn find_isolated_cluster(
    inst: &Instance,
    g: &GreedyAnnotation,
    candidates: &[usize],
) -> Option<usize> {
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    sorted.into_iter().find(|&l| is_isolated(inst, g, l))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterRounding {
    pub cluster: usize,
    /// `(set, knapsack)` pairs, by set id.
    pub placed: Vec<(usize, usize)>,
    pub profit: Rational,
    /// Fractional profit of the placed items on this cluster.
    pub placed_fractional: Rational,
    /// Fractional profit of every item on this cluster.
    pub fractional_profit: Rational,
}

struct Search<'a> {
    inst: &'a Instance,
    items: Vec<usize>,
    profits: Vec<Rational>,
    suffix: Vec<Rational>,
    /// Fractional profit of each item on this cluster, and suffix sums.
    fracs: Vec<Rational>,
    frac_suffix: Vec<Rational>,
    /// Fractional profit the placed items must carry.
    need: Rational,
    knaps: Vec<usize>,
    cap: Rational,
    load: Vec<Rational>,
    used: Rational,
    current: Vec<Option<usize>>,
    best: Option<Rational>,
    best_slots: Vec<Option<usize>>,
}

impl Search<'_> {
    fn run(&mut self, pos: usize, value: Rational, frac: Rational) {
        if &frac + &self.frac_suffix[pos] < self.need {
            return;
        }
        if pos == self.items.len() {
            if self.best.as_ref().is_none_or(|b| value > *b) {
                self.best = Some(value);
                self.best_slots = self.current.clone();
            }
            return;
        }
        if let Some(best) = &self.best {
            if &value + &self.suffix[pos] <= *best {
                return;
            }
        }
        let j = self.items[pos];
        let cost = self.inst.cost(j).clone();
        if &self.used + &cost <= self.cap {
            for slot in 0..self.knaps.len() {
                let k = self.knaps[slot];
                if !self.inst.fits(j, k) || &self.load[slot] + &cost > *self.inst.capacity(k) {
                    continue;
                }
                self.load[slot] += &cost;
                self.used += &cost;
                self.current[pos] = Some(k);
                let next = &value + &self.profits[pos];
                let next_frac = &frac + &self.fracs[pos];
                self.run(pos + 1, next, next_frac);
                self.current[pos] = None;
                self.used -= &cost;
                self.load[slot] -= &cost;
            }
        }
        self.run(pos + 1, value, frac);
    }
}

/// Most profitable feasible placement of the cluster's pool into its own
/// knapsacks among those whose placed items carry at least half of the
/// cluster's fractional profit. The unrestricted optimum can fall short of
/// that: an item split half into the cluster may beat two whole ones on
/// profit alone. Found by exhaustive search seeded with the greedy's whole
/// placements, and checked against both profit bounds.
pub fn round_cluster(
    inst: &Instance,
    g: &GreedyAnnotation,
    cluster: usize,
    max_pool: usize,
) -> Result<ClusterRounding, MkpcError> {
    let cl = &inst.clusters()[cluster];
    let pool = g.pool(inst, cluster);
    if pool.len() > max_pool {
        return Err(MkpcError::PoolTooLarge { cluster, size: pool.len(), limit: max_pool });
    }
    let mut items: Vec<usize> = pool.into_iter().collect();
    items.sort_by(|&a, &b| inst.set_profit(b).cmp(&inst.set_profit(a)).then(a.cmp(&b)));
    let own: BTreeSet<usize> = cl.knapsacks.iter().copied().collect();
    let frac_of = |j: usize| -> Rational {
        own.iter().map(|&k| g.x.x(j, k)).sum::<Rational>() * inst.set_profit(j)
    };
    let profits: Vec<Rational> = items.iter().map(|&j| inst.set_profit(j)).collect();
    let fracs: Vec<Rational> = items.iter().map(|&j| frac_of(j)).collect();
    let suffix_sums = |v: &[Rational]| {
        let mut out = vec![Rational::zero(); v.len() + 1];
        for i in (0..v.len()).rev() {
            out[i] = &out[i + 1] + &v[i];
        }
        out
    };
    let suffix = suffix_sums(&profits);
    let frac_suffix = suffix_sums(&fracs);
    let fractional_profit = g.cluster_profit(inst, cluster);
    let need = &fractional_profit * ratio(1, 2);
    let mut knaps = cl.knapsacks.clone();
    knaps.sort_unstable();

    // incumbent: unsplit items where the greedy put them, if that already
    // carries half the cluster's fractional profit
    let seed: Vec<Option<usize>> = items
        .iter()
        .map(|&j| {
            if g.unsplit_items.contains(&j) {
                knaps.iter().copied().find(|&k| g.x.x(j, k).is_one())
            } else {
                None
            }
        })
        .collect();
    let seeded = |v: &[Rational]| -> Rational {
        v.iter().zip(&seed).filter(|(_, s)| s.is_some()).map(|(p, _)| p).sum()
    };
    let best = (seeded(&fracs) >= need).then(|| seeded(&profits));

    let mut search = Search {
        inst,
        profits,
        suffix,
        fracs,
        frac_suffix,
        need,
        cap: cl.capacity.clone(),
        load: vec![Rational::zero(); knaps.len()],
        used: Rational::zero(),
        current: vec![None; items.len()],
        best,
        best_slots: seed,
        items,
        knaps,
    };
    search.run(0, Rational::zero(), Rational::zero());
    let Some(profit) = search.best.clone() else {
        return Err(MkpcError::RoundingBound {
            cluster,
            detail: format!("no feasible placement carries half of the fractional {fractional_profit}"),
        });
    };

    let mut placed: Vec<(usize, usize)> = search
        .items
        .iter()
        .zip(&search.best_slots)
        .filter_map(|(&j, k)| k.map(|k| (j, k)))
        .collect();
    placed.sort_unstable();

    let placed_fractional: Rational = placed.iter().map(|&(j, _)| frac_of(j)).sum();
    if profit < placed_fractional {
        return Err(MkpcError::RoundingBound {
            cluster,
            detail: format!("profit {profit} below its own fractional share {placed_fractional}"),
        });
    }
    if placed_fractional < search.need {
        return Err(MkpcError::RoundingBound {
            cluster,
            detail: format!(
                "fractional share {placed_fractional} below half of the cluster's {fractional_profit}"
            ),
        });
    }
    Ok(ClusterRounding { cluster, placed, profit, placed_fractional, fractional_profit })
}

/// An instance cut down from an original one, with id maps back to it.
#[derive(Clone, Debug)]
pub struct SubInstance {
    pub inst: Instance,
    pub set_ids: Vec<usize>,
    pub knapsack_ids: Vec<usize>,
    pub cluster_ids: Vec<usize>,
}

impl SubInstance {
    pub fn whole(inst: &Instance) -> Self {
        Self {
            inst: inst.clone(),
            set_ids: (0..inst.num_sets()).collect(),
            knapsack_ids: (0..inst.num_knapsacks()).collect(),
            cluster_ids: (0..inst.num_clusters()).collect(),
        }
    }
}

/// Drops cluster `cluster` with its knapsacks and the sets in `placed`, and
/// renumbers what is left. Items not covered by a remaining set go too.
/// Returns `None` once no cluster is left.
pub fn reduce_instance(
    sub: &SubInstance,
    cluster: usize,
    placed: &BTreeSet<usize>,
) -> Result<Option<SubInstance>, MkpcError> {
    let inst = &sub.inst;
    let clusters: Vec<usize> = (0..inst.num_clusters()).filter(|&l| l != cluster).collect();
    let knaps: Vec<usize> =
        (0..inst.num_knapsacks()).filter(|&k| inst.cluster_of(k) != cluster).collect();
    if clusters.is_empty() || knaps.is_empty() {
        return Ok(None);
    }
    let sets: Vec<usize> = (0..inst.num_sets()).filter(|j| !placed.contains(j)).collect();
    let mut items: Vec<usize> = sets.iter().flat_map(|&j| inst.sets()[j].items.iter().copied()).collect();
    items.sort_unstable();
    items.dedup();
    let new_index = |ids: &[usize], old: usize| ids.binary_search(&old).expect("kept id");

    let raw = RawInstance {
        kind: None,
        items: items.iter().enumerate().map(|(i, &old)| (i, inst.items()[old].profit.clone())).collect(),
        sets: sets
            .iter()
            .enumerate()
            .map(|(j, &old)| {
                let s = &inst.sets()[old];
                (j, s.cost.clone(), s.items.iter().map(|&i| new_index(&items, i)).collect())
            })
            .collect(),
        knapsacks: knaps
            .iter()
            .enumerate()
            .map(|(k, &old)| {
                (k, inst.capacity(old).clone(), new_index(&clusters, inst.cluster_of(old)))
            })
            .collect(),
        clusters: clusters
            .iter()
            .enumerate()
            .map(|(l, &old)| (l, inst.clusters()[old].capacity.clone()))
            .collect(),
    };
    Ok(Some(SubInstance {
        inst: validate_and_normalize(raw)?,
        set_ids: sets.iter().map(|&j| sub.set_ids[j]).collect(),
        knapsack_ids: knaps.iter().map(|&k| sub.knapsack_ids[k]).collect(),
        cluster_ids: clusters.iter().map(|&l| sub.cluster_ids[l]).collect(),
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IterativeConfig {
    /// Largest pool a single cluster may be rounded over.
    pub max_pool: usize,
}

impl Default for IterativeConfig {
    fn default() -> Self {
        Self { max_pool: 20 }
    }
}

/// One round, in original ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationRecord {
    pub cluster: usize,
    /// Fractional profit on the cluster in this round's relaxation.
    #[serde(serialize_with = "ser_rational")]
    pub fractional_profit: Rational,
    /// Fractional profit on the cluster in the original relaxation.
    #[serde(serialize_with = "ser_rational")]
    pub original_fractional_profit: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub rounded_profit: Rational,
    /// Fractional profit of the placed items on the cluster in this round's
    /// relaxation.
    #[serde(serialize_with = "ser_rational")]
    pub placed_fractional: Rational,
    /// Profit fixed after this round.
    #[serde(serialize_with = "ser_rational")]
    pub fixed_profit: Rational,
    /// Original fractional profit of all clusters rounded so far.
    #[serde(serialize_with = "ser_rational")]
    pub original_covered: Rational,
    /// `fixed_profit >= original_covered / 2`.
    pub half_recovered: bool,
    /// Optimum of the relaxation on what is left after this round.
    #[serde(serialize_with = "ser_rational")]
    pub remaining_lp_value: Rational,
    pub placed: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterativeCertificate {
    pub iterations: Vec<IterationRecord>,
    #[serde(serialize_with = "ser_rational")]
    pub lp_value: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub r#final: Rational,
}

#[derive(Clone, Debug)]
pub struct IterativeOutcome {
    pub assignment: Assignment,
    pub value: Rational,
    pub certificate: IterativeCertificate,
    pub original: GreedyAnnotation,
}

/// Repeatedly: greedy on what is left, pick an isolated cluster, round it,
/// fix its placement and remove it.
pub fn solve_mkpc_iterative(
    inst: &Instance,
    config: IterativeConfig,
) -> Result<IterativeOutcome, MkpcError> {
    require_singleton(inst)?;
    let original = greedy_lp(inst)?;
    let mut assignment = Assignment::unassigned(inst.num_sets());
    let mut iterations: Vec<IterationRecord> = Vec::new();
    let mut fixed_profit = Rational::zero();
    let mut original_covered = Rational::zero();

    let mut current = Some(SubInstance::whole(inst));
    let mut greedy = Some(original.clone());
    while let (Some(sub), Some(g)) = (current.take(), greedy.take()) {
        let all: Vec<usize> = (0..sub.inst.num_clusters()).collect();
        let iota = find_isolated_cluster(&sub.inst, &g, &all).ok_or_else(|| {
            MkpcError::NoIsolatedCluster {
                iteration: iterations.len() + 1,
                remaining: sub.cluster_ids.clone(),
            }
        })?;
        let rounding = round_cluster(&sub.inst, &g, iota, config.max_pool)?;
        let orig_cluster = sub.cluster_ids[iota];
        let placed: Vec<(usize, usize)> = rounding
            .placed
            .iter()
            .map(|&(j, k)| (sub.set_ids[j], sub.knapsack_ids[k]))
            .collect();
        for &(j, k) in &placed {
            assignment.assign(j, k);
        }
        fixed_profit += &rounding.profit;
        original_covered += original.cluster_profit(inst, orig_cluster);

        let placed_local: BTreeSet<usize> = rounding.placed.iter().map(|p| p.0).collect();
        let next = reduce_instance(&sub, iota, &placed_local)?;
        let next_greedy = next.as_ref().map(|s| greedy_lp(&s.inst)).transpose()?;
        let mut sorted = placed;
        sorted.sort_unstable();
        iterations.push(IterationRecord {
            cluster: orig_cluster,
            fractional_profit: rounding.fractional_profit,
            original_fractional_profit: original.cluster_profit(inst, orig_cluster),
            rounded_profit: rounding.profit,
            placed_fractional: rounding.placed_fractional,
            fixed_profit: fixed_profit.clone(),
            original_covered: original_covered.clone(),
            half_recovered: fixed_profit >= &original_covered * ratio(1, 2),
            remaining_lp_value: next_greedy.as_ref().map_or_else(Rational::zero, |g| g.objective.clone()),
            placed: sorted,
        });
        current = next;
        greedy = next_greedy;
    }

    let report = check_feasible(inst, &assignment)?;
    if !report.is_feasible() {
        let detail = report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        return Err(MkpcError::Infeasible(detail));
    }
    let value = evaluate_assignment(inst, &assignment)?;
    let certificate =
        IterativeCertificate { iterations, lp_value: original.objective.clone(), r#final: value.clone() };
    Ok(IterativeOutcome { assignment, value, certificate, original })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mkpc::tests::e1;
    use crate::model::tests::raw;
    use crate::rational::{int, ratio};

    #[test]
    fn single_cluster_is_isolated() {
        let inst = e1();
        let g = greedy_lp(&inst).unwrap();
        assert_eq!(find_isolated_cluster(&inst, &g, &[0]), Some(0));
    }

    #[test]
    fn e1_rounding_keeps_the_valuable_item() {
        let inst = e1();
        let g = greedy_lp(&inst).unwrap();
        let r = round_cluster(&inst, &g, 0, 20).unwrap();
        assert_eq!(r.profit, int(4));
        assert_eq!(r.placed, vec![(0, 0)]);
        assert_eq!(r.fractional_profit, int(5));
        assert_eq!(r.placed_fractional, int(4));
    }

    #[test]
    fn e1_iterative() {
        let out = solve_mkpc_iterative(&e1(), IterativeConfig::default()).unwrap();
        assert_eq!(out.value, int(4));
        assert_eq!(out.certificate.lp_value, int(5));
        assert_eq!(out.certificate.iterations.len(), 1);
        assert!(out.certificate.iterations[0].half_recovered);
    }

    #[test]
    fn half_split_item_loses_to_the_share_bound() {
        // item 1 is split half into cluster 1; placing it alone is the most
        // profitable choice but carries only 5/2 of the cluster's 11/2
        let inst = validate_and_normalize(raw(
            &[6, 5, 4, 3],
            &[(3, &[0]), (2, &[1]), (2, &[2]), (1, &[3])],
            &[(3, 0), (3, 0), (2, 1), (1, 1)],
            &[4, 2],
        ))
        .unwrap();
        let g = greedy_lp(&inst).unwrap();
        assert_eq!(g.split_of.get(&2), Some(&1));
        assert_eq!(find_isolated_cluster(&inst, &g, &[0, 1]), Some(1));
        let r = round_cluster(&inst, &g, 1, 20).unwrap();
        assert_eq!(r.fractional_profit, ratio(11, 2));
        assert_eq!(r.placed, vec![(3, 2)]);
        assert_eq!(r.profit, int(3));
    }

    #[test]
    fn whole_placements_are_kept() {
        let inst = validate_and_normalize(raw(
            &[5, 3],
            &[(2, &[0]), (1, &[1])],
            &[(2, 0), (1, 0)],
            &[3],
        ))
        .unwrap();
        let g = greedy_lp(&inst).unwrap();
        assert!(g.split_items.is_empty());
        let r = round_cluster(&inst, &g, 0, 20).unwrap();
        assert_eq!(r.profit, r.fractional_profit);
    }

    #[test]
    fn nothing_assigned_rounds_to_nothing() {
        // the only item is too large for cluster 1
        let inst = validate_and_normalize(raw(
            &[5],
            &[(3, &[0])],
            &[(3, 0), (1, 1), (1, 1)],
            &[3, 1],
        ))
        .unwrap();
        let g = greedy_lp(&inst).unwrap();
        let r = round_cluster(&inst, &g, 1, 20).unwrap();
        assert!(r.placed.is_empty());
        assert_eq!(r.profit, int(0));
    }

    #[test]
    fn crossing_items_block_isolation() {
        // knapsacks: 0 (B 2, cluster 0), 1 (B 3, cluster 1), 2 (B 10,
        // cluster 1), 3 (B 10, cluster 0)
        let inst = validate_and_normalize(raw(
            &[10, 6],
            &[(2, &[0]), (3, &[1])],
            &[(2, 0), (3, 1), (10, 1), (10, 0)],
            &[11, 12],
        ))
        .unwrap();
        let g = greedy_lp(&inst).unwrap();
        assert_eq!(find_isolated_cluster(&inst, &g, &[0, 1]), None);
        assert!(matches!(
            solve_mkpc_iterative(&inst, IterativeConfig::default()),
            Err(MkpcError::NoIsolatedCluster { iteration: 1, .. })
        ));
    }

    #[test]
    fn pool_limit_is_enforced() {
        let inst = e1();
        let g = greedy_lp(&inst).unwrap();
        assert_eq!(
            round_cluster(&inst, &g, 0, 1),
            Err(MkpcError::PoolTooLarge { cluster: 0, size: 2, limit: 1 })
        );
    }

    #[test]
    fn reduction_renumbers() {
        let inst = validate_and_normalize(raw(
            &[5, 3, 2],
            &[(2, &[0]), (1, &[1]), (1, &[2])],
            &[(4, 0), (2, 1), (2, 1)],
            &[4, 3],
        ))
        .unwrap();
        let sub = reduce_instance(&SubInstance::whole(&inst), 0, &BTreeSet::from([0])).unwrap().unwrap();
        assert_eq!(sub.set_ids, vec![1, 2]);
        assert_eq!(sub.knapsack_ids, vec![1, 2]);
        assert_eq!(sub.cluster_ids, vec![1]);
        assert_eq!(sub.inst.num_items(), 2);
        assert!(reduce_instance(&sub, 0, &BTreeSet::new()).unwrap().is_none());
    }
}
