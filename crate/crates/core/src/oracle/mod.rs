//! Exact optimum by exhaustive search, and exact cross-checks between
//! relaxation solvers.

mod cross;

use std::time::{Duration, Instant};

use num::Zero;
use thiserror::Error;

use crate::model::{check_feasible, evaluate_assignment, Assignment, Instance};
use crate::par::{map_collect, Execution};
use crate::rational::Rational;

pub use cross::{lp_cross_check, CrossCheck, CrossCheckReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} = {got} exceeds the oracle limit of {limit}")]
    TooLarge { what: &'static str, got: usize, limit: usize },
    #[error("search needed more than {0} nodes")]
    NodeLimit(u64),
    #[error("search ran past {0:?}")]
    TimeLimit(Duration),
    #[error("search result failed its own audit: {0}")]
    Audit(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_sets: usize,
    pub max_knapsacks: usize,
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
    pub execution: Execution,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_sets: 12,
            max_knapsacks: 5,
            max_nodes: 200_000_000,
            time_limit: None,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub opt_value: Rational,
    pub opt_assignment: Assignment,
    pub nodes_explored: u64,
    pub time: Duration,
}

struct Prepared<'a> {
    inst: &'a Instance,
    /// Sets in search order.
    order: Vec<usize>,
    /// `tail_items[pos]`: items covered by some set at `pos..`.
    tail_items: Vec<Vec<usize>>,
}

struct Branch<'a, 'b> {
    prep: &'b Prepared<'a>,
    knap_load: Vec<Rational>,
    cluster_load: Vec<Rational>,
    cover: Vec<u32>,
    slots: Vec<Option<usize>>,
    best: Option<(Rational, Vec<Option<usize>>)>,
    nodes: u64,
    max_nodes: u64,
    deadline: Option<(Instant, Duration)>,
    failed: Option<OracleError>,
}

impl Branch<'_, '_> {
    fn bound(&self, pos: usize, value: &Rational) -> Rational {
        let items = self.prep.inst.items();
        value
            + self.prep.tail_items[pos]
                .iter()
                .filter(|&&i| self.cover[i] == 0)
                .map(|&i| &items[i].profit)
                .sum::<Rational>()
    }

    fn place(&mut self, j: usize, k: Option<usize>, sign: bool) -> Rational {
        let inst = self.prep.inst;
        let mut gained = Rational::zero();
        if let Some(k) = k {
            let c = inst.cost(j);
            let l = inst.cluster_of(k);
            if sign {
                self.knap_load[k] += c;
                self.cluster_load[l] += c;
            } else {
                self.knap_load[k] -= c;
                self.cluster_load[l] -= c;
            }
            for &i in &inst.sets()[j].items {
                if sign {
                    if self.cover[i] == 0 {
                        gained += &inst.items()[i].profit;
                    }
                    self.cover[i] += 1;
                } else {
                    self.cover[i] -= 1;
                }
            }
        }
        self.slots[j] = k;
        gained
    }

    fn choices(&self, j: usize) -> Vec<Option<usize>> {
        let inst = self.prep.inst;
        let c = inst.cost(j);
        let mut out: Vec<Option<usize>> = (0..inst.num_knapsacks())
            .filter(|&k| {
                let l = inst.cluster_of(k);
                inst.fits(j, k)
                    && &self.knap_load[k] + c <= *inst.capacity(k)
                    && &self.cluster_load[l] + c <= inst.clusters()[l].capacity
            })
            .map(Some)
            .collect();
        out.push(None);
        out
    }

    fn dfs(&mut self, pos: usize, value: Rational) {
        if self.failed.is_some() {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.failed = Some(OracleError::NodeLimit(self.max_nodes));
            return;
        }
        if let Some((start, limit)) = self.deadline {
            if self.nodes.is_multiple_of(4096) && start.elapsed() > limit {
                self.failed = Some(OracleError::TimeLimit(limit));
                return;
            }
        }
        if let Some((best, _)) = &self.best {
            if self.bound(pos, &value) <= *best {
                return;
            }
        }
        if pos == self.prep.order.len() {
            self.best = Some((value, self.slots.clone()));
            return;
        }
        let j = self.prep.order[pos];
        for k in self.choices(j) {
            let gained = self.place(j, k, true);
            self.dfs(pos + 1, &value + gained);
            self.place(j, k, false);
        }
    }
}

/// Exact optimum by depth-first search over every placement of every set
/// (each knapsack in id order, then "unassigned"), pruned by capacities and
/// by the profit still coverable. The branches for the first set are
/// searched independently, in parallel when `limits.execution` allows, and
/// the first best branch wins, so the result does not depend on the mode.
pub fn brute_force_opt(inst: &Instance, limits: &OracleLimits) -> Result<OracleResult, OracleError> {
    if inst.num_sets() > limits.max_sets {
        return Err(OracleError::TooLarge { what: "sets", got: inst.num_sets(), limit: limits.max_sets });
    }
    if inst.num_knapsacks() > limits.max_knapsacks {
        return Err(OracleError::TooLarge {
            what: "knapsacks",
            got: inst.num_knapsacks(),
            limit: limits.max_knapsacks,
        });
    }
    let start = Instant::now();
    let mut order: Vec<usize> = (0..inst.num_sets()).collect();
    order.sort_by(|&a, &b| inst.set_profit(b).cmp(&inst.set_profit(a)).then(a.cmp(&b)));
    let mut tail_items = vec![Vec::new(); order.len() + 1];
    for pos in (0..order.len()).rev() {
        let mut items = tail_items[pos + 1].clone();
        items.extend(inst.sets()[order[pos]].items.iter().copied());
        items.sort_unstable();
        items.dedup();
        tail_items[pos] = items;
    }
    let prep = Prepared { inst, order, tail_items };

    let fresh = || Branch {
        prep: &prep,
        knap_load: vec![Rational::zero(); inst.num_knapsacks()],
        cluster_load: vec![Rational::zero(); inst.num_clusters()],
        cover: vec![0; inst.num_items()],
        slots: vec![None; inst.num_sets()],
        best: None,
        nodes: 0,
        max_nodes: limits.max_nodes,
        deadline: limits.time_limit.map(|l| (start, l)),
        failed: None,
    };

    let (opt_value, slots, nodes) = if prep.order.is_empty() {
        (Rational::zero(), Vec::new(), 1)
    } else {
        let root = prep.order[0];
        let roots = fresh().choices(root);
        let results = map_collect(limits.execution, &roots, |&k| {
            let mut b = fresh();
            b.nodes = 1;
            let gained = b.place(root, k, true);
            b.dfs(1, gained);
            (b.best, b.nodes, b.failed)
        });
        let mut nodes = 1u64;
        let mut best: Option<(Rational, Vec<Option<usize>>)> = None;
        for (found, n, failed) in results {
            if let Some(e) = failed {
                return Err(e);
            }
            nodes += n;
            if let Some((v, s)) = found {
                if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                    best = Some((v, s));
                }
            }
        }
        if nodes > limits.max_nodes {
            return Err(OracleError::NodeLimit(limits.max_nodes));
        }
        let (v, s) = best.expect("leaving every set unassigned is always reachable");
        (v, s, nodes)
    };

    let opt_assignment = Assignment::from_slots(slots);
    let report = check_feasible(inst, &opt_assignment).map_err(|e| OracleError::Audit(e.to_string()))?;
    if !report.is_feasible() {
        return Err(OracleError::Audit(format!("{:?}", report.violations)));
    }
    let evaluated = evaluate_assignment(inst, &opt_assignment).map_err(|e| OracleError::Audit(e.to_string()))?;
    if evaluated != opt_value {
        return Err(OracleError::Audit(format!("tracked {opt_value}, evaluated {evaluated}")));
    }
    Ok(OracleResult { opt_value, opt_assignment, nodes_explored: nodes, time: start.elapsed() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{tests::raw, validate_and_normalize, RawInstance};
    use crate::rational::int;

    #[test]
    fn e1_optimum() {
        let inst = validate_and_normalize(raw(
            &[4, 2],
            &[(2, &[0]), (2, &[1])],
            &[(2, 0), (2, 0)],
            &[3],
        ))
        .unwrap();
        let r = brute_force_opt(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(r.opt_value, int(4));
        assert_eq!(r.opt_assignment.slots(), &[Some(0), None]);
    }

    #[test]
    fn no_sets_is_zero() {
        let inst = validate_and_normalize(RawInstance {
            kind: None,
            items: vec![(0, int(3))],
            sets: vec![],
            knapsacks: vec![(0, int(1), 0)],
            clusters: vec![(0, int(1))],
        })
        .unwrap();
        assert_eq!(brute_force_opt(&inst, &OracleLimits::default()).unwrap().opt_value, int(0));
    }

    #[test]
    fn everything_fits_counts_items_once() {
        let inst = validate_and_normalize(raw(
            &[2, 3, 4],
            &[(1, &[0, 1]), (1, &[1, 2])],
            &[(5, 0)],
            &[5],
        ))
        .unwrap();
        assert_eq!(brute_force_opt(&inst, &OracleLimits::default()).unwrap().opt_value, int(9));
    }

    #[test]
    fn limits_are_hard_errors() {
        let sets: Vec<(i64, &[usize])> = (0..13).map(|_| (1, &[0usize][..])).collect();
        let inst = validate_and_normalize(raw(&[1], &sets, &[(1, 0)], &[1])).unwrap();
        assert!(matches!(
            brute_force_opt(&inst, &OracleLimits::default()),
            Err(OracleError::TooLarge { what: "sets", .. })
        ));
        let small = validate_and_normalize(raw(&[1, 1], &[(1, &[0]), (1, &[1])], &[(1, 0)], &[1]))
            .unwrap();
        let tight = OracleLimits { max_nodes: 2, ..Default::default() };
        assert_eq!(brute_force_opt(&small, &tight), Err(OracleError::NodeLimit(2)));
    }

    #[test]
    fn modes_agree() {
        let inst = validate_and_normalize(raw(
            &[3, 1, 4, 1, 5],
            &[(2, &[0, 1]), (3, &[2]), (1, &[3, 4]), (2, &[4])],
            &[(3, 0), (2, 0), (4, 1)],
            &[4, 4],
        ))
        .unwrap();
        let seq = OracleLimits { execution: Execution::Sequential, ..Default::default() };
        let par = OracleLimits { execution: Execution::Parallel, ..Default::default() };
        let a = brute_force_opt(&inst, &seq).unwrap();
        let b = brute_force_opt(&inst, &par).unwrap();
        assert_eq!(a.opt_value, b.opt_value);
        assert_eq!(a.opt_assignment, b.opt_assignment);
        assert_eq!(a.nodes_explored, b.nodes_explored);
    }
}
