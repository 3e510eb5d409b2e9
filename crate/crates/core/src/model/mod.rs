//! Problem instances, assignments and fractional solutions.
//!
//! An [`Instance`] is only ever produced by [`validate_and_normalize`], so
//! every instance in circulation satisfies the two standing assumptions on
//! clusters: each knapsack fits inside its cluster (`B_k <= U_l`), and a
//! cluster either binds (`sum B_k > U_l`) or carries the `redundant` flag.

mod fractional;
mod generate;
mod json;

use std::cmp::Ordering;
use std::fmt;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

pub use fractional::FractionalSolution;
pub use generate::{generate_instance, GenerateError, GeneratorParams};
pub use json::{
    assignment_from_json, assignment_to_json, parse_instance, serialize_instance, JsonError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Mcpc,
    Mcpk,
    Mkpc,
    Mkp,
}

impl ProblemKind {
    /// True when every instance of `other` is also an instance of `self`.
    pub fn generalizes(self, other: ProblemKind) -> bool {
        use ProblemKind::*;
        match self {
            Mcpc => true,
            Mcpk => matches!(other, Mcpk | Mkp),
            Mkpc => matches!(other, Mkpc | Mkp),
            Mkp => other == Mkp,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Mcpc => "mcpc",
            ProblemKind::Mcpk => "mcpk",
            ProblemKind::Mkpc => "mkpc",
            ProblemKind::Mkp => "mkp",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mcpc" => Ok(ProblemKind::Mcpc),
            "mcpk" => Ok(ProblemKind::Mcpk),
            "mkpc" => Ok(ProblemKind::Mkpc),
            "mkp" => Ok(ProblemKind::Mkp),
            other => Err(format!("unknown problem kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub id: usize,
    pub profit: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSet {
    pub id: usize,
    pub cost: Rational,
    /// Sorted, duplicate-free item ids.
    pub items: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Knapsack {
    pub id: usize,
    pub capacity: Rational,
    pub cluster: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub id: usize,
    pub capacity: Rational,
    /// Member knapsacks by non-increasing capacity, ties by ascending id.
    pub knapsacks: Vec<usize>,
    /// The cluster capacity cannot bind (`sum B_k <= U_l`).
    pub redundant: bool,
}

/// Unvalidated input. Entries may appear in any order; ids must be a
/// permutation of `0..len` for each entity kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawInstance {
    pub kind: Option<ProblemKind>,
    pub items: Vec<(usize, Rational)>,
    pub sets: Vec<(usize, Rational, Vec<usize>)>,
    pub knapsacks: Vec<(usize, Rational, usize)>,
    pub clusters: Vec<(usize, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    kind: ProblemKind,
    items: Vec<Item>,
    sets: Vec<CoverSet>,
    knapsacks: Vec<Knapsack>,
    clusters: Vec<Cluster>,
    /// For every item, the ids of sets containing it.
    sets_of_item: Vec<Vec<usize>>,
    /// All knapsacks by non-increasing capacity, ties by ascending id.
    canonical_order: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate {entity} id {id}")]
    DuplicateId { entity: &'static str, id: usize },
    #[error("{entity} ids must be 0..{len}; found id {id}")]
    IdOutOfRange { entity: &'static str, id: usize, len: usize },
    #[error("instance has no knapsacks")]
    NoKnapsacks,
    #[error("set {set} references unknown item {item}")]
    UnknownItem { set: usize, item: usize },
    #[error("knapsack {knapsack} references unknown cluster {cluster}")]
    UnknownCluster { knapsack: usize, cluster: usize },
    #[error("{entity} {id}: {field} must be positive, got {value}")]
    NonPositive { entity: &'static str, id: usize, field: &'static str, value: String },
    #[error("declared kind `{declared}` does not admit the detected structure `{detected}`")]
    KindMismatch { declared: ProblemKind, detected: ProblemKind },
    #[error("assignment covers {got} sets but the instance has {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("assignment places set {set} into unknown knapsack {knapsack}")]
    UnknownKnapsack { set: usize, knapsack: usize },
}

fn dense_order<T>(
    entity: &'static str,
    entries: &[T],
    id_of: impl Fn(&T) -> usize,
) -> Result<Vec<usize>, ModelError> {
    let len = entries.len();
    let mut slot = vec![usize::MAX; len];
    for (pos, e) in entries.iter().enumerate() {
        let id = id_of(e);
        if id >= len {
            return Err(ModelError::IdOutOfRange { entity, id, len });
        }
        if slot[id] != usize::MAX {
            return Err(ModelError::DuplicateId { entity, id });
        }
        slot[id] = pos;
    }
    Ok(slot)
}

fn require_positive(
    entity: &'static str,
    id: usize,
    field: &'static str,
    value: &Rational,
) -> Result<(), ModelError> {
    if value.is_positive() {
        Ok(())
    } else {
        Err(ModelError::NonPositive { entity, id, field, value: value.to_string() })
    }
}

/// Compares knapsacks for the canonical order: larger capacity first, then
/// smaller id.
pub(crate) fn canonical_cmp(a: (usize, &Rational), b: (usize, &Rational)) -> Ordering {
    b.1.cmp(a.1).then(a.0.cmp(&b.0))
}

/// Validates a raw instance and applies the standing normalizations:
/// knapsack capacities above their cluster capacity are clamped to it, and
/// clusters whose knapsacks cannot jointly exceed the cluster capacity are
/// flagged redundant. The problem kind is detected from the structure.
pub fn validate_and_normalize(raw: RawInstance) -> Result<Instance, ModelError> {
    if raw.knapsacks.is_empty() {
        return Err(ModelError::NoKnapsacks);
    }
    let item_pos = dense_order("item", &raw.items, |e| e.0)?;
    let set_pos = dense_order("set", &raw.sets, |e| e.0)?;
    let knap_pos = dense_order("knapsack", &raw.knapsacks, |e| e.0)?;
    let cluster_pos = dense_order("cluster", &raw.clusters, |e| e.0)?;

    let mut items = Vec::with_capacity(item_pos.len());
    for (id, &pos) in item_pos.iter().enumerate() {
        let profit = raw.items[pos].1.clone();
        require_positive("item", id, "profit", &profit)?;
        items.push(Item { id, profit });
    }

    let mut sets = Vec::with_capacity(set_pos.len());
    for (id, &pos) in set_pos.iter().enumerate() {
        let (_, cost, members) = &raw.sets[pos];
        require_positive("set", id, "cost", cost)?;
        let mut members = members.clone();
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&i| i >= items.len()) {
            return Err(ModelError::UnknownItem { set: id, item: bad });
        }
        sets.push(CoverSet { id, cost: cost.clone(), items: members });
    }

    let mut clusters = Vec::with_capacity(cluster_pos.len());
    for (id, &pos) in cluster_pos.iter().enumerate() {
        let capacity = raw.clusters[pos].1.clone();
        require_positive("cluster", id, "capacity", &capacity)?;
        clusters.push(Cluster { id, capacity, knapsacks: Vec::new(), redundant: false });
    }

    let mut knapsacks = Vec::with_capacity(knap_pos.len());
    for (id, &pos) in knap_pos.iter().enumerate() {
        let (_, capacity, cluster) = &raw.knapsacks[pos];
        require_positive("knapsack", id, "capacity", capacity)?;
        let Some(cl) = clusters.get(*cluster) else {
            return Err(ModelError::UnknownCluster { knapsack: id, cluster: *cluster });
        };
        let capacity = if capacity > &cl.capacity { cl.capacity.clone() } else { capacity.clone() };
        knapsacks.push(Knapsack { id, capacity, cluster: *cluster });
    }

    for k in &knapsacks {
        clusters[k.cluster].knapsacks.push(k.id);
    }
    for cl in &mut clusters {
        cl.knapsacks
            .sort_by(|&a, &b| canonical_cmp((a, &knapsacks[a].capacity), (b, &knapsacks[b].capacity)));
        let total: Rational = cl.knapsacks.iter().map(|&k| &knapsacks[k].capacity).sum();
        cl.redundant = total <= cl.capacity;
    }

    let mut canonical_order: Vec<usize> = (0..knapsacks.len()).collect();
    canonical_order
        .sort_by(|&a, &b| canonical_cmp((a, &knapsacks[a].capacity), (b, &knapsacks[b].capacity)));

    let mut sets_of_item = vec![Vec::new(); items.len()];
    for s in &sets {
        for &i in &s.items {
            sets_of_item[i].push(s.id);
        }
    }

    let singleton = {
        let mut seen = vec![false; items.len()];
        sets.iter().all(|s| {
            s.items.len() == 1 && !std::mem::replace(&mut seen[s.items[0]], true)
        })
    };
    let all_redundant = clusters.iter().all(|c| c.redundant);
    let detected = match (singleton, all_redundant) {
        (true, true) => ProblemKind::Mkp,
        (true, false) => ProblemKind::Mkpc,
        (false, true) => ProblemKind::Mcpk,
        (false, false) => ProblemKind::Mcpc,
    };
    if let Some(declared) = raw.kind {
        if !declared.generalizes(detected) {
            return Err(ModelError::KindMismatch { declared, detected });
        }
    }

    Ok(Instance {
        kind: detected,
        items,
        sets,
        knapsacks,
        clusters,
        sets_of_item,
        canonical_order,
    })
}

impl Instance {
    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn sets(&self) -> &[CoverSet] {
        &self.sets
    }

    pub fn knapsacks(&self) -> &[Knapsack] {
        &self.knapsacks
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn num_knapsacks(&self) -> usize {
        self.knapsacks.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn cost(&self, set: usize) -> &Rational {
        &self.sets[set].cost
    }

    pub fn capacity(&self, knapsack: usize) -> &Rational {
        &self.knapsacks[knapsack].capacity
    }

    pub fn cluster_of(&self, knapsack: usize) -> usize {
        self.knapsacks[knapsack].cluster
    }

    pub fn sets_containing(&self, item: usize) -> &[usize] {
        &self.sets_of_item[item]
    }

    pub fn canonical_order(&self) -> &[usize] {
        &self.canonical_order
    }

    /// Whether set `j` may be placed in knapsack `k` at all (`c_j <= B_k`).
    pub fn fits(&self, set: usize, knapsack: usize) -> bool {
        self.sets[set].cost <= self.knapsacks[knapsack].capacity
    }

    /// Every set covers exactly one item and no two sets share one.
    pub fn is_singleton(&self) -> bool {
        matches!(self.kind, ProblemKind::Mkp | ProblemKind::Mkpc)
    }

    /// Profit collected by set `j` alone; for singleton instances this is
    /// the profit of "item j".
    pub fn set_profit(&self, set: usize) -> Rational {
        self.sets[set].items.iter().map(|&i| &self.items[i].profit).sum()
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            kind: Some(self.kind),
            items: self.items.iter().map(|i| (i.id, i.profit.clone())).collect(),
            sets: self.sets.iter().map(|s| (s.id, s.cost.clone(), s.items.clone())).collect(),
            knapsacks: self
                .knapsacks
                .iter()
                .map(|k| (k.id, k.capacity.clone(), k.cluster))
                .collect(),
            clusters: self.clusters.iter().map(|c| (c.id, c.capacity.clone())).collect(),
        }
    }
}

/// Integral solution: for every set, the knapsack it is placed in, if any.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    slots: Vec<Option<usize>>,
}

impl Assignment {
    pub fn unassigned(num_sets: usize) -> Self {
        Self { slots: vec![None; num_sets] }
    }

    pub fn from_slots(slots: Vec<Option<usize>>) -> Self {
        Self { slots }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn get(&self, set: usize) -> Option<usize> {
        self.slots[set]
    }

    pub fn assign(&mut self, set: usize, knapsack: usize) {
        self.slots[set] = Some(knapsack);
    }

    pub fn unassign(&mut self, set: usize) {
        self.slots[set] = None;
    }

    pub fn slots(&self) -> &[Option<usize>] {
        &self.slots
    }

    /// `(set, knapsack)` pairs of assigned sets, by ascending set id.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.slots.iter().enumerate().filter_map(|(j, k)| k.map(|k| (j, k)))
    }

    pub fn assigned_count(&self) -> usize {
        self.slots.iter().flatten().count()
    }
}

fn check_ids(inst: &Instance, a: &Assignment) -> Result<(), ModelError> {
    if a.len() != inst.num_sets() {
        return Err(ModelError::AssignmentLength { expected: inst.num_sets(), got: a.len() });
    }
    if let Some((set, knapsack)) = a.pairs().find(|&(_, k)| k >= inst.num_knapsacks()) {
        return Err(ModelError::UnknownKnapsack { set, knapsack });
    }
    Ok(())
}

/// Total profit of the distinct items covered by the assigned sets.
/// Feasibility is not checked here; see [`check_feasible`].
pub fn evaluate_assignment(inst: &Instance, a: &Assignment) -> Result<Rational, ModelError> {
    check_ids(inst, a)?;
    let mut covered = vec![false; inst.num_items()];
    for (j, _) in a.pairs() {
        for &i in &inst.sets[j].items {
            covered[i] = true;
        }
    }
    Ok(covered
        .iter()
        .zip(&inst.items)
        .filter(|(c, _)| **c)
        .map(|(_, item)| &item.profit)
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `c_j > B_k` for a set placed in knapsack `k`.
    Oversized { set: usize, knapsack: usize },
    KnapsackOverload { knapsack: usize, load: Rational, capacity: Rational },
    ClusterOverload { cluster: usize, load: Rational, capacity: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Oversized { set, knapsack } => {
                write!(f, "set {set} is larger than knapsack {knapsack}")
            }
            Violation::KnapsackOverload { knapsack, load, capacity } => {
                write!(f, "knapsack {knapsack} holds {load} > {capacity}")
            }
            Violation::ClusterOverload { cluster, load, capacity } => {
                write!(f, "cluster {cluster} holds {load} > {capacity}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_feasible(inst: &Instance, a: &Assignment) -> Result<FeasibilityReport, ModelError> {
    check_ids(inst, a)?;
    let mut report = FeasibilityReport::default();
    let mut knap_load = vec![Rational::zero(); inst.num_knapsacks()];
    let mut cluster_load = vec![Rational::zero(); inst.num_clusters()];
    for (j, k) in a.pairs() {
        let cost = inst.cost(j);
        if !inst.fits(j, k) {
            report.violations.push(Violation::Oversized { set: j, knapsack: k });
        }
        knap_load[k] += cost;
        cluster_load[inst.cluster_of(k)] += cost;
    }
    for (k, load) in knap_load.into_iter().enumerate() {
        if &load > inst.capacity(k) {
            report.violations.push(Violation::KnapsackOverload {
                knapsack: k,
                load,
                capacity: inst.capacity(k).clone(),
            });
        }
    }
    for (l, load) in cluster_load.into_iter().enumerate() {
        if load > inst.clusters[l].capacity {
            report.violations.push(Violation::ClusterOverload {
                cluster: l,
                load,
                capacity: inst.clusters[l].capacity.clone(),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::int;

    pub(crate) fn raw(
        items: &[i64],
        sets: &[(i64, &[usize])],
        knapsacks: &[(i64, usize)],
        clusters: &[i64],
    ) -> RawInstance {
        RawInstance {
            kind: None,
            items: items.iter().enumerate().map(|(i, &p)| (i, int(p))).collect(),
            sets: sets.iter().enumerate().map(|(j, (c, m))| (j, int(*c), m.to_vec())).collect(),
            knapsacks: knapsacks.iter().enumerate().map(|(k, &(b, l))| (k, int(b), l)).collect(),
            clusters: clusters.iter().enumerate().map(|(l, &u)| (l, int(u))).collect(),
        }
    }

    fn e1() -> Instance {
        validate_and_normalize(raw(&[4, 2], &[(2, &[0]), (2, &[1])], &[(2, 0), (2, 0)], &[3]))
            .unwrap()
    }

    #[test]
    fn clamps_knapsacks_to_cluster_capacity() {
        let inst = validate_and_normalize(raw(&[1], &[(1, &[0])], &[(9, 0), (4, 0)], &[7])).unwrap();
        assert_eq!(inst.capacity(0), &int(7));
        assert_eq!(inst.capacity(1), &int(4));
        assert!(!inst.clusters()[0].redundant);
    }

    #[test]
    fn flags_redundant_clusters() {
        let inst =
            validate_and_normalize(raw(&[1], &[(1, &[0])], &[(5, 0), (4, 0)], &[10])).unwrap();
        assert!(inst.clusters()[0].redundant);
        assert_eq!(inst.kind(), ProblemKind::Mkp);
    }

    #[test]
    fn single_knapsack_clamped_to_cluster_is_redundant() {
        let inst = validate_and_normalize(raw(&[1], &[(1, &[0])], &[(8, 0)], &[7])).unwrap();
        assert_eq!(inst.capacity(0), &int(7));
        assert!(inst.clusters()[0].redundant);
    }

    #[test]
    fn detects_kinds() {
        assert_eq!(e1().kind(), ProblemKind::Mkpc);
        let mcpc =
            validate_and_normalize(raw(&[1, 1], &[(1, &[0, 1])], &[(2, 0), (2, 0)], &[3])).unwrap();
        assert_eq!(mcpc.kind(), ProblemKind::Mcpc);
        let mcpk =
            validate_and_normalize(raw(&[1, 1], &[(1, &[0, 1])], &[(2, 0), (2, 0)], &[4])).unwrap();
        assert_eq!(mcpk.kind(), ProblemKind::Mcpk);
        let shared =
            validate_and_normalize(raw(&[1], &[(1, &[0]), (1, &[0])], &[(2, 0)], &[2])).unwrap();
        assert_eq!(shared.kind(), ProblemKind::Mcpk);
    }

    #[test]
    fn declared_kind_must_admit_structure() {
        let mut r = raw(&[1, 1], &[(1, &[0, 1])], &[(2, 0), (2, 0)], &[3]);
        r.kind = Some(ProblemKind::Mkpc);
        assert!(matches!(
            validate_and_normalize(r.clone()),
            Err(ModelError::KindMismatch { .. })
        ));
        r.kind = Some(ProblemKind::Mcpc);
        assert!(validate_and_normalize(r).is_ok());
    }

    #[test]
    fn validation_errors_name_the_entity() {
        let mut r = raw(&[1], &[(1, &[0])], &[(2, 0)], &[3]);
        r.items.push((0, int(2)));
        assert_eq!(
            validate_and_normalize(r),
            Err(ModelError::DuplicateId { entity: "item", id: 0 })
        );
        let r = raw(&[1], &[(1, &[3])], &[(2, 0)], &[3]);
        assert_eq!(validate_and_normalize(r), Err(ModelError::UnknownItem { set: 0, item: 3 }));
        let r = raw(&[1], &[(1, &[0])], &[], &[3]);
        assert_eq!(validate_and_normalize(r), Err(ModelError::NoKnapsacks));
        let r = raw(&[0], &[(1, &[0])], &[(2, 0)], &[3]);
        assert!(matches!(
            validate_and_normalize(r),
            Err(ModelError::NonPositive { entity: "item", .. })
        ));
        let r = raw(&[1], &[(1, &[0])], &[(2, 5)], &[3]);
        assert_eq!(
            validate_and_normalize(r),
            Err(ModelError::UnknownCluster { knapsack: 0, cluster: 5 })
        );
    }

    #[test]
    fn renormalizing_is_idempotent() {
        let inst = validate_and_normalize(raw(
            &[1, 2],
            &[(1, &[0, 1]), (3, &[1])],
            &[(9, 0), (4, 0), (2, 1)],
            &[7, 5],
        ))
        .unwrap();
        assert_eq!(validate_and_normalize(inst.to_raw()).unwrap(), inst);
    }

    #[test]
    fn canonical_order_breaks_ties_by_id() {
        let inst =
            validate_and_normalize(raw(&[1], &[(1, &[0])], &[(2, 0), (5, 0), (2, 0)], &[6]))
                .unwrap();
        assert_eq!(inst.clusters()[0].knapsacks, vec![1, 0, 2]);
        assert_eq!(inst.canonical_order(), &[1, 0, 2]);
    }

    #[test]
    fn evaluation_counts_items_once() {
        let inst = e1();
        assert_eq!(evaluate_assignment(&inst, &Assignment::unassigned(2)).unwrap(), int(0));
        let a = Assignment::from_slots(vec![None, Some(1)]);
        assert_eq!(evaluate_assignment(&inst, &a).unwrap(), int(2));
        let a = Assignment::from_slots(vec![Some(1), None]);
        assert_eq!(evaluate_assignment(&inst, &a).unwrap(), int(4));

        let shared =
            validate_and_normalize(raw(&[5], &[(1, &[0]), (1, &[0])], &[(2, 0)], &[2])).unwrap();
        let both = Assignment::from_slots(vec![Some(0), Some(0)]);
        assert_eq!(evaluate_assignment(&shared, &both).unwrap(), int(5));
    }

    #[test]
    fn feasibility_reports_each_violation() {
        let inst = e1();
        assert!(check_feasible(&inst, &Assignment::unassigned(2)).unwrap().is_feasible());
        let a = Assignment::from_slots(vec![Some(0), Some(1)]);
        let report = check_feasible(&inst, &a).unwrap();
        assert_eq!(
            report.violations,
            vec![Violation::ClusterOverload { cluster: 0, load: int(4), capacity: int(3) }]
        );
        let a = Assignment::from_slots(vec![Some(0), Some(0)]);
        let report = check_feasible(&inst, &a).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::KnapsackOverload { knapsack: 0, .. })));
    }

    #[test]
    fn oversized_placement_is_reported() {
        let inst =
            validate_and_normalize(raw(&[1], &[(3, &[0])], &[(2, 0), (5, 0)], &[6])).unwrap();
        let a = Assignment::from_slots(vec![Some(0)]);
        let report = check_feasible(&inst, &a).unwrap();
        assert!(report.violations.contains(&Violation::Oversized { set: 0, knapsack: 0 }));
    }

    #[test]
    fn assignment_ids_are_checked() {
        let inst = e1();
        assert!(evaluate_assignment(&inst, &Assignment::unassigned(3)).is_err());
        let a = Assignment::from_slots(vec![Some(7), None]);
        assert_eq!(
            check_feasible(&inst, &a),
            Err(ModelError::UnknownKnapsack { set: 0, knapsack: 7 })
        );
    }
}
