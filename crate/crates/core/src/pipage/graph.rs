use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::{One, Signed};

use super::{evaluate_f, PipageError};
use crate::model::{FractionalSolution, Instance};
use crate::rational::Rational;

/// Support graph vertex. Sets order before knapsacks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Set(usize),
    Knapsack(usize),
}

impl Node {
    fn is_set(self) -> bool {
        matches!(self, Node::Set(_))
    }
}

fn edge(a: Node, b: Node) -> (usize, usize) {
    match (a, b) {
        (Node::Set(j), Node::Knapsack(k)) | (Node::Knapsack(k), Node::Set(j)) => (j, k),
        _ => unreachable!("support graph is bipartite"),
    }
}

/// Bipartite graph whose edges are the strictly fractional entries of `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportGraph {
    adj: BTreeMap<Node, BTreeSet<Node>>,
}

impl SupportGraph {
    pub fn new(x: &FractionalSolution) -> Self {
        let mut adj: BTreeMap<Node, BTreeSet<Node>> = BTreeMap::new();
        for (j, k, v) in x.x_entries() {
            if v.is_positive() && v < &Rational::one() {
                adj.entry(Node::Set(j)).or_default().insert(Node::Knapsack(k));
                adj.entry(Node::Knapsack(k)).or_default().insert(Node::Set(j));
            }
        }
        Self { adj }
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Edges as `(set, knapsack)` in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .adj
            .iter()
            .filter(|(n, _)| n.is_set())
            .flat_map(|(&a, nbrs)| nbrs.iter().map(move |&b| edge(a, b)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn s_nodes(&self) -> Vec<usize> {
        self.adj.keys().filter_map(|n| if let Node::Set(j) = n { Some(*j) } else { None }).collect()
    }

    pub fn k_nodes(&self) -> Vec<usize> {
        self.adj
            .keys()
            .filter_map(|n| if let Node::Knapsack(k) = n { Some(*k) } else { None })
            .collect()
    }

    pub fn neighbors(&self, n: Node) -> impl Iterator<Item = Node> + '_ {
        self.adj.get(&n).into_iter().flatten().copied()
    }

    pub fn degree(&self, n: Node) -> usize {
        self.adj.get(&n).map_or(0, BTreeSet::len)
    }

    /// Connected components, each sorted, ordered by their lowest node.
    pub fn components(&self) -> Vec<Vec<Node>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.adj.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbors(u) {
                    if seen.insert(v) {
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// First cycle met by a depth-first search started at the lowest node
    /// of each component, as a closed node sequence `u_1 .. u_t` (the edge
    /// `u_t u_1` closes it).
    pub fn find_cycle(&self) -> Option<Vec<Node>> {
        let mut seen = BTreeSet::new();
        for &start in self.adj.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut stack = Vec::new();
            if let Some(c) = self.dfs_cycle(start, None, &mut seen, &mut stack) {
                return Some(c);
            }
        }
        None
    }

    fn dfs_cycle(
        &self,
        u: Node,
        parent: Option<Node>,
        seen: &mut BTreeSet<Node>,
        stack: &mut Vec<Node>,
    ) -> Option<Vec<Node>> {
        seen.insert(u);
        stack.push(u);
        for v in self.neighbors(u) {
            if Some(v) == parent {
                continue;
            }
            if seen.contains(&v) {
                if let Some(pos) = stack.iter().position(|&w| w == v) {
                    return Some(stack[pos..].to_vec());
                }
                continue;
            }
            if let Some(c) = self.dfs_cycle(v, Some(u), seen, stack) {
                return Some(c);
            }
        }
        stack.pop();
        None
    }

    /// Unique path between two nodes of the same tree.
    fn tree_path(&self, from: Node, to: Node) -> Vec<Node> {
        let mut parent = BTreeMap::new();
        parent.insert(from, from);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for v in self.neighbors(u) {
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(v) {
                    e.insert(u);
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[&cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    fn s_leaves(&self, comp: &[Node]) -> Vec<Node> {
        comp.iter().copied().filter(|&n| n.is_set() && self.degree(n) == 1).collect()
    }
}

/// Maximal path whose two end nodes are degree-one sets: in the first
/// component that has two or more such leaves, the path between its two
/// lowest ones.
pub fn find_ss_path(g: &SupportGraph) -> Option<Vec<Node>> {
    g.components().into_iter().find_map(|comp| {
        let leaves = g.s_leaves(&comp);
        (leaves.len() >= 2).then(|| g.tree_path(leaves[0], leaves[1]))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shift {
    /// Cycle step; `eps` is in cost units, so entry `x_jk` moves by `eps / c_j`.
    Cycle { eps: Rational },
    /// Path step over the interval `[-eps1, eps2]`; `f_minus` and `f_plus`
    /// are `F` at the two ends.
    Path { eps1: Rational, eps2: Rational, f_minus: Rational, f_plus: Rational, took_plus: bool },
}

/// One cycle or path step. Entries of `m1` move up by the shift, entries of
/// `m2` move down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathAdjustment {
    pub nodes: Vec<Node>,
    pub m1: Vec<(usize, usize)>,
    pub m2: Vec<(usize, usize)>,
    pub shift: Shift,
}

/// Splits the consecutive edges of `nodes` alternately, starting with the
/// first edge in `m1`. With `closed` the edge back to the start is included.
type EdgeList = Vec<(usize, usize)>;

fn alternate(nodes: &[Node], closed: bool) -> (EdgeList, EdgeList) {
    let n = nodes.len();
    let count = if closed { n } else { n - 1 };
    let (mut m1, mut m2) = (Vec::new(), Vec::new());
    for i in 0..count {
        let e = edge(nodes[i], nodes[(i + 1) % n]);
        if i % 2 == 0 {
            m1.push(e);
        } else {
            m2.push(e);
        }
    }
    (m1, m2)
}

/// `min` over `m1` of `c_j (1 - x)` and over `m2` of `c_j x`: the largest
/// upward shift.
fn room_up(
    inst: &Instance,
    x: &FractionalSolution,
    m1: &[(usize, usize)],
    m2: &[(usize, usize)],
) -> Rational {
    let ups = m1.iter().map(|&(j, k)| inst.cost(j) * (Rational::one() - x.x(j, k)));
    let downs = m2.iter().map(|&(j, k)| inst.cost(j) * x.x(j, k));
    ups.chain(downs).min().expect("paths and cycles have edges")
}

fn shifted(
    inst: &Instance,
    x: &FractionalSolution,
    m1: &[(usize, usize)],
    m2: &[(usize, usize)],
    eps: &Rational,
) -> FractionalSolution {
    let mut out = x.clone();
    for &(j, k) in m1 {
        out.add_x(j, k, &(eps / inst.cost(j)));
    }
    for &(j, k) in m2 {
        out.add_x(j, k, &(-(eps / inst.cost(j))));
    }
    out
}

/// Removes every cycle of the support graph without changing `L` or any
/// knapsack load.
pub fn eliminate_cycles(inst: &Instance, x: &FractionalSolution) -> FractionalSolution {
    eliminate_cycles_traced(inst, x).0
}

pub fn eliminate_cycles_traced(
    inst: &Instance,
    x: &FractionalSolution,
) -> (FractionalSolution, Vec<PathAdjustment>) {
    let mut cur = x.clone();
    let mut steps = Vec::new();
    while let Some(nodes) = SupportGraph::new(&cur).find_cycle() {
        let (m1, m2) = alternate(&nodes, true);
        let eps = room_up(inst, &cur, &m1, &m2);
        debug_assert!(eps.is_positive());
        cur = shifted(inst, &cur, &m1, &m2, &eps);
        steps.push(PathAdjustment { nodes, m1, m2, shift: Shift::Cycle { eps } });
    }
    (cur, steps)
}

/// Removes every S-S path of an acyclic support graph. Each step moves mass
/// along one path to whichever end of the feasible interval has the larger
/// `F` (the upper end on ties), so `F` never decreases.
pub fn eliminate_ss_paths(
    inst: &Instance,
    x: &FractionalSolution,
) -> (FractionalSolution, Vec<PathAdjustment>) {
    let mut cur = x.clone();
    let mut steps = Vec::new();
    while let Some(nodes) = find_ss_path(&SupportGraph::new(&cur)) {
        let (m1, m2) = alternate(&nodes, false);
        let eps1 = room_up(inst, &cur, &m2, &m1);
        let eps2 = room_up(inst, &cur, &m1, &m2);
        let minus = shifted(inst, &cur, &m1, &m2, &-eps1.clone());
        let plus = shifted(inst, &cur, &m1, &m2, &eps2);
        let f_minus = evaluate_f(inst, &minus);
        let f_plus = evaluate_f(inst, &plus);
        let took_plus = f_plus >= f_minus;
        cur = if took_plus { plus } else { minus };
        steps.push(PathAdjustment {
            nodes,
            m1,
            m2,
            shift: Shift::Path { eps1, eps2, f_minus, f_plus, took_plus },
        });
    }
    (cur, steps)
}

/// A set of `(set, knapsack)` edges without shared endpoints.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, set: usize, knapsack: usize) -> bool {
        self.pairs.binary_search(&(set, knapsack)).is_ok()
    }

    /// Edges of `g`, pairwise disjoint, and covering every set node of `g`.
    pub fn saturates(&self, g: &SupportGraph) -> bool {
        let edges: BTreeSet<_> = g.edges().into_iter().collect();
        let sets: BTreeSet<usize> = self.pairs.iter().map(|p| p.0).collect();
        let knaps: BTreeSet<usize> = self.pairs.iter().map(|p| p.1).collect();
        sets.len() == self.pairs.len()
            && knaps.len() == self.pairs.len()
            && self.pairs.iter().all(|p| edges.contains(p))
            && g.s_nodes().into_iter().collect::<BTreeSet<_>>() == sets
    }
}

/// Matching that covers every set node, built tree by tree: root at the
/// lowest knapsack; sets on the path from the (at most one) set leaf to the
/// root take their parent, all other sets take their lowest child.
pub fn saturating_matching(g: &SupportGraph) -> Result<Matching, PipageError> {
    let mut pairs = Vec::new();
    for comp in g.components() {
        let edge_count: usize = comp.iter().map(|&n| g.degree(n)).sum::<usize>() / 2;
        if edge_count + 1 != comp.len() {
            let j = comp.iter().find_map(|n| if let Node::Set(j) = n { Some(*j) } else { None });
            return Err(PipageError::Cycle(j.expect("a cycle contains sets")));
        }
        let leaves = g.s_leaves(&comp);
        if leaves.len() >= 2 {
            let id = |n: Node| if let Node::Set(j) = n { j } else { unreachable!() };
            return Err(PipageError::SsPath(id(leaves[0]), id(leaves[1])));
        }
        let root = *comp.iter().find(|n| !n.is_set()).expect("every edge has a knapsack end");
        let mut parent: BTreeMap<Node, Node> = BTreeMap::new();
        let mut children: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
        let mut queue = VecDeque::from([root]);
        let mut seen = BTreeSet::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in g.neighbors(u) {
                if seen.insert(v) {
                    parent.insert(v, u);
                    children.entry(u).or_default().push(v);
                    queue.push_back(v);
                }
            }
        }
        let mut to_parent = BTreeSet::new();
        if let Some(&leaf) = leaves.first() {
            let mut cur = leaf;
            while cur != root {
                if cur.is_set() {
                    to_parent.insert(cur);
                }
                cur = parent[&cur];
            }
        }
        for &n in comp.iter().filter(|n| n.is_set()) {
            let partner = if to_parent.contains(&n) {
                parent[&n]
            } else {
                *children[&n].iter().min().expect("non-leaf sets below the root have children")
            };
            pairs.push(edge(n, partner));
        }
    }
    pairs.sort_unstable();
    Ok(Matching { pairs })
}
