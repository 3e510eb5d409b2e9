use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{validate_and_normalize, Instance, ModelError, ProblemKind, RawInstance};
use crate::rational::{int, ratio, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub kind: ProblemKind,
    /// Items.
    pub n: usize,
    /// Cover-sets; must not exceed `n` for the knapsack kinds.
    pub m: usize,
    /// Knapsacks.
    pub p: usize,
    /// Clusters, at most `p`.
    pub q: usize,
    pub seed: u64,
    /// Inclusive integer range for set costs.
    pub cost_range: (u32, u32),
    /// Inclusive integer range for item profits.
    pub profit_range: (u32, u32),
    /// In `(0, 1]`; smaller values pull cluster capacities towards the
    /// largest knapsack in the cluster.
    pub tightness: f64,
    /// Emit clusters whose capacity bands are strictly ordered.
    pub disentangled: bool,
    /// Largest number of items in a cover-set (coverage kinds only).
    pub max_set_size: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            kind: ProblemKind::Mcpc,
            n: 6,
            m: 5,
            p: 4,
            q: 2,
            seed: 0,
            cost_range: (1, 6),
            profit_range: (1, 10),
            tightness: 1.0,
            disentangled: false,
            max_set_size: 3,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("dimensions must be positive (n={n}, m={m}, p={p}, q={q})")]
    ZeroDimension { n: usize, m: usize, p: usize, q: usize },
    #[error("cannot spread {p} knapsacks over {q} non-empty clusters")]
    TooManyClusters { p: usize, q: usize },
    #[error("{kind} needs one distinct item per set, but m={m} > n={n}")]
    NotEnoughItems { kind: ProblemKind, m: usize, n: usize },
    #[error("invalid {name} range {lo}..={hi}")]
    BadRange { name: &'static str, lo: u32, hi: u32 },
    #[error("tightness must lie in (0, 1], got {0}")]
    BadTightness(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Draws a random instance. The same parameters always give the same
/// instance.
pub fn generate_instance(params: &GeneratorParams) -> Result<Instance, GenerateError> {
    let GeneratorParams { kind, n, m, p, q, .. } = *params;
    if n == 0 || m == 0 || p == 0 || q == 0 {
        return Err(GenerateError::ZeroDimension { n, m, p, q });
    }
    if q > p {
        return Err(GenerateError::TooManyClusters { p, q });
    }
    let singleton = matches!(kind, ProblemKind::Mkp | ProblemKind::Mkpc);
    if singleton && m > n {
        return Err(GenerateError::NotEnoughItems { kind, m, n });
    }
    for (name, (lo, hi)) in [("cost", params.cost_range), ("profit", params.profit_range)] {
        if lo == 0 || lo > hi {
            return Err(GenerateError::BadRange { name, lo, hi });
        }
    }
    if !(params.tightness > 0.0 && params.tightness <= 1.0) {
        return Err(GenerateError::BadTightness(params.tightness));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (cost_lo, cost_hi) = params.cost_range;
    let (profit_lo, profit_hi) = params.profit_range;

    let items: Vec<(usize, Rational)> =
        (0..n).map(|i| (i, int(rng.gen_range(profit_lo..=profit_hi) as i64))).collect();

    let mut pool: Vec<usize> = (0..n).collect();
    let mut sets = Vec::with_capacity(m);
    for j in 0..m {
        let cost = int(rng.gen_range(cost_lo..=cost_hi) as i64);
        let members = if singleton {
            vec![j]
        } else {
            let size = rng.gen_range(1..=params.max_set_size.clamp(1, n));
            pool.shuffle(&mut rng);
            pool[..size].to_vec()
        };
        sets.push((j, cost, members));
    }
    let min_cost = sets.iter().map(|s| s.1.clone()).min().expect("m > 0");
    let min_cost = min_cost.to_integer().try_into().unwrap_or(cost_lo as i64);

    // Every knapsack can hold at least the cheapest set.
    let cap_lo = min_cost;
    let cap_hi = (2 * cost_hi as i64).max(cap_lo);
    let (capacities, cluster_of) = if params.disentangled {
        disentangled_layout(&mut rng, p, q, cap_lo, cap_hi)
    } else {
        let caps: Vec<i64> = (0..p).map(|_| rng.gen_range(cap_lo..=cap_hi)).collect();
        let mut cluster_of: Vec<usize> = (0..p).map(|k| if k < q { k } else { rng.gen_range(0..q) }).collect();
        cluster_of.shuffle(&mut rng);
        (caps, cluster_of)
    };

    let binding = matches!(kind, ProblemKind::Mcpc | ProblemKind::Mkpc);
    let mut clusters = Vec::with_capacity(q);
    for l in 0..q {
        let members: Vec<i64> =
            (0..p).filter(|&k| cluster_of[k] == l).map(|k| capacities[k]).collect();
        let largest = *members.iter().max().expect("every cluster is non-empty");
        let total: i64 = members.iter().sum();
        let capacity = if !binding {
            int(total)
        } else {
            match total - largest {
                0 => int(largest),
                1 => int(largest) + ratio(1, 2),
                span => {
                    let reach = ((span - 2) as f64 * params.tightness).floor() as i64;
                    int(largest + 1 + rng.gen_range(0..=reach.max(0)))
                }
            }
        };
        clusters.push((l, capacity));
    }

    let raw = RawInstance {
        kind: None,
        items,
        sets,
        knapsacks: (0..p).map(|k| (k, int(capacities[k]), cluster_of[k])).collect(),
        clusters,
    };
    Ok(validate_and_normalize(raw)?)
}

/// Distinct capacities, sorted high to low and cut into `q` contiguous
/// blocks, so cluster `l` lies strictly above cluster `l + 1`.
fn disentangled_layout(
    rng: &mut ChaCha8Rng,
    p: usize,
    q: usize,
    lo: i64,
    hi: i64,
) -> (Vec<i64>, Vec<usize>) {
    let hi = hi.max(lo + p as i64 - 1);
    let mut values: Vec<i64> = (lo..=hi).collect();
    values.shuffle(rng);
    values.truncate(p);
    values.sort_unstable_by(|a, b| b.cmp(a));

    // q - 1 distinct cut points in 1..p
    let mut cuts: Vec<usize> = (1..p).collect();
    cuts.shuffle(rng);
    cuts.truncate(q - 1);
    cuts.sort_unstable();
    let mut cluster_of = Vec::with_capacity(p);
    let mut l = 0;
    for k in 0..p {
        if l < cuts.len() && k == cuts[l] {
            l += 1;
        }
        cluster_of.push(l);
    }
    (values, cluster_of)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let params = GeneratorParams { seed: 42, ..Default::default() };
        assert_eq!(generate_instance(&params).unwrap(), generate_instance(&params).unwrap());
        let other = GeneratorParams { seed: 43, ..Default::default() };
        assert_ne!(generate_instance(&params).unwrap(), generate_instance(&other).unwrap());
    }

    #[test]
    fn knapsack_kinds_emit_singletons() {
        let params =
            GeneratorParams { kind: ProblemKind::Mkpc, n: 5, m: 5, seed: 7, ..Default::default() };
        let inst = generate_instance(&params).unwrap();
        assert_eq!(inst.num_sets(), 5);
        for (j, s) in inst.sets().iter().enumerate() {
            assert_eq!(s.items, vec![j]);
        }
        assert!(inst.is_singleton());
    }

    #[test]
    fn disentangled_bands_are_strictly_ordered() {
        for seed in 0..50 {
            let params = GeneratorParams {
                kind: ProblemKind::Mkpc,
                n: 6,
                m: 6,
                p: 4,
                q: 3,
                seed,
                disentangled: true,
                ..Default::default()
            };
            let inst = generate_instance(&params).unwrap();
            for l in 0..inst.num_clusters() - 1 {
                let min_here = inst.clusters()[l].knapsacks.iter().map(|&k| inst.capacity(k)).min();
                let max_next =
                    inst.clusters()[l + 1].knapsacks.iter().map(|&k| inst.capacity(k)).max();
                assert!(min_here > max_next, "seed {seed}: cluster {l} overlaps {}", l + 1);
            }
        }
    }

    #[test]
    fn capacities_hold_a_set_and_clusters_bind() {
        for seed in 0..50 {
            let params = GeneratorParams { seed, ..Default::default() };
            let inst = generate_instance(&params).unwrap();
            let cheapest = inst.sets().iter().map(|s| &s.cost).min().unwrap();
            for k in inst.knapsacks() {
                assert!(&k.capacity >= cheapest);
            }
            for c in inst.clusters() {
                let caps: Vec<_> = c.knapsacks.iter().map(|&k| inst.capacity(k)).collect();
                assert!(caps.iter().all(|&b| b <= &c.capacity));
                if caps.len() > 1 {
                    assert!(!c.redundant, "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn coverage_kinds_without_clusters_are_redundant() {
        let params = GeneratorParams { kind: ProblemKind::Mcpk, seed: 3, ..Default::default() };
        let inst = generate_instance(&params).unwrap();
        assert!(inst.clusters().iter().all(|c| c.redundant));
    }

    #[test]
    fn impossible_parameters_are_rejected() {
        let bad = GeneratorParams { q: 5, p: 4, ..Default::default() };
        assert_eq!(generate_instance(&bad), Err(GenerateError::TooManyClusters { p: 4, q: 5 }));
        let bad = GeneratorParams { kind: ProblemKind::Mkp, n: 3, m: 4, ..Default::default() };
        assert!(matches!(generate_instance(&bad), Err(GenerateError::NotEnoughItems { .. })));
        let bad = GeneratorParams { n: 0, ..Default::default() };
        assert!(matches!(generate_instance(&bad), Err(GenerateError::ZeroDimension { .. })));
        let bad = GeneratorParams { cost_range: (0, 3), ..Default::default() };
        assert!(matches!(generate_instance(&bad), Err(GenerateError::BadRange { .. })));
    }
}
