use num::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use mcpc_core::model::{FractionalSolution, Instance};
use mcpc_core::rational::{ratio, Rational};

/// A random point of the relaxation's packing polytope: per-set totals at
/// most one, loads within knapsack and cluster capacities.
pub fn random_fractional(inst: &Instance, rng: &mut ChaCha8Rng) -> FractionalSolution {
    let mut x = FractionalSolution::new();
    for j in 0..inst.num_sets() {
        let hosts: Vec<usize> = (0..inst.num_knapsacks()).filter(|&k| inst.fits(j, k)).collect();
        if hosts.is_empty() {
            continue;
        }
        let weights: Vec<i64> = hosts.iter().map(|_| rng.gen_range(0..=4)).collect();
        let sum: i64 = weights.iter().sum();
        if sum == 0 {
            continue;
        }
        let total = ratio(rng.gen_range(0..=12), 12);
        for (&k, &w) in hosts.iter().zip(&weights) {
            if w > 0 {
                x.set_x(j, k, &total * ratio(w, sum));
            }
        }
    }
    let scale_knapsack: Vec<Rational> = (0..inst.num_knapsacks())
        .map(|k| {
            let load = x.load(inst, k);
            if &load > inst.capacity(k) {
                inst.capacity(k) / load
            } else {
                Rational::one()
            }
        })
        .collect();
    let mut scaled = FractionalSolution::new();
    for (j, k, v) in x.x_entries() {
        scaled.set_x(j, k, v * &scale_knapsack[k]);
    }
    let mut scale_cluster = vec![Rational::one(); inst.num_clusters()];
    for (l, cl) in inst.clusters().iter().enumerate() {
        let load: Rational = cl.knapsacks.iter().map(|&k| scaled.load(inst, k)).sum();
        if load > cl.capacity {
            scale_cluster[l] = &cl.capacity / load;
        }
    }
    let mut out = FractionalSolution::new();
    for (j, k, v) in scaled.x_entries() {
        out.set_x(j, k, v * &scale_cluster[inst.cluster_of(k)]);
    }
    out
}
