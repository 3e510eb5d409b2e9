use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use super::Instance;
use crate::rational::Rational;

/// A point of a relaxation: `x[(j, k)]` is the fraction of set `j` placed in
/// knapsack `k`, `z[(k, l)]` the share of cluster `l`'s capacity given to
/// knapsack `k`. Only non-zero entries are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FractionalSolution {
    x: BTreeMap<(usize, usize), Rational>,
    z: BTreeMap<(usize, usize), Rational>,
}

impl FractionalSolution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn x(&self, set: usize, knapsack: usize) -> Rational {
        self.x.get(&(set, knapsack)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set_x(&mut self, set: usize, knapsack: usize, value: Rational) {
        if value.is_zero() {
            self.x.remove(&(set, knapsack));
        } else {
            self.x.insert((set, knapsack), value);
        }
    }

    pub fn add_x(&mut self, set: usize, knapsack: usize, delta: &Rational) {
        let v = self.x(set, knapsack) + delta;
        self.set_x(set, knapsack, v);
    }

    pub fn z(&self, knapsack: usize, cluster: usize) -> Rational {
        self.z.get(&(knapsack, cluster)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set_z(&mut self, knapsack: usize, cluster: usize, value: Rational) {
        if value.is_zero() {
            self.z.remove(&(knapsack, cluster));
        } else {
            self.z.insert((knapsack, cluster), value);
        }
    }

    /// Non-zero `x` entries in `(set, knapsack)` order.
    pub fn x_entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.x.iter().map(|(&(j, k), v)| (j, k, v))
    }

    pub fn z_entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.z.iter().map(|(&(k, l), v)| (k, l, v))
    }

    /// Total fraction of set `j` placed anywhere.
    pub fn set_total(&self, set: usize) -> Rational {
        self.x.range((set, 0)..=(set, usize::MAX)).map(|(_, v)| v).sum()
    }

    /// Total cost placed in knapsack `k`.
    pub fn load(&self, inst: &Instance, knapsack: usize) -> Rational {
        self.x
            .iter()
            .filter(|((_, k), _)| *k == knapsack)
            .map(|((j, _), v)| inst.cost(*j) * v)
            .sum()
    }

    /// Optimal coverage variables for this `x`: `min{1, sum over sets
    /// containing i of their placed fraction}`.
    pub fn implied_y(&self, inst: &Instance) -> Vec<Rational> {
        let totals: Vec<Rational> = (0..inst.num_sets()).map(|j| self.set_total(j)).collect();
        (0..inst.num_items())
            .map(|i| {
                let s: Rational = inst.sets_containing(i).iter().map(|&j| &totals[j]).sum();
                if s > Rational::one() {
                    Rational::one()
                } else {
                    s
                }
            })
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.x.values().all(|v| v.is_integer())
    }

    /// Checks the packing constraints against the given per-knapsack
    /// capacities: `0 <= x <= 1`, `x` only where `c_j <= B_k`, each set
    /// placed at most once, and every knapsack load within its capacity.
    pub fn check_packing(&self, inst: &Instance, capacities: &[Rational]) -> Result<(), String> {
        for (&(j, k), v) in &self.x {
            if j >= inst.num_sets() || k >= inst.num_knapsacks() {
                return Err(format!("x[{j},{k}] references an unknown set or knapsack"));
            }
            if v.is_negative() || v > &Rational::one() {
                return Err(format!("x[{j},{k}] = {v} outside [0, 1]"));
            }
            if !inst.fits(j, k) {
                return Err(format!("x[{j},{k}] = {v} but set {j} is larger than knapsack {k}"));
            }
        }
        for j in 0..inst.num_sets() {
            let t = self.set_total(j);
            if t > Rational::one() {
                return Err(format!("set {j} placed {t} > 1 times"));
            }
        }
        for (k, cap) in capacities.iter().enumerate() {
            let load = self.load(inst, k);
            if &load > cap {
                return Err(format!("knapsack {k} load {load} exceeds {cap}"));
            }
        }
        Ok(())
    }
}
