use std::collections::BTreeMap;

use num::{One, Zero};

use super::{LinearProgram, LpSolution, Relation};
use crate::model::{FractionalSolution, Instance};
use crate::rational::Rational;

/// The coverage relaxation with per-knapsack capacities, plus the map from
/// its columns back to `(set, knapsack)` pairs and items.
#[derive(Clone, Debug)]
pub struct McpkProgram {
    pub lp: LinearProgram,
    pub x_index: BTreeMap<(usize, usize), usize>,
    pub y_index: Vec<usize>,
}

impl McpkProgram {
    /// Reads the `x` part of an optimal solution. Panics if the solution is
    /// not optimal.
    pub fn fractional_solution(&self, sol: &LpSolution) -> FractionalSolution {
        assert!(sol.is_optimal(), "no values for a {:?} program", sol.status);
        let mut x = FractionalSolution::new();
        for (&(j, k), &v) in &self.x_index {
            x.set_x(j, k, sol.values[v].clone());
        }
        x
    }
}

/// Adds `x[j,k]` for every pair with `c_j <= B_k` (original capacity) and
/// `y[i]` with bound 1, then the coverage, single-placement and coupling
/// rows. Returns the column maps.
fn add_coverage_core(
    lp: &mut LinearProgram,
    inst: &Instance,
) -> (BTreeMap<(usize, usize), usize>, Vec<usize>) {
    let mut x_index = BTreeMap::new();
    for j in 0..inst.num_sets() {
        for k in 0..inst.num_knapsacks() {
            if inst.fits(j, k) {
                let var = lp.add_variable(format!("x_{j}_{k}"), Some(Rational::one()));
                x_index.insert((j, k), var);
            }
        }
    }
    let y_index: Vec<usize> = inst
        .items()
        .iter()
        .map(|item| {
            let var = lp.add_variable(format!("y_{}", item.id), Some(Rational::one()));
            lp.set_objective(var, item.profit.clone());
            var
        })
        .collect();

    for j in 0..inst.num_sets() {
        let row: Vec<(usize, Rational)> = x_index
            .range((j, 0)..=(j, usize::MAX))
            .map(|(_, &v)| (v, Rational::one()))
            .collect();
        if !row.is_empty() {
            lp.add_constraint(format!("once_{j}"), row, Relation::Le, Rational::one())
                .expect("columns were just declared");
        }
    }
    for (i, &y) in y_index.iter().enumerate() {
        // y_i - sum_{j in S(i)} sum_k x_jk <= 0; an item in no usable set
        // still gets the row so y_i is forced to 0
        let mut row = vec![(y, Rational::one())];
        for &j in inst.sets_containing(i) {
            row.extend(x_index.range((j, 0)..=(j, usize::MAX)).map(|(_, &v)| (v, -Rational::one())));
        }
        lp.add_constraint(format!("cover_{i}"), row, Relation::Le, Rational::zero())
            .expect("columns were just declared");
    }
    (x_index, y_index)
}

fn knapsack_row(
    x_index: &BTreeMap<(usize, usize), usize>,
    inst: &Instance,
    k: usize,
) -> Vec<(usize, Rational)> {
    x_index
        .iter()
        .filter(|((_, kk), _)| *kk == k)
        .map(|(&(j, _), &v)| (v, inst.cost(j).clone()))
        .collect()
}

/// Coverage relaxation in which knapsack `k` may hold at most
/// `effective[k]`. Variable domains still follow the original capacities.
pub fn build_mcpk_lp(inst: &Instance, effective: &[Rational]) -> McpkProgram {
    assert_eq!(effective.len(), inst.num_knapsacks(), "one capacity per knapsack");
    let mut lp = LinearProgram::new();
    let (x_index, y_index) = add_coverage_core(&mut lp, inst);
    for (k, cap) in effective.iter().enumerate() {
        let row = knapsack_row(&x_index, inst, k);
        if !row.is_empty() {
            lp.add_constraint(format!("cap_{k}"), row, Relation::Le, cap.clone())
                .expect("columns were just declared");
        }
    }
    McpkProgram { lp, x_index, y_index }
}

/// The relaxation with the capacity shares `z[k,l]` as variables.
#[derive(Clone, Debug)]
pub struct JointProgram {
    pub lp: LinearProgram,
    pub x_index: BTreeMap<(usize, usize), usize>,
    pub y_index: Vec<usize>,
    pub z_index: BTreeMap<(usize, usize), usize>,
}

impl JointProgram {
    pub fn fractional_solution(&self, sol: &LpSolution) -> FractionalSolution {
        assert!(sol.is_optimal(), "no values for a {:?} program", sol.status);
        let mut out = FractionalSolution::new();
        for (&(j, k), &v) in &self.x_index {
            out.set_x(j, k, sol.values[v].clone());
        }
        for (&(k, l), &v) in &self.z_index {
            out.set_z(k, l, sol.values[v].clone());
        }
        out
    }
}

/// Joint `(x, z)` relaxation over every cluster. `fixings` pins individual
/// `x[j,k]` to a value; pinning a pair that has no column to a non-zero
/// value makes the program infeasible.
pub fn build_joint_lp(
    inst: &Instance,
    fixings: &BTreeMap<(usize, usize), Rational>,
) -> JointProgram {
    let mut lp = LinearProgram::new();
    let (x_index, y_index) = add_coverage_core(&mut lp, inst);
    let mut z_index = BTreeMap::new();
    for cluster in inst.clusters() {
        for &k in &cluster.knapsacks {
            let var = lp.add_variable(format!("z_{k}_{}", cluster.id), None);
            z_index.insert((k, cluster.id), var);
        }
    }
    for k in 0..inst.num_knapsacks() {
        let row = knapsack_row(&x_index, inst, k);
        if row.is_empty() {
            continue;
        }
        lp.add_constraint(format!("cap_{k}"), row.clone(), Relation::Le, inst.capacity(k).clone())
            .expect("columns were just declared");
        let l = inst.cluster_of(k);
        let mut share = row;
        share.push((z_index[&(k, l)], -inst.clusters()[l].capacity.clone()));
        lp.add_constraint(format!("share_{k}"), share, Relation::Le, Rational::zero())
            .expect("columns were just declared");
    }
    for cluster in inst.clusters() {
        let row = cluster.knapsacks.iter().map(|&k| (z_index[&(k, cluster.id)], Rational::one())).collect();
        lp.add_constraint(format!("split_{}", cluster.id), row, Relation::Le, Rational::one())
            .expect("columns were just declared");
    }
    for (&(j, k), value) in fixings {
        let row = x_index.get(&(j, k)).map(|&v| vec![(v, Rational::one())]).unwrap_or_default();
        lp.add_constraint(format!("fix_{j}_{k}"), row, Relation::Eq, value.clone())
            .expect("columns were just declared");
    }
    JointProgram { lp, x_index, y_index, z_index }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_lp;
    use crate::model::{tests::raw, validate_and_normalize};
    use crate::rational::int;

    fn e1() -> Instance {
        validate_and_normalize(raw(&[4, 2], &[(2, &[0]), (2, &[1])], &[(2, 0), (2, 0)], &[3]))
            .unwrap()
    }

    #[test]
    fn columns_follow_original_capacity() {
        let inst =
            validate_and_normalize(raw(&[1], &[(5, &[0])], &[(4, 0), (6, 0)], &[10])).unwrap();
        let prog = build_mcpk_lp(&inst, &[int(4), int(6)]);
        assert_eq!(prog.x_index.keys().copied().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(prog.y_index.len(), 1);
    }

    #[test]
    fn e1_reduced_program() {
        let inst = e1();
        let prog = build_mcpk_lp(&inst, &[int(2), int(1)]);
        assert_eq!(prog.x_index.len(), 4);
        assert_eq!(prog.y_index.len(), 2);
        let sol = solve_lp(&prog.lp);
        assert_eq!(sol.objective_value, int(5));
        assert!(prog.lp.is_feasible(&sol.values));
        let x = prog.fractional_solution(&sol);
        x.check_packing(&inst, &[int(2), int(1)]).unwrap();
    }

    #[test]
    fn e1_joint_program_matches() {
        let inst = e1();
        let prog = build_joint_lp(&inst, &BTreeMap::new());
        let sol = solve_lp(&prog.lp);
        assert_eq!(sol.objective_value, int(5));
    }

    #[test]
    fn fixings_constrain_the_joint_program() {
        let inst = e1();
        let mut fix = BTreeMap::new();
        fix.insert((0, 0), int(0));
        fix.insert((0, 1), int(0));
        // only the cheap item remains
        assert_eq!(solve_lp(&build_joint_lp(&inst, &fix).lp).objective_value, int(2));
    }

    #[test]
    fn uncoverable_items_are_pinned_to_zero() {
        // item 1 belongs to no set
        let inst =
            validate_and_normalize(raw(&[3, 7], &[(1, &[0])], &[(2, 0)], &[2])).unwrap();
        let sol = solve_lp(&build_mcpk_lp(&inst, &[int(2)]).lp);
        assert_eq!(sol.objective_value, int(3));
    }
}
