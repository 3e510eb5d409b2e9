//! Two-phase dense tableau simplex over exact rationals with Bland's rule.

use num::{One, Signed, Zero};

use super::{LinearProgram, LpSolution, LpStatus, Relation};
use crate::rational::Rational;

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row in the form `z - sum c_j x_j = value`.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = Rational::one() / &self.rows[pr][pc];
        for v in self.rows[pr].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[pr]);
        let nz: Vec<usize> = (0..=self.cols).filter(|&c| !pivot_row[c].is_zero()).collect();
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r == pr {
                continue;
            }
            eliminate(row, &pivot_row, &nz, pc);
        }
        eliminate(&mut self.obj, &pivot_row, &nz, pc);
        self.rows[pr] = pivot_row;
        self.basis[pr] = pc;
    }

    /// Sets the objective row for maximizing `cost . x` and prices out the
    /// current basis.
    fn load_objective(&mut self, cost: &[Rational]) {
        self.obj = vec![Rational::zero(); self.cols + 1];
        for (c, v) in cost.iter().enumerate() {
            self.obj[c] = -v;
        }
        let nz_rows: Vec<usize> = (0..self.rows.len()).collect();
        for r in nz_rows {
            let b = self.basis[r];
            if self.obj[b].is_zero() {
                continue;
            }
            let row = std::mem::take(&mut self.rows[r]);
            let nz: Vec<usize> = (0..=self.cols).filter(|&c| !row[c].is_zero()).collect();
            eliminate(&mut self.obj, &row, &nz, b);
            self.rows[r] = row;
        }
    }

    /// Runs primal simplex iterations until optimal or unbounded. Columns
    /// with `allowed[c] == false` never enter the basis.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        loop {
            // Bland: lowest-index improving column
            let Some(pc) = (0..self.cols).find(|&c| allowed[c] && self.obj[c].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][pc];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((pr, _)) = best else {
                return false;
            };
            self.pivot(pr, pc);
        }
    }
}

fn eliminate(row: &mut [Rational], pivot_row: &[Rational], nz: &[usize], pc: usize) {
    if row[pc].is_zero() {
        return;
    }
    let factor = row[pc].clone();
    for &c in nz {
        let delta = &factor * &pivot_row[c];
        row[c] -= delta;
    }
}

pub(super) fn solve(lp: &LinearProgram) -> LpSolution {
    let n = lp.num_variables();

    // Gather rows (constraints plus explicit upper-bound rows) with rhs >= 0.
    let mut dense_rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for con in lp.constraints() {
        let mut coeffs = vec![Rational::zero(); n];
        for (v, a) in &con.coeffs {
            coeffs[*v] += a;
        }
        dense_rows.push((coeffs, con.relation, con.rhs.clone()));
    }
    for (v, var) in lp.variables().iter().enumerate() {
        if let Some(ub) = &var.upper {
            let mut coeffs = vec![Rational::zero(); n];
            coeffs[v] = Rational::one();
            dense_rows.push((coeffs, Relation::Le, ub.clone()));
        }
    }
    for (coeffs, rel, rhs) in dense_rows.iter_mut() {
        if rhs.is_negative() {
            for a in coeffs.iter_mut() {
                *a = -a.clone();
            }
            *rhs = -rhs.clone();
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = dense_rows.len();
    let slack_count = dense_rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let art_count = dense_rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + slack_count + art_count;
    let first_art = n + slack_count;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (n, first_art);
    for (coeffs, rel, rhs) in dense_rows {
        let mut row = coeffs;
        row.resize(cols + 1, Rational::zero());
        row[cols] = rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = Rational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }

    let mut t = Tableau { rows, obj: Vec::new(), basis, cols };
    let is_art = |c: usize| c >= first_art;

    if art_count > 0 {
        let phase1: Vec<Rational> =
            (0..cols).map(|c| if is_art(c) { -Rational::one() } else { Rational::zero() }).collect();
        t.load_objective(&phase1);
        let allowed = vec![true; cols];
        t.optimize(&allowed);
        if t.obj[cols].is_negative() {
            return LpSolution::infeasible();
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.rows.len() {
            if is_art(t.basis[r]) {
                if let Some(pc) = (0..first_art).find(|&c| !t.rows[r][c].is_zero()) {
                    t.pivot(r, pc);
                } else {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![Rational::zero(); cols];
    for (v, c) in lp.objective().iter().enumerate() {
        cost[v] = c.clone();
    }
    t.load_objective(&cost);
    let allowed: Vec<bool> = (0..cols).map(|c| !is_art(c)).collect();
    if !t.optimize(&allowed) {
        return LpSolution::unbounded();
    }

    let mut values = vec![Rational::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            values[b] = t.rhs(r).clone();
        }
    }
    let objective_value = lp.objective().iter().zip(&values).map(|(c, x)| c * x).sum();
    LpSolution { status: LpStatus::Optimal, values, objective_value }
}
