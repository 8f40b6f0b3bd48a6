//! Exact two-phase primal simplex over [`Rational`].
//!
//! Dense tableau, Bland's rule for both the entering and the leaving variable,
//! so the method terminates without any tolerance parameter. Intended for the
//! small programs that arise from scenario-tree markets (tens to a few hundred
//! columns).

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize c·x` subject to linear constraints; each variable is either
/// nonnegative (default) or free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    n_vars: usize,
    free: Vec<bool>,
    objective: Vec<Rational>,
    minimizing: bool,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<(&[Rational], &Rational)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram {
            n_vars,
            free: vec![false; n_vars],
            objective: vec![Rational::zero(); n_vars],
            minimizing: false,
            constraints: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn set_all_free(&mut self) -> &mut Self {
        self.free.iter_mut().for_each(|f| *f = true);
        self
    }

    pub fn maximize(&mut self, objective: Vec<Rational>) -> &mut Self {
        assert_eq!(objective.len(), self.n_vars);
        self.objective = objective;
        self.minimizing = false;
        self
    }

    /// Minimizes `objective · x`; the reported optimal value is the minimum.
    pub fn minimize(&mut self, objective: Vec<Rational>) -> &mut Self {
        self.maximize(objective.into_iter().map(|c| -c).collect());
        self.minimizing = true;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        assert_eq!(coeffs.len(), self.n_vars);
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// True if `x` satisfies every constraint and sign restriction exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.n_vars {
            return false;
        }
        if x.iter().zip(&self.free).any(|(v, &free)| !free && v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs = crate::rational::dot(&c.coeffs, x);
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
                Relation::Eq => lhs == c.rhs,
            }
        })
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Pos(usize),
    Neg(usize),
    Slack,
    Artificial,
}

struct Tableau {
    // rows[i] has `kinds.len() + 1` entries; the last is the right-hand side.
    rows: Vec<Vec<Rational>>,
    z: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<Column>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let mut kinds = Vec::new();
        for j in 0..lp.n_vars {
            kinds.push(Column::Pos(j));
            if lp.free[j] {
                kinds.push(Column::Neg(j));
            }
        }
        let structural = kinds.len();
        let m = lp.constraints.len();

        let mut extra: Vec<(usize, Rational)> = Vec::new(); // (row, coefficient) per extra column
        let mut extra_kinds = Vec::new();
        let mut basis = vec![usize::MAX; m];
        let mut body: Vec<(Vec<Rational>, Rational, Relation)> = Vec::with_capacity(m);

        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row: Vec<Rational> = Vec::with_capacity(structural);
            for (j, a) in c.coeffs.iter().enumerate() {
                row.push(a.clone());
                if lp.free[j] {
                    row.push(-a.clone());
                }
            }
            let (mut rhs, mut rel) = (c.rhs.clone(), c.relation);
            if rhs.is_negative() {
                row.iter_mut().for_each(|a| *a = -a.clone());
                rhs = -rhs;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            match rel {
                Relation::Le => {
                    basis[i] = structural + extra.len();
                    extra.push((i, Rational::one()));
                    extra_kinds.push(Column::Slack);
                }
                Relation::Ge => {
                    extra.push((i, -Rational::one()));
                    extra_kinds.push(Column::Slack);
                    basis[i] = structural + extra.len();
                    extra.push((i, Rational::one()));
                    extra_kinds.push(Column::Artificial);
                }
                Relation::Eq => {
                    basis[i] = structural + extra.len();
                    extra.push((i, Rational::one()));
                    extra_kinds.push(Column::Artificial);
                }
            }
            body.push((row, rhs, rel));
        }

        kinds.extend(extra_kinds);
        let width = kinds.len();
        let rows = body
            .into_iter()
            .enumerate()
            .map(|(i, (mut row, rhs, _))| {
                row.resize(width, Rational::zero());
                for (k, (r, coef)) in extra.iter().enumerate() {
                    if *r == i {
                        row[structural + k] = coef.clone();
                    }
                }
                row.push(rhs);
                row
            })
            .collect();
        Tableau {
            rows,
            z: vec![Rational::zero(); width + 1],
            basis,
            kinds,
        }
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        self.rows[r].iter_mut().for_each(|x| *x *= &inv);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        if !self.z[c].is_zero() {
            let f = self.z[c].clone();
            for (x, p) in self.z.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        self.basis[r] = c;
    }

    /// Zeroes the objective-row entries of basic columns.
    fn price_out(&mut self) {
        for r in 0..self.rows.len() {
            let b = self.basis[r];
            if !self.z[b].is_zero() {
                let f = self.z[b].clone();
                for (x, p) in self.z.iter_mut().zip(&self.rows[r]) {
                    *x -= &f * p;
                }
            }
        }
    }

    /// Runs simplex iterations on the current objective row. Columns for
    /// which `allowed` is false never enter. Returns false if unbounded.
    fn optimize(&mut self, allowed: &dyn Fn(Column) -> bool) -> bool {
        let width = self.width();
        loop {
            let entering = (0..width).find(|&j| allowed(self.kinds[j]) && self.z[j].is_negative());
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[width] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let width = self.width();
        let has_artificial = self.kinds.contains(&Column::Artificial);

        if has_artificial {
            for j in 0..width {
                self.z[j] = if self.kinds[j] == Column::Artificial {
                    Rational::one()
                } else {
                    Rational::zero()
                };
            }
            self.z[width] = Rational::zero();
            self.price_out();
            let bounded = self.optimize(&|_| true);
            debug_assert!(bounded, "phase one objective is bounded by zero");
            if !self.z[width].is_zero() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining artificials out of the basis, dropping redundant rows.
            let mut r = 0;
            while r < self.rows.len() {
                if self.kinds[self.basis[r]] == Column::Artificial {
                    let replacement = (0..width)
                        .find(|&j| self.kinds[j] != Column::Artificial && !self.rows[r][j].is_zero());
                    match replacement {
                        Some(j) => {
                            self.pivot(r, j);
                            r += 1;
                        }
                        None => {
                            self.rows.remove(r);
                            self.basis.remove(r);
                        }
                    }
                } else {
                    r += 1;
                }
            }
        }

        self.z = vec![Rational::zero(); width + 1];
        for (j, kind) in self.kinds.iter().enumerate() {
            self.z[j] = match kind {
                Column::Pos(v) => -lp.objective[*v].clone(),
                Column::Neg(v) => lp.objective[*v].clone(),
                _ => Rational::zero(),
            };
        }
        self.price_out();
        if !self.optimize(&|k| k != Column::Artificial) {
            return LpOutcome::Unbounded;
        }

        let mut x = vec![Rational::zero(); lp.n_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            match self.kinds[b] {
                Column::Pos(v) => x[v] += &self.rows[r][width],
                Column::Neg(v) => x[v] -= &self.rows[r][width],
                _ => {}
            }
        }
        let value = crate::rational::dot(&lp.objective, &x);
        debug_assert_eq!(value, self.z[width]);
        let value = if lp.minimizing { -value } else { value };
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.maximize(v(&[3, 5]))
            .constrain(v(&[1, 0]), Relation::Le, int(4))
            .constrain(v(&[0, 2]), Relation::Le, int(12))
            .constrain(v(&[3, 2]), Relation::Le, int(18));
        assert_eq!(lp.solve(), LpOutcome::Optimal { x: v(&[2, 6]), value: int(36) });
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + y, x - y = -3, x free, y >= 0, y <= 10  ->  y = 0, x = -3
        let mut lp = LinearProgram::new(2);
        lp.set_free(0)
            .minimize(v(&[1, 1]))
            .constrain(v(&[1, -1]), Relation::Eq, int(-3))
            .constrain(v(&[0, 1]), Relation::Le, int(10));
        let (x, value) = lp.solve().optimal().map(|(x, v)| (x.to_vec(), v.clone())).unwrap();
        assert_eq!(x, v(&[-3, 0]));
        assert_eq!(value, int(-3));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.constrain(v(&[1]), Relation::Ge, int(2))
            .constrain(v(&[1]), Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.maximize(v(&[1, 0])).constrain(v(&[1, -1]), Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn minimum_is_reported_with_its_own_sign() {
        let mut lp = LinearProgram::new(2);
        lp.minimize(v(&[2, 3]))
            .constrain(v(&[1, 1]), Relation::Ge, int(4))
            .constrain(v(&[1, 0]), Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Optimal { x: v(&[1, 3]), value: int(11) });
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new(2);
        lp.maximize(v(&[1, 1]))
            .constrain(v(&[1, 1]), Relation::Eq, int(2))
            .constrain(v(&[2, 2]), Relation::Eq, int(4))
            .constrain(v(&[1, 0]), Relation::Ge, ratio(1, 2));
        let out = lp.solve();
        let (x, value) = out.optimal().unwrap();
        assert_eq!(*value, int(2));
        assert!(lp.is_feasible(x));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        lp.maximize(vec![ratio(3, 4), int(-150), ratio(1, 50), int(-6)])
            .constrain(vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9)], Relation::Le, int(0))
            .constrain(vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3)], Relation::Le, int(0))
            .constrain(vec![int(0), int(0), int(1), int(0)], Relation::Le, int(1));
        let out = lp.solve();
        let (x, value) = out.optimal().unwrap();
        assert_eq!(*value, ratio(1, 20));
        assert!(lp.is_feasible(x));
    }
}
