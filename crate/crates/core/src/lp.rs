//! Exact rational linear programming: two-phase dense simplex with Bland's
//! rule, so every run terminates and every answer is exact.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// `coeffs · x  (≤ | ≥ | =)  rhs`
#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub rel: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, rel: Relation, rhs: Rational) -> Self {
        Self { coeffs, rel, rhs }
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
        match self.rel {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, point: Vec<Rational> },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let pv = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = &*x / &pv;
        }
        self.rhs[r] = &self.rhs[r] / &pv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x = &*x - &f * p;
                }
            }
            self.rhs[i] = &self.rhs[i] - &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · y` over the columns in `allowed`; `None` means
    /// unbounded.
    fn run(&mut self, cost: &[Rational], allowed: &[bool]) -> Option<()> {
        loop {
            let ncols = cost.len();
            let mut entering = None;
            for j in 0..ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let z = self
                    .basis
                    .iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (i, &bv)| acc + &cost[bv] * &self.rows[i][j]);
                if (&cost[j] - z).is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return Some(()) };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][c].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let (r, _) = leave?;
            self.pivot(r, c);
        }
    }
}

/// Maximizes `objective · x` over free variables `x ∈ ℚ^nvars`.
pub fn maximize(nvars: usize, objective: &[Rational], constraints: &[LinearConstraint]) -> LpOutcome {
    // Columns: u (n), v (n) with x = u - v, one slack per inequality, one
    // artificial per row that needs one.
    let m = constraints.len();
    let nslack = constraints.iter().filter(|c| c.rel != Relation::Eq).count();
    let base = 2 * nvars + nslack;
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = vec![usize::MAX; m];
    let mut slack_col = 2 * nvars;
    let mut needs_art = Vec::new();
    for (i, con) in constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); base];
        for (j, a) in con.coeffs.iter().enumerate() {
            row[j] = a.clone();
            row[nvars + j] = -a.clone();
        }
        let mut b = con.rhs.clone();
        let mut slack = None;
        match con.rel {
            Relation::Le => {
                row[slack_col] = Rational::one();
                slack = Some(slack_col);
                slack_col += 1;
            }
            Relation::Ge => {
                row[slack_col] = -Rational::one();
                slack = Some(slack_col);
                slack_col += 1;
            }
            Relation::Eq => {}
        }
        if b.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            b = -b;
        }
        match slack {
            Some(s) if row[s].is_one() => basis[i] = s,
            _ => needs_art.push(i),
        }
        rows.push(row);
        rhs.push(b);
    }
    let ncols = base + needs_art.len();
    for row in rows.iter_mut() {
        row.resize(ncols, Rational::zero());
    }
    for (k, &i) in needs_art.iter().enumerate() {
        rows[i][base + k] = Rational::one();
        basis[i] = base + k;
    }
    let mut t = Tableau { rows, rhs, basis };

    if !needs_art.is_empty() {
        let mut cost = vec![Rational::zero(); ncols];
        for c in cost.iter_mut().skip(base) {
            *c = -Rational::one();
        }
        let allowed = vec![true; ncols];
        t.run(&cost, &allowed).expect("phase one is bounded");
        let infeas = t
            .basis
            .iter()
            .zip(&t.rhs)
            .any(|(&bv, b)| bv >= base && b.is_positive());
        if infeas {
            return LpOutcome::Infeasible;
        }
        // drive remaining (zero-valued) artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= base {
                match (0..base).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![Rational::zero(); ncols];
    for (j, c) in objective.iter().enumerate() {
        cost[j] = c.clone();
        cost[nvars + j] = -c.clone();
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| j < base).collect();
    if t.run(&cost, &allowed).is_none() {
        return LpOutcome::Unbounded;
    }
    let mut y = vec![Rational::zero(); ncols];
    for (i, &bv) in t.basis.iter().enumerate() {
        y[bv] = t.rhs[i].clone();
    }
    let point: Vec<Rational> = (0..nvars).map(|j| &y[j] - &y[nvars + j]).collect();
    let value = objective
        .iter()
        .zip(&point)
        .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
    LpOutcome::Optimal { value, point }
}

pub fn minimize(nvars: usize, objective: &[Rational], constraints: &[LinearConstraint]) -> LpOutcome {
    let neg: Vec<Rational> = objective.iter().map(|c| -c.clone()).collect();
    match maximize(nvars, &neg, constraints) {
        LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: -value, point },
        other => other,
    }
}

pub fn feasible_point(nvars: usize, constraints: &[LinearConstraint]) -> Option<Vec<Rational>> {
    match maximize(nvars, &vec![Rational::zero(); nvars], constraints) {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

/// Feasibility of a system mixing non-strict constraints and strict ones
/// (`coeffs · x > rhs`, passed in `strict` with relation `Ge`). Uses one
/// extra slack variable `t ≤ 1` and checks `max t > 0`.
pub fn strict_feasible_point(
    nvars: usize,
    nonstrict: &[LinearConstraint],
    strict: &[LinearConstraint],
) -> Option<Vec<Rational>> {
    if strict.is_empty() {
        return feasible_point(nvars, nonstrict);
    }
    let mut cons: Vec<LinearConstraint> = nonstrict
        .iter()
        .map(|c| {
            let mut coeffs = c.coeffs.clone();
            coeffs.push(Rational::zero());
            LinearConstraint::new(coeffs, c.rel, c.rhs.clone())
        })
        .collect();
    for c in strict {
        // coeffs·x - t ≥ rhs
        let mut coeffs = c.coeffs.clone();
        coeffs.push(-Rational::one());
        let rel = match c.rel {
            Relation::Ge => Relation::Ge,
            Relation::Le => {
                coeffs.iter_mut().for_each(|x| *x = -x.clone());
                coeffs[nvars] = -Rational::one();
                Relation::Ge
            }
            Relation::Eq => panic!("strict equality is meaningless"),
        };
        let rhs = if c.rel == Relation::Le { -c.rhs.clone() } else { c.rhs.clone() };
        cons.push(LinearConstraint::new(coeffs, rel, rhs));
    }
    let mut cap = vec![Rational::zero(); nvars + 1];
    cap[nvars] = Rational::one();
    cons.push(LinearConstraint::new(cap.clone(), Relation::Le, Rational::one()));
    match maximize(nvars + 1, &cap, &cons) {
        LpOutcome::Optimal { value, mut point } if value.is_positive() => {
            point.truncate(nvars);
            Some(point)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn c(coeffs: &[i64], rel: Relation, rhs: i64) -> LinearConstraint {
        LinearConstraint::new(coeffs.iter().map(|&x| rat(x)).collect(), rel, rat(rhs))
    }

    #[test]
    fn textbook_lp() {
        // max 2x + 3y, 2x + y ≤ 18, 6x + 5y ≤ 60, 2x + 5y ≤ 40, x,y ≥ 0
        let cons = vec![
            c(&[2, 1], Relation::Le, 18),
            c(&[6, 5], Relation::Le, 60),
            c(&[2, 5], Relation::Le, 40),
            c(&[1, 0], Relation::Ge, 0),
            c(&[0, 1], Relation::Ge, 0),
        ];
        let out = maximize(2, &[rat(2), rat(3)], &cons);
        assert_eq!(out, LpOutcome::Optimal { value: rat(28), point: vec![rat(5), rat(6)] });
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cons = vec![c(&[1], Relation::Ge, 1), c(&[1], Relation::Le, 0)];
        assert_eq!(maximize(1, &[rat(1)], &cons), LpOutcome::Infeasible);
        let cons = vec![c(&[1], Relation::Ge, 1)];
        assert_eq!(maximize(1, &[rat(1)], &cons), LpOutcome::Unbounded);
        assert_eq!(
            minimize(1, &[rat(1)], &cons),
            LpOutcome::Optimal { value: rat(1), point: vec![rat(1)] }
        );
    }

    #[test]
    fn equalities_and_strictness() {
        let cons = vec![c(&[1, 1], Relation::Eq, 3), c(&[1, -1], Relation::Eq, 1)];
        assert_eq!(feasible_point(2, &cons), Some(vec![rat(2), rat(1)]));
        // x ≥ 0 and -x ≥ 0 is feasible, but not strictly
        let ns = vec![];
        let st = vec![c(&[1], Relation::Ge, 0), c(&[-1], Relation::Ge, 0)];
        assert!(strict_feasible_point(1, &ns, &st).is_none());
        let st = vec![c(&[2], Relation::Ge, 1), c(&[-1], Relation::Ge, -1)];
        let p = strict_feasible_point(1, &ns, &st).unwrap();
        assert!(p[0] > ratio(1, 2) && p[0] < rat(1));
    }
}
