use explograph_core::linalg::{self, LinearSolution};
use explograph_core::lp::{feasible_point, maximize, LinearConstraint, LpOutcome, Relation};
use explograph_core::rational::{rat, Rational};
use itertools::Itertools;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rows `a·x ≤ b`.
type Row = (Vec<Rational>, Rational);

/// Fourier–Motzkin: eliminate every variable, then inspect `0 ≤ b`.
fn fm_feasible(mut rows: Vec<Row>, n: usize) -> bool {
    for k in 0..n {
        let (mut pos, mut neg, mut rest) = (vec![], vec![], vec![]);
        for r in rows {
            if r.0[k] > Rational::zero() {
                pos.push(r);
            } else if r.0[k] < Rational::zero() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for (p, q) in pos.iter().cartesian_product(&neg) {
            let (sp, sq) = (-q.0[k].clone(), p.0[k].clone());
            let a = p.0.iter().zip(&q.0).map(|(x, y)| x * &sp + y * &sq).collect();
            rest.push((a, &p.1 * &sp + &q.1 * &sq));
        }
        rows = rest;
    }
    rows.iter().all(|r| r.1 >= Rational::zero())
}

fn random_system(rng: &mut ChaCha8Rng, n: usize) -> Vec<Row> {
    let mut rows = Vec::new();
    for i in 0..n {
        // a bounding box keeps every instance bounded
        let mut e = vec![Rational::zero(); n];
        e[i] = rat(1);
        rows.push((e.clone(), rat(rng.gen_range(0..6))));
        e[i] = rat(-1);
        rows.push((e, rat(rng.gen_range(0..6))));
    }
    for _ in 0..rng.gen_range(1..5) {
        let a = (0..n).map(|_| rat(rng.gen_range(-3..=3))).collect();
        rows.push((a, rat(rng.gen_range(-6..=6))));
    }
    rows
}

fn to_constraints(rows: &[Row]) -> Vec<LinearConstraint> {
    rows.iter().map(|(a, b)| LinearConstraint::new(a.clone(), Relation::Le, b.clone())).collect()
}

/// Best objective over all basic feasible points.
fn vertex_max(rows: &[Row], n: usize, obj: &[Rational]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for pick in (0..rows.len()).combinations(n) {
        let a: Vec<Vec<Rational>> = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<Rational> = pick.iter().map(|&i| rows[i].1.clone()).collect();
        let LinearSolution::Unique(x) = linalg::solve(&a, &b, n) else { continue };
        let ok = rows.iter().all(|(r, c)| r.iter().zip(&x).fold(Rational::zero(), |s, (p, q)| s + p * q) <= *c);
        if ok {
            let v = obj.iter().zip(&x).fold(Rational::zero(), |s, (p, q)| s + p * q);
            if best.as_ref().map_or(true, |b| &v > b) {
                best = Some(v);
            }
        }
    }
    best
}

#[test]
fn feasibility_matches_fourier_motzkin() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut infeasible = 0;
    for _ in 0..300 {
        let n = rng.gen_range(1..=3);
        let rows = random_system(&mut rng, n);
        let cons = to_constraints(&rows);
        let lp = feasible_point(n, &cons);
        assert_eq!(lp.is_some(), fm_feasible(rows.clone(), n), "{rows:?}");
        if let Some(x) = lp {
            assert!(cons.iter().all(|c| c.holds(&x)));
        } else {
            infeasible += 1;
        }
    }
    assert!(infeasible > 10);
}

#[test]
fn optimum_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let rows = random_system(&mut rng, n);
        let obj: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-4..=4))).collect();
        match (maximize(n, &obj, &to_constraints(&rows)), vertex_max(&rows, n, &obj)) {
            (LpOutcome::Optimal { value, .. }, Some(v)) => assert_eq!(value, v),
            (LpOutcome::Infeasible, None) => {}
            (a, b) => panic!("simplex {a:?} vs vertices {b:?}"),
        }
    }
}
