#![allow(dead_code)]

use std::collections::BTreeMap;

use explograph_core::affine::{MonoidElement, Polytope};
use explograph_core::lp::LpOutcome;
use explograph_core::rational::{rat, Rational};
use explograph_core::tropcurve::{Edge, End, TropicalCurve, Vertex};
use rand::Rng;

/// Balanced curve on random integer positions: edge derivatives are the
/// position differences (length one), each vertex closed off by an end.
pub fn random_balanced_curve<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize, spread: i64) -> TropicalCurve {
    let nv = rng.gen_range(1..=max_vertices);
    let vertices: Vec<Vertex> = (0..nv)
        .map(|_| Vertex {
            pos: vec![rat(rng.gen_range(-spread..=spread)), rat(rng.gen_range(-spread..=spread))],
            genus: rng.gen_range(0..2),
            cell: 0,
        })
        .collect();
    let ne = rng.gen_range(0..=max_edges);
    let mut edges = Vec::new();
    for _ in 0..ne {
        let (t, h) = (rng.gen_range(0..nv), rng.gen_range(0..nv));
        let d: Vec<i64> = (0..2)
            .map(|k| crate_int(&(&vertices[h].pos[k] - &vertices[t].pos[k])))
            .collect();
        edges.push(Edge { v: [t, h], len: rat(1), d });
    }
    let mut c = TropicalCurve { vertices, edges, ends: vec![] };
    for v in 0..nv {
        let m = c.momentum(v);
        if m.iter().any(|&x| x != 0) {
            c.ends.push(End { v, d: m.iter().map(|x| -x).collect() });
        }
    }
    c
}

fn crate_int(q: &Rational) -> i64 {
    explograph_core::rational::to_i64(q).expect("integer positions")
}

/// Counts automorphisms by trying every vertex permutation and, for each,
/// every bijection of internal edges (with both orientations) and of ends.
pub fn brute_force_automorphisms(c: &TropicalCurve) -> u64 {
    let n = c.vertices.len();
    let mut total = 0;
    for sigma in permutations(n) {
        if (0..n).any(|i| c.vertices[sigma[i]].pos != c.vertices[i].pos || c.vertices[sigma[i]].genus != c.vertices[i].genus) {
            continue;
        }
        let edge_maps = count_edge_bijections(c, &sigma, 0, &mut vec![false; c.edges.len()]);
        if edge_maps == 0 {
            continue;
        }
        total += edge_maps * count_end_bijections(c, &sigma, 0, &mut vec![false; c.ends.len()]);
    }
    total
}

fn count_edge_bijections(c: &TropicalCurve, sigma: &[usize], i: usize, used: &mut Vec<bool>) -> u64 {
    let Some(e) = c.edges.get(i) else { return 1 };
    let neg: Vec<i64> = e.d.iter().map(|x| -x).collect();
    let mut total = 0;
    for (j, f) in c.edges.iter().enumerate() {
        if used[j] || f.len != e.len {
            continue;
        }
        let straight = f.v == [sigma[e.v[0]], sigma[e.v[1]]] && f.d == e.d;
        let flipped = f.v == [sigma[e.v[1]], sigma[e.v[0]]] && f.d == neg;
        let ways = u64::from(straight) + u64::from(flipped);
        if ways == 0 {
            continue;
        }
        used[j] = true;
        total += ways * count_edge_bijections(c, sigma, i + 1, used);
        used[j] = false;
    }
    total
}

fn count_end_bijections(c: &TropicalCurve, sigma: &[usize], i: usize, used: &mut Vec<bool>) -> u64 {
    let Some(e) = c.ends.get(i) else { return 1 };
    let mut total = 0;
    for (j, f) in c.ends.iter().enumerate() {
        if used[j] || f.v != sigma[e.v] || f.d != e.d {
            continue;
        }
        used[j] = true;
        total += count_end_bijections(c, sigma, i + 1, used);
        used[j] = false;
    }
    total
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Number of rational plane curves of degree `d` through `3d − 1` points.
pub fn kontsevich(d: usize) -> u128 {
    let mut n = vec![0u128; d + 1];
    let binom = |a: usize, b: usize| -> u128 {
        (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i + 1) as u128)
    };
    if d >= 1 {
        n[1] = 1;
    }
    for k in 2..=d {
        let mut s: i128 = 0;
        for a in 1..k {
            let b = k - a;
            let (a_, b_) = (a as i128, b as i128);
            let term = (n[a] * n[b]) as i128
                * (a_ * a_ * b_ * b_ * binom(3 * k - 4, 3 * a - 2) as i128
                    - a_ * a_ * a_ * b_ * binom(3 * k - 4, 3 * a - 1) as i128);
            s += term;
        }
        n[k] = s as u128;
    }
    n[d]
}

/// `min α·x` over `p`, `None` when unbounded below.
pub fn min_on(p: &Polytope, alpha: &[i64]) -> Option<Rational> {
    match p.minimize(alpha, &rat(0)) {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    }
}

/// Tight smooth monomials `⌊e^a⌋z^α` with `a = −min α·x` for all `α` in the
/// box `|α_i| ≤ h`.
pub fn tight_elements(p: &Polytope, h: i64) -> BTreeMap<Vec<i64>, Rational> {
    let mut out = BTreeMap::new();
    let m = p.dim;
    let mut alpha = vec![-h; m];
    loop {
        if let Some(v) = min_on(p, &alpha) {
            out.insert(alpha.clone(), -v);
        }
        let mut k = 0;
        while k < m && alpha[k] == h {
            alpha[k] = -h;
            k += 1;
        }
        if k == m {
            break;
        }
        alpha[k] += 1;
    }
    out
}

/// Tight elements in the box that do not split as a sum of two nonzero
/// tight elements of the box.
pub fn brute_force_irreducibles(p: &Polytope, h: i64) -> Vec<MonoidElement> {
    let tight = tight_elements(p, h);
    let mut out = Vec::new();
    for (alpha, a) in &tight {
        if alpha.iter().all(|&x| x == 0) {
            continue;
        }
        let splits = tight.iter().any(|(beta, b)| {
            if beta.iter().all(|&x| x == 0) || beta == alpha {
                return false;
            }
            let rest: Vec<i64> = alpha.iter().zip(beta).map(|(x, y)| x - y).collect();
            tight.get(&rest).is_some_and(|c| &(b + c) == a)
        });
        if !splits {
            out.push(MonoidElement { a: a.clone(), alpha: alpha.clone() });
        }
    }
    out
}

/// Cheapest exponent reachable as a sum of at most `steps` generators,
/// for every `α` inside the box `|α_i| ≤ bound`.
pub fn cheapest_factorizations(gens: &[MonoidElement], m: usize, bound: i64, steps: usize) -> BTreeMap<Vec<i64>, Rational> {
    let mut best: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
    best.insert(vec![0; m], rat(0));
    let mut frontier = best.clone();
    for _ in 0..steps {
        let mut next = BTreeMap::new();
        for (alpha, a) in &frontier {
            for g in gens {
                let beta: Vec<i64> = alpha.iter().zip(&g.alpha).map(|(x, y)| x + y).collect();
                if beta.iter().any(|x| x.abs() > bound) {
                    continue;
                }
                let cost = a + &g.a;
                if best.get(&beta).map_or(true, |b| &cost < b) {
                    best.insert(beta.clone(), cost.clone());
                    next.insert(beta, cost);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    best
}
