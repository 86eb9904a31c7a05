//! Tropical curves: integral-affine graphs with genus-labelled vertices,
//! finite internal edges and unbounded ends, mapped into a tropical part.

use std::collections::{BTreeMap, VecDeque};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{rat, serde_q, Rational};

/// Largest number of edges (internal plus ends) accepted by the
/// automorphism search.
pub const MAX_AUT_EDGES: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    #[serde(with = "serde_q::vec")]
    pub pos: Vec<Rational>,
    #[serde(default)]
    pub genus: u32,
    /// Cell of the target complex containing the vertex.
    #[serde(default)]
    pub cell: usize,
}

/// Internal edge from `v[0]` (tail) to `v[1]` (head).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub v: [usize; 2],
    #[serde(with = "serde_q")]
    pub len: Rational,
    pub d: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct End {
    pub v: usize,
    pub d: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TropicalCurve {
    pub vertices: Vec<Vertex>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub ends: Vec<End>,
}

/// A vertex with all its incident edges made unbounded.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexStar {
    #[serde(with = "serde_q::vec")]
    pub pos: Vec<Rational>,
    pub genus: u32,
    pub ends: Vec<Vec<i64>>,
}

impl VertexStar {
    pub fn is_balanced(&self) -> bool {
        let dim = self.pos.len();
        (0..dim).all(|k| self.ends.iter().map(|d| d[k]).sum::<i64>() == 0)
    }
}

/// `gcd` of the entries; zero for the zero vector.
pub fn edge_multiplicity(d: &[i64]) -> u64 {
    d.iter().fold(0i64, |g, x| g.gcd(x)).unsigned_abs()
}

impl TropicalCurve {
    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, |v| v.pos.len())
    }

    /// Structural checks: indices, vector lengths, positive lengths.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        let dim = self.dim();
        if self.vertices.iter().any(|v| v.pos.len() != dim) {
            return Err(Error::InvalidCurve("vertex positions differ in dimension".into()));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.v[0] >= nv || e.v[1] >= nv {
                return Err(Error::InvalidCurve(format!("edge {i} has a missing endpoint")));
            }
            if e.d.len() != dim {
                return Err(Error::InvalidCurve(format!("edge {i} derivative has wrong length")));
            }
            if !e.len.is_positive() {
                return Err(Error::InvalidCurve(format!("edge {i} has non-positive length")));
            }
        }
        for (i, e) in self.ends.iter().enumerate() {
            if e.v >= nv || e.d.len() != dim {
                return Err(Error::InvalidCurve(format!("end {i} is malformed")));
            }
        }
        Ok(())
    }

    /// Sum of outgoing derivatives at vertex `v`.
    pub fn momentum(&self, v: usize) -> Vec<i64> {
        let mut s = vec![0i64; self.dim()];
        for e in &self.edges {
            for k in 0..s.len() {
                if e.v[0] == v {
                    s[k] += e.d[k];
                }
                if e.v[1] == v {
                    s[k] -= e.d[k];
                }
            }
        }
        for e in self.ends.iter().filter(|e| e.v == v) {
            for k in 0..s.len() {
                s[k] += e.d[k];
            }
        }
        s
    }

    /// Positions consistent with lengths and derivatives, lengths positive,
    /// every vertex balanced.
    pub fn check_balanced(&self) -> bool {
        if self.validate().is_err() {
            return false;
        }
        let consistent = self.edges.iter().all(|e| {
            let (t, h) = (&self.vertices[e.v[0]].pos, &self.vertices[e.v[1]].pos);
            (0..t.len()).all(|k| &h[k] - &t[k] == &e.len * rat(e.d[k]))
        });
        consistent && (0..self.vertices.len()).all(|v| self.momentum(v).iter().all(|&x| x == 0))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.v[0]].push(e.v[1]);
            adj[e.v[1]].push(e.v[0]);
        }
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// First Betti number plus vertex genera.
    pub fn genus(&self) -> Result<u32> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let b1 = self.edges.len() + 1 - self.vertices.len();
        Ok(b1 as u32 + self.vertices.iter().map(|v| v.genus).sum::<u32>())
    }

    /// Product of internal edge multiplicities.
    pub fn k_factor(&self, allow_zero: bool) -> Result<u64> {
        let mut k = 1u64;
        for (i, e) in self.edges.iter().enumerate() {
            let m = edge_multiplicity(&e.d);
            if m == 0 && !allow_zero {
                return Err(Error::InvalidCurve(format!("internal edge {i} has multiplicity zero")));
            }
            k *= m;
        }
        Ok(k)
    }

    /// Stars of all vertices, each internal edge contributing `+d` to its
    /// tail star and `−d` to its head star.
    pub fn cut(&self) -> Vec<VertexStar> {
        let mut stars: Vec<VertexStar> = self
            .vertices
            .iter()
            .map(|v| VertexStar { pos: v.pos.clone(), genus: v.genus, ends: Vec::new() })
            .collect();
        for e in &self.ends {
            stars[e.v].ends.push(e.d.clone());
        }
        for e in &self.edges {
            stars[e.v[0]].ends.push(e.d.clone());
            stars[e.v[1]].ends.push(e.d.iter().map(|x| -x).collect());
        }
        stars
    }

    pub fn disjoint_union(&self, other: &TropicalCurve) -> TropicalCurve {
        let off = self.vertices.len();
        let mut out = self.clone();
        out.vertices.extend(other.vertices.iter().cloned());
        out.edges.extend(other.edges.iter().map(|e| Edge { v: [e.v[0] + off, e.v[1] + off], ..e.clone() }));
        out.ends.extend(other.ends.iter().map(|e| End { v: e.v + off, d: e.d.clone() }));
        out
    }

    /// Canonical orientation key of an internal edge under a vertex map.
    fn edge_key(&self, e: &Edge, sigma: &[usize]) -> (usize, usize, Vec<i64>, Rational) {
        let (t, h) = (sigma[e.v[0]], sigma[e.v[1]]);
        if t <= h {
            (t, h, e.d.clone(), e.len.clone())
        } else {
            (h, t, e.d.iter().map(|x| -x).collect(), e.len.clone())
        }
    }

    /// Order of the automorphism group: vertex permutations preserving
    /// position and genus that carry edges and ends onto edges and ends of
    /// the same data, times the permutations of identical edges and ends
    /// and the flips of zero-derivative loops.
    pub fn automorphism_order(&self) -> Result<u64> {
        self.validate()?;
        let size = self.edges.len() + self.ends.len();
        if size > MAX_AUT_EDGES {
            return Err(Error::TooLarge(format!("{size} edges exceed the automorphism bound")));
        }
        let ident: Vec<usize> = (0..self.vertices.len()).collect();
        let edge_target = multiset(self.edges.iter().map(|e| self.edge_key(e, &ident)));
        let end_target = multiset(self.ends.iter().map(|e| (e.v, e.d.clone())));
        let mut sigma = vec![usize::MAX; self.vertices.len()];
        let mut used = vec![false; self.vertices.len()];
        let mut count = 0u64;
        self.extend_vertex_map(0, &mut sigma, &mut used, &edge_target, &end_target, &mut count);
        let mut factor = 1u64;
        for &c in edge_target.values() {
            factor *= factorial(c);
        }
        for &c in end_target.values() {
            factor *= factorial(c);
        }
        for e in &self.edges {
            if e.v[0] == e.v[1] && e.d.iter().all(|&x| x == 0) {
                factor *= 2;
            }
        }
        Ok(count * factor)
    }

    fn extend_vertex_map(
        &self,
        i: usize,
        sigma: &mut Vec<usize>,
        used: &mut Vec<bool>,
        edge_target: &BTreeMap<(usize, usize, Vec<i64>, Rational), u64>,
        end_target: &BTreeMap<(usize, Vec<i64>), u64>,
        count: &mut u64,
    ) {
        let n = self.vertices.len();
        if i == n {
            let edges = multiset(self.edges.iter().map(|e| self.edge_key(e, sigma)));
            let ends = multiset(self.ends.iter().map(|e| (sigma[e.v], e.d.clone())));
            if &edges == edge_target && &ends == end_target {
                *count += 1;
            }
            return;
        }
        for j in 0..n {
            if used[j] || self.vertices[j].pos != self.vertices[i].pos || self.vertices[j].genus != self.vertices[i].genus {
                continue;
            }
            sigma[i] = j;
            // edges among already mapped vertices must land on edges
            let ok = self.edges.iter().all(|e| {
                if e.v[0] > i || e.v[1] > i {
                    return true;
                }
                let k = self.edge_key(e, sigma);
                let have = self.edges.iter().filter(|f| self.edge_key(f, sigma) == k).count() as u64;
                edge_target.get(&k).is_some_and(|&c| c >= have)
            });
            if ok {
                used[j] = true;
                self.extend_vertex_map(i + 1, sigma, used, edge_target, end_target, count);
                used[j] = false;
            }
            sigma[i] = usize::MAX;
        }
    }
}

fn multiset<K: Ord>(items: impl Iterator<Item = K>) -> BTreeMap<K, u64> {
    let mut m = BTreeMap::new();
    for k in items {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Whether every derivative of the curve is zero.
pub fn is_contracted(c: &TropicalCurve) -> bool {
    c.edges.iter().all(|e| e.d.iter().all(|x| x.is_zero())) && c.ends.iter().all(|e| e.d.iter().all(|x| x.is_zero()))
}
