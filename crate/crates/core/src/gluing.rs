//! Rigid tropical plane curves through point constraints, their direct
//! weighted count, and the cut-and-glue assembly of the same count.
//!
//! Curves are found through their dual subdivisions: a tropical polynomial
//! `max_m (c_m + m·x)` over a chosen vertex set `V` of the Newton polygon
//! has each constraint point on the edge dual to some pair of `V`, which is
//! a system of difference constraints on `c`. Leaves of the search are
//! solved exactly and accepted when the regular subdivision they induce is
//! made of triangles and the prescribed parallelograms.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{self, LinearSolution};
use crate::lp::{self, LinearConstraint, Relation};
use crate::rational::{format_rational, parse_rational, rat, serde_q, Rational};
use crate::tropcurve::{edge_multiplicity, Edge, End, TropicalCurve, Vertex, VertexStar};

/// Coordinates of seeded points are drawn from `[-POINT_RANGE, POINT_RANGE]`.
pub const POINT_RANGE: i64 = 1000;
/// Reseeding attempts before generic point generation gives up.
pub const MAX_RESEEDS: u32 = 64;

pub type Point = [Rational; 2];

/// End derivatives of a plane curve of degree `d`.
pub fn degree_ends(d: u32) -> Vec<[i64; 2]> {
    let mut out = Vec::with_capacity(3 * d as usize);
    for u in [[-1, 0], [0, -1], [1, 1]] {
        out.extend(std::iter::repeat(u).take(d as usize));
    }
    out
}

/// Wire form of a counting problem; `points` may be left for the seed to fill.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ends: Option<Vec<[i64; 2]>>,
    #[serde(default)]
    pub genus: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[String; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ProblemSpec", into = "ProblemSpec")]
pub struct CountingProblem {
    pub degree: Option<u32>,
    pub ends: Vec<[i64; 2]>,
    pub genus: u32,
    pub points: Vec<Point>,
}

impl ProblemSpec {
    fn ends(&self) -> Result<(Option<u32>, Vec<[i64; 2]>)> {
        match (&self.degree, &self.ends) {
            (Some(d), None) => Ok((Some(*d), degree_ends(*d))),
            (None, Some(e)) => Ok((None, e.clone())),
            (Some(d), Some(e)) => {
                let mut a = degree_ends(*d);
                let mut b = e.clone();
                a.sort();
                b.sort();
                if a != b {
                    return Err(Error::InvalidProblem("degree and ends disagree".into()));
                }
                Ok((Some(*d), e.clone()))
            }
            (None, None) => Err(Error::InvalidProblem("need degree or ends".into())),
        }
    }

    /// Fills in missing points from `seed`; returns the problem and the
    /// number of reseeds spent on rejected configurations.
    pub fn resolve(&self, seed: u64) -> Result<(CountingProblem, u32)> {
        let (degree, ends) = self.ends()?;
        match &self.points {
            Some(_) => Ok((CountingProblem::try_from(self.clone())?, 0)),
            None => generic_problem(degree, ends, self.genus, seed),
        }
    }
}

impl TryFrom<ProblemSpec> for CountingProblem {
    type Error = Error;

    fn try_from(spec: ProblemSpec) -> Result<Self> {
        let (degree, ends) = spec.ends()?;
        let raw = spec.points.clone().ok_or_else(|| Error::InvalidProblem("missing points".into()))?;
        let points = raw
            .iter()
            .map(|[x, y]| Ok([parse_rational(x)?, parse_rational(y)?]))
            .collect::<Result<Vec<_>>>()?;
        CountingProblem::new(degree, ends, spec.genus, points)
    }
}

impl From<CountingProblem> for ProblemSpec {
    fn from(p: CountingProblem) -> Self {
        let points = p.points.iter().map(|[x, y]| [format_rational(x), format_rational(y)]).collect();
        ProblemSpec {
            degree: p.degree,
            ends: if p.degree.is_some() { None } else { Some(p.ends) },
            genus: p.genus,
            points: Some(points),
        }
    }
}

impl CountingProblem {
    pub fn new(degree: Option<u32>, ends: Vec<[i64; 2]>, genus: u32, points: Vec<Point>) -> Result<Self> {
        check_ends(&ends)?;
        let expected = ends.len() + genus as usize - 1;
        if points.len() != expected {
            return Err(Error::InvalidProblem(format!(
                "{} points given, {expected} needed for {} ends and genus {genus}",
                points.len(),
                ends.len()
            )));
        }
        Ok(Self { degree, ends, genus, points })
    }

    pub fn of_degree(d: u32, genus: u32, points: Vec<Point>) -> Result<Self> {
        Self::new(Some(d), degree_ends(d), genus, points)
    }

    pub fn expected_points(&self) -> usize {
        self.ends.len() + self.genus as usize - 1
    }

    /// Label used for the degree slot of series keys.
    pub fn degree_label(&self) -> String {
        match self.degree {
            Some(d) => d.to_string(),
            None => {
                let mut e = self.ends.clone();
                e.sort();
                e.iter().map(|u| format!("({},{})", u[0], u[1])).collect()
            }
        }
    }

    pub fn series_key(&self) -> SeriesKey {
        SeriesKey { genus: self.genus, n: self.ends.len(), degree: self.degree_label() }
    }

    /// Image under `x ↦ A x` for an integer matrix `A`.
    pub fn transformed(&self, a: [[i64; 2]; 2]) -> Result<Self> {
        let ends = self.ends.iter().map(|u| [a[0][0] * u[0] + a[0][1] * u[1], a[1][0] * u[0] + a[1][1] * u[1]]).collect();
        let points = self
            .points
            .iter()
            .map(|[x, y]| [x * rat(a[0][0]) + y * rat(a[0][1]), x * rat(a[1][0]) + y * rat(a[1][1])])
            .collect();
        Self::new(None, ends, self.genus, points)
    }
}

fn check_ends(ends: &[[i64; 2]]) -> Result<()> {
    if ends.iter().any(|u| u == &[0, 0]) {
        return Err(Error::InvalidProblem("zero end derivative".into()));
    }
    let sum = ends.iter().fold([0i64, 0], |s, u| [s[0] + u[0], s[1] + u[1]]);
    if sum != [0, 0] {
        return Err(Error::InvalidProblem(format!("ends do not balance: sum ({}, {})", sum[0], sum[1])));
    }
    if ends.len() < 3 {
        return Err(Error::InvalidProblem("fewer than three ends".into()));
    }
    Ok(())
}

/// Seeded integer points, redrawn until enumeration stops reporting a
/// degenerate configuration.
pub fn generic_problem(degree: Option<u32>, ends: Vec<[i64; 2]>, genus: u32, seed: u64) -> Result<(CountingProblem, u32)> {
    check_ends(&ends)?;
    let n = ends.len() + genus as usize - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..MAX_RESEEDS {
        let points = (0..n)
            .map(|_| [rat(rng.gen_range(-POINT_RANGE..=POINT_RANGE)), rat(rng.gen_range(-POINT_RANGE..=POINT_RANGE))])
            .collect();
        let prob = CountingProblem::new(degree, ends.clone(), genus, points)?;
        match enumerate_rigid_curves(&prob) {
            Ok(_) => return Ok((prob, attempt)),
            Err(Error::NonGeneric(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonGeneric(format!("no generic configuration after {MAX_RESEEDS} draws")))
}

// ---------------------------------------------------------------------------
// Newton polygon

type Lat = [i64; 2];

fn cross(a: Lat, b: Lat) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: Lat, b: Lat) -> Lat {
    [a[0] - b[0], a[1] - b[1]]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Boundary points where consecutive ends meet, counter-clockwise.
    pub breakpoints: Vec<Lat>,
    pub interior: Vec<Lat>,
}

/// Polygon whose sides are the ends turned a quarter counter-clockwise,
/// taken in angular order.
pub fn newton_polygon(ends: &[[i64; 2]]) -> Result<NewtonPolygon> {
    check_ends(ends)?;
    let half = |u: &Lat| u8::from(!(u[1] > 0 || (u[1] == 0 && u[0] > 0)));
    let mut es = ends.to_vec();
    es.sort_by(|a, b| half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross(*a, *b))));
    let mut pts = vec![[0i64, 0]];
    for u in &es {
        let p = *pts.last().unwrap();
        pts.push([p[0] - u[1], p[1] + u[0]]);
    }
    pts.pop();
    let n = pts.len();
    let area2: i64 = (0..n).map(|i| cross(pts[i], pts[(i + 1) % n])).sum();
    if area2 <= 0 {
        return Err(Error::InvalidProblem("ends span a degenerate polygon".into()));
    }
    let (xmin, xmax) = pts.iter().map(|p| p[0]).minmax().into_option().unwrap();
    let (ymin, ymax) = pts.iter().map(|p| p[1]).minmax().into_option().unwrap();
    let mut interior = Vec::new();
    for x in xmin..=xmax {
        for y in ymin..=ymax {
            let inside = (0..n).all(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                cross(sub(b, a), sub([x, y], a)) > 0
            });
            if inside {
                interior.push([x, y]);
            }
        }
    }
    Ok(NewtonPolygon { breakpoints: pts, interior })
}

// ---------------------------------------------------------------------------
// Enumeration

/// Which piece of a curve a constraint point lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum EdgeRef {
    Edge(usize),
    End(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mark {
    #[serde(with = "serde_q::vec")]
    pub point: Vec<Rational>,
    pub on: EdgeRef,
}

/// An enumerated curve together with the position of each constraint point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidCurve {
    pub curve: TropicalCurve,
    pub marks: Vec<Mark>,
}

impl RigidCurve {
    pub fn type_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.curve).expect("curves serialize");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }
}

type Dist = Vec<Vec<Option<i128>>>;

/// Adds `c_v − c_u ≤ w` to a closed shortest-path matrix; `None` on a
/// negative cycle.
fn add_constraint(d: &Dist, u: usize, v: usize, w: i128) -> Option<Dist> {
    if let Some(back) = d[v][u] {
        if back + w < 0 {
            return None;
        }
    }
    let n = d.len();
    let mut out = d.clone();
    for x in 0..n {
        let Some(xu) = d[x][u] else { continue };
        for y in 0..n {
            let Some(vy) = d[v][y] else { continue };
            let t = xu + w + vy;
            if out[x][y].map_or(true, |c| t < c) {
                out[x][y] = Some(t);
            }
        }
    }
    Some(out)
}

struct Search<'a> {
    prob: &'a CountingProblem,
    v: Vec<Lat>,
    /// Number of parallelogram cells required.
    npar: usize,
    pairs: Vec<(usize, usize)>,
    paras: Vec<[usize; 4]>,
    scaled: Vec<[i128; 2]>,
}

fn dot_q(m: Lat, p: &Point) -> Rational {
    &p[0] * rat(m[0]) + &p[1] * rat(m[1])
}

impl<'a> Search<'a> {
    fn new(prob: &'a CountingProblem, v: Vec<Lat>, npar: usize) -> Result<Self> {
        let n = v.len();
        let on_segment = |i: usize, j: usize| {
            (0..n).any(|k| {
                k != i && k != j && cross(sub(v[j], v[i]), sub(v[k], v[i])) == 0 && {
                    let (a, b, m) = (v[i], v[j], v[k]);
                    a[0].min(b[0]) <= m[0] && m[0] <= a[0].max(b[0]) && a[1].min(b[1]) <= m[1] && m[1] <= a[1].max(b[1])
                }
            })
        };
        let pairs = (0..n).tuple_combinations().filter(|&(i, j)| !on_segment(i, j)).collect();
        let mut paras: Vec<[usize; 4]> = Vec::new();
        let mut seen = BTreeSet::new();
        for q in (0..n).permutations(4) {
            let [a, b, c, d] = [v[q[0]], v[q[1]], v[q[2]], v[q[3]]];
            if [a[0] + c[0], a[1] + c[1]] != [b[0] + d[0], b[1] + d[1]] || cross(sub(b, a), sub(d, a)) == 0 {
                continue;
            }
            // a and c opposite, so a,b,c,d is a convex cycle
            let mut key = q.clone();
            key.sort();
            if seen.insert(key) {
                paras.push([q[0], q[1], q[2], q[3]]);
            }
        }
        let denom = prob.points.iter().flatten().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let scaled = prob
            .points
            .iter()
            .map(|p| {
                let f = |q: &Rational| (q * Rational::from_integer(denom.clone())).to_integer().to_i128();
                match (f(&p[0]), f(&p[1])) {
                    (Some(x), Some(y)) if x.abs() < 1 << 60 && y.abs() < 1 << 60 => Ok([x, y]),
                    _ => Err(Error::TooLarge("point coordinates too large for the search".into())),
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { prob, v, npar, pairs, paras, scaled })
    }

    fn dot_s(&self, m: usize, k: usize) -> i128 {
        self.v[m][0] as i128 * self.scaled[k][0] + self.v[m][1] as i128 * self.scaled[k][1]
    }

    fn run(&self) -> Result<Vec<RigidCurve>> {
        let n = self.v.len();
        let d0: Dist = (0..n).map(|i| (0..n).map(|j| (i == j).then_some(0)).collect()).collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.dfs(0, &d0, &mut chosen, &mut out)?;
        Ok(out)
    }

    fn dfs(&self, k: usize, d: &Dist, chosen: &mut Vec<(usize, usize)>, out: &mut Vec<RigidCurve>) -> Result<()> {
        if k == self.prob.points.len() {
            for paras in self.paras.iter().combinations(self.npar) {
                if let Some(c) = self.leaf(chosen, &paras)? {
                    out.push(c);
                }
            }
            return Ok(());
        }
        'pairs: for &(i, j) in &self.pairs {
            let w = self.dot_s(i, k) - self.dot_s(j, k);
            let Some(mut d2) = add_constraint(d, i, j, w) else { continue };
            let Some(next) = add_constraint(&d2, j, i, -w) else { continue };
            d2 = next;
            for m in 0..self.v.len() {
                if m == i || m == j {
                    continue;
                }
                match add_constraint(&d2, i, m, self.dot_s(i, k) - self.dot_s(m, k)) {
                    Some(next) => d2 = next,
                    None => continue 'pairs,
                }
            }
            chosen.push((i, j));
            self.dfs(k + 1, &d2, chosen, out)?;
            chosen.pop();
        }
        Ok(())
    }

    fn leaf(&self, chosen: &[(usize, usize)], paras: &[&[usize; 4]]) -> Result<Option<RigidCurve>> {
        let n = self.v.len();
        let pts = &self.prob.points;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (k, &(i, j)) in chosen.iter().enumerate() {
            let mut r = vec![Rational::zero(); n];
            r[i] += rat(1);
            r[j] -= rat(1);
            rows.push(r);
            rhs.push(dot_q(self.v[j], &pts[k]) - dot_q(self.v[i], &pts[k]));
        }
        for q in paras {
            let mut r = vec![Rational::zero(); n];
            r[q[0]] += rat(1);
            r[q[2]] += rat(1);
            r[q[1]] -= rat(1);
            r[q[3]] -= rat(1);
            rows.push(r);
            rhs.push(Rational::zero());
        }
        let mut gauge = vec![Rational::zero(); n];
        gauge[0] = rat(1);
        rows.push(gauge);
        rhs.push(Rational::zero());
        match linalg::solve(&rows, &rhs, n) {
            LinearSolution::Inconsistent => Ok(None),
            LinearSolution::Unique(c) => match self.realize(&c, chosen, paras)? {
                Some((_, true)) => Err(Error::NonGeneric("a constraint point lies on a vertex".into())),
                Some((curve, false)) => Ok(Some(curve)),
                None => Ok(None),
            },
            LinearSolution::Family { .. } => {
                // a family is harmless unless a strictly feasible member is a curve
                let eqs: Vec<LinearConstraint> =
                    rows.into_iter().zip(rhs).map(|(r, b)| LinearConstraint::new(r, Relation::Eq, b)).collect();
                let mut strict = Vec::new();
                for (k, &(i, j)) in chosen.iter().enumerate() {
                    for m in (0..n).filter(|&m| m != i && m != j) {
                        let mut r = vec![Rational::zero(); n];
                        r[i] += rat(1);
                        r[m] -= rat(1);
                        strict.push(LinearConstraint::new(
                            r,
                            Relation::Ge,
                            dot_q(self.v[m], &pts[k]) - dot_q(self.v[i], &pts[k]),
                        ));
                    }
                }
                let Some(c) = lp::strict_feasible_point(n, &eqs, &strict) else { return Ok(None) };
                match self.realize(&c, chosen, paras) {
                    Ok(Some(_)) | Err(Error::NonGeneric(_)) => {
                        Err(Error::NonGeneric("constraint points admit a positive-dimensional family of curves".into()))
                    }
                    Ok(None) => Ok(None),
                    Err(e) => Err(e),
                }
            }
        }
    }

    /// Curve of the tropical polynomial with coefficients `c`, provided it
    /// has the searched shape; the flag reports ties at constraint points.
    fn realize(&self, c: &[Rational], chosen: &[(usize, usize)], paras: &[&[usize; 4]]) -> Result<Option<(RigidCurve, bool)>> {
        let n = self.v.len();
        let pts = &self.prob.points;
        let mut tie = false;
        for (k, &(i, j)) in chosen.iter().enumerate() {
            let top = &c[i] + dot_q(self.v[i], &pts[k]);
            for m in (0..n).filter(|&m| m != i && m != j) {
                let val = &c[m] + dot_q(self.v[m], &pts[k]);
                if val > top {
                    return Ok(None);
                }
                tie |= val == top;
            }
        }
        let cells = regular_subdivision(&self.v, c);
        let mut covered = vec![false; n];
        for cell in &cells {
            if cell.on.len() != cell.hull.len() {
                return Ok(None);
            }
            for &h in &cell.hull {
                covered[h] = true;
            }
        }
        if covered.iter().any(|&x| !x) {
            return Ok(None);
        }
        let para_sets: Vec<BTreeSet<usize>> = paras.iter().map(|q| q.iter().copied().collect()).collect();
        let mut kinds = Vec::with_capacity(cells.len());
        let mut npar = 0;
        let mut odd = false;
        for cell in &cells {
            let set: BTreeSet<usize> = cell.hull.iter().copied().collect();
            let kind = match cell.hull.len() {
                3 => CellKind::Triangle,
                4 if para_sets.contains(&set) => {
                    npar += 1;
                    CellKind::Parallelogram
                }
                _ => {
                    odd = true;
                    CellKind::Other
                }
            };
            kinds.push(kind);
        }
        if npar != self.npar {
            return Ok(None);
        }
        if odd {
            return Err(Error::NonGeneric("a dual cell is neither a triangle nor a parallelogram".into()));
        }
        let curve = self.build_curve(&cells, &kinds, chosen)?;
        Ok(Some((curve, tie)))
    }

    fn build_curve(&self, cells: &[Cell], kinds: &[CellKind], chosen: &[(usize, usize)]) -> Result<RigidCurve> {
        let v = &self.v;
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let mut sides: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (ci, cell) in cells.iter().enumerate() {
            let h = &cell.hull;
            for t in 0..h.len() {
                sides.entry(key(h[t], h[(t + 1) % h.len()])).or_default().push(ci);
            }
        }
        let mut vertex_of = vec![None; cells.len()];
        let mut vertices = Vec::new();
        for (ci, cell) in cells.iter().enumerate() {
            if kinds[ci] == CellKind::Triangle {
                vertex_of[ci] = Some(vertices.len());
                vertices.push(Vertex { pos: cell.x.to_vec(), genus: 0, cell: 0 });
            }
        }
        let mut owner: BTreeMap<(usize, usize), EdgeRef> = BTreeMap::new();
        let mut edges = Vec::new();
        let mut ends = Vec::new();
        for (ci, cell) in cells.iter().enumerate() {
            let Some(vt) = vertex_of[ci] else { continue };
            for t in 0..3 {
                let start = key(cell.hull[t], cell.hull[(t + 1) % 3]);
                if owner.contains_key(&start) {
                    continue;
                }
                let mut chain = vec![start];
                let (mut cur_cell, mut cur_side) = (ci, start);
                let found = loop {
                    let other = sides[&cur_side].iter().copied().find(|&o| o != cur_cell);
                    match other {
                        None => {
                            let (a, b) = cur_side;
                            let s = sub(v[b], v[a]);
                            let mut nrm = [s[1], -s[0]];
                            let q = *cells[cur_cell].hull.iter().find(|&&q| q != a && q != b).unwrap();
                            let inward = sub(v[q], v[a]);
                            if nrm[0] * inward[0] + nrm[1] * inward[1] > 0 {
                                nrm = [-nrm[0], -nrm[1]];
                            }
                            ends.push(End { v: vt, d: nrm.to_vec() });
                            break EdgeRef::End(ends.len() - 1);
                        }
                        Some(o) => match kinds[o] {
                            CellKind::Triangle => {
                                let vo = vertex_of[o].unwrap();
                                edges.push(dual_edge(v, start, vt, vo, &cells[ci].x, &cells[o].x)?);
                                break EdgeRef::Edge(edges.len() - 1);
                            }
                            _ => {
                                let h = &cells[o].hull;
                                let pos = (0..4).find(|&t| key(h[t], h[(t + 1) % 4]) == cur_side).unwrap();
                                let opp = key(h[(pos + 2) % 4], h[(pos + 3) % 4]);
                                chain.push(opp);
                                cur_cell = o;
                                cur_side = opp;
                            }
                        },
                    }
                };
                for s in chain {
                    owner.insert(s, found);
                }
            }
        }
        if owner.len() != sides.len() {
            return Err(Error::InvalidProblem("a curve component has no trivalent vertex".into()));
        }
        let marks = chosen
            .iter()
            .zip(&self.prob.points)
            .map(|(&(i, j), p)| {
                let on = *owner
                    .get(&key(i, j))
                    .ok_or_else(|| Error::InvalidCurve("constraint point off the dual edges".into()))?;
                Ok(Mark { point: p.to_vec(), on })
            })
            .collect::<Result<Vec<_>>>()?;
        let curve = TropicalCurve { vertices, edges, ends };
        if !curve.check_balanced() {
            return Err(Error::InvalidCurve("reconstructed curve is unbalanced".into()));
        }
        if curve.genus()? != self.prob.genus {
            return Err(Error::InvalidCurve("reconstructed curve has the wrong genus".into()));
        }
        Ok(RigidCurve { curve, marks })
    }
}

fn dual_edge(v: &[Lat], side: (usize, usize), t: usize, h: usize, xt: &Point, xh: &Point) -> Result<Edge> {
    let s = sub(v[side.1], v[side.0]);
    let rot = [-s[1], s[0]];
    let diff = [&xh[0] - &xt[0], &xh[1] - &xt[1]];
    let lambda = if rot[0] != 0 { &diff[0] / rat(rot[0]) } else { &diff[1] / rat(rot[1]) };
    if diff[0] != &lambda * rat(rot[0]) || diff[1] != &lambda * rat(rot[1]) {
        return Err(Error::InvalidCurve("dual edge is not orthogonal to its side".into()));
    }
    if lambda.is_zero() {
        return Err(Error::NonGeneric("an edge has length zero".into()));
    }
    let sign = if lambda.is_positive() { 1 } else { -1 };
    Ok(Edge { v: [t, h], len: lambda.abs(), d: vec![sign * rot[0], sign * rot[1]] })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CellKind {
    Triangle,
    Parallelogram,
    Other,
}

#[derive(Clone, Debug)]
struct Cell {
    /// Points on the supporting plane.
    on: Vec<usize>,
    /// Counter-clockwise convex hull of `on`.
    hull: Vec<usize>,
    /// Dual vertex.
    x: Point,
}

/// Upper-hull cells of the lift `m ↦ (m, c_m)`, each with its dual vertex.
fn regular_subdivision(v: &[Lat], c: &[Rational]) -> Vec<Cell> {
    let n = v.len();
    let mut cells: BTreeMap<Vec<usize>, Point> = BTreeMap::new();
    for (a, b, d) in (0..n).tuple_combinations() {
        let (u, w) = (sub(v[b], v[a]), sub(v[d], v[a]));
        let det = cross(u, w);
        if det == 0 {
            continue;
        }
        let (zu, zw) = (&c[b] - &c[a], &c[d] - &c[a]);
        let gx = (&zu * rat(w[1]) - &zw * rat(u[1])) / rat(det);
        let gy = (&zw * rat(u[0]) - &zu * rat(w[0])) / rat(det);
        let mut on = Vec::new();
        let mut ok = true;
        for m in 0..n {
            let h = &c[a] + &gx * rat(v[m][0] - v[a][0]) + &gy * rat(v[m][1] - v[a][1]);
            if c[m] > h {
                ok = false;
                break;
            }
            if c[m] == h {
                on.push(m);
            }
        }
        if ok {
            cells.entry(on).or_insert_with(|| [-gx, -gy]);
        }
    }
    cells.into_iter().map(|(on, x)| Cell { hull: convex_hull(v, &on), on, x }).collect()
}

/// Monotone chain hull without collinear points, counter-clockwise.
fn convex_hull(v: &[Lat], idx: &[usize]) -> Vec<usize> {
    let mut p: Vec<usize> = idx.to_vec();
    p.sort_by_key(|&i| v[i]);
    p.dedup_by_key(|i| v[*i]);
    if p.len() < 3 {
        return p;
    }
    let turn = |o: usize, a: usize, b: usize| cross(sub(v[a], v[o]), sub(v[b], v[o]));
    let mut lower: Vec<usize> = Vec::new();
    for &i in &p {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], i) <= 0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in p.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], i) <= 0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// All rigid curves of the problem's degree and genus through its points,
/// in canonical order.
pub fn enumerate_rigid_curves(prob: &CountingProblem) -> Result<Vec<RigidCurve>> {
    let poly = newton_polygon(&prob.ends)?;
    let g = prob.genus as usize;
    let mut out = Vec::new();
    for s in g..=poly.interior.len() {
        for chosen in poly.interior.iter().combinations(s) {
            let mut v = poly.breakpoints.clone();
            v.extend(chosen.into_iter().copied());
            let search = Search::new(prob, v, s - g)?;
            out.extend(search.run()?);
        }
    }
    out.sort_by_cached_key(|c| serde_json::to_string(&c.curve).expect("curves serialize"));
    out.dedup_by(|a, b| a.curve == b.curve);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Counting

/// `|det(d₁, d₂)|` of a trivalent balanced plane star.
pub fn plane_vertex_multiplicity(star: &VertexStar) -> Result<u64> {
    if star.pos.len() != 2 || star.ends.len() != 3 || star.ends.iter().any(|d| d.len() != 2) {
        return Err(Error::NotTrivalent(format!("{} ends in dimension {}", star.ends.len(), star.pos.len())));
    }
    if !star.is_balanced() {
        return Err(Error::NotTrivalent("star is not balanced".into()));
    }
    let (a, b) = (&star.ends[0], &star.ends[1]);
    Ok((a[0] * b[1] - a[1] * b[0]).unsigned_abs())
}

/// Weight attached to a vertex star.
pub trait LocalContributionOracle {
    fn weight(&self, star: &VertexStar) -> Result<Rational>;
}

impl<F: Fn(&VertexStar) -> Result<Rational>> LocalContributionOracle for F {
    fn weight(&self, star: &VertexStar) -> Result<Rational> {
        self(star)
    }
}

/// The default oracle: lattice multiplicity of a trivalent plane vertex.
#[derive(Clone, Copy, Debug, Default)]
pub struct LatticeMultiplicity;

impl LocalContributionOracle for LatticeMultiplicity {
    fn weight(&self, star: &VertexStar) -> Result<Rational> {
        Ok(Rational::from_integer(BigInt::from(plane_vertex_multiplicity(star)?)))
    }
}

/// Product of the local weights over the cut stars.
pub fn oracle_product(curve: &TropicalCurve, oracle: &dyn LocalContributionOracle) -> Result<Rational> {
    curve.cut().iter().try_fold(Rational::one(), |acc, s| Ok(acc * oracle.weight(s)?))
}

/// Solves for vertex positions from the cut stars: each internal edge keeps
/// its endpoints on one line, each constraint point sits on the line of its
/// edge or end. Fails unless the solution is unique and matches `rc`.
pub fn solve_cut_system(rc: &RigidCurve) -> Result<Vec<Point>> {
    let c = &rc.curve;
    let nv = c.vertices.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let normal = |d: &[i64]| [-d[1], d[0]];
    for e in &c.edges {
        let n = normal(&e.d);
        let mut r = vec![Rational::zero(); 2 * nv];
        for k in 0..2 {
            r[2 * e.v[1] + k] += rat(n[k]);
            r[2 * e.v[0] + k] -= rat(n[k]);
        }
        rows.push(r);
        rhs.push(Rational::zero());
    }
    for mk in &rc.marks {
        let (u, d) = match mk.on {
            EdgeRef::Edge(i) => (c.edges[i].v[0], &c.edges[i].d),
            EdgeRef::End(i) => (c.ends[i].v, &c.ends[i].d),
        };
        let n = normal(d);
        let mut r = vec![Rational::zero(); 2 * nv];
        r[2 * u] = rat(n[0]);
        r[2 * u + 1] = rat(n[1]);
        rows.push(r);
        rhs.push(&mk.point[0] * rat(n[0]) + &mk.point[1] * rat(n[1]));
    }
    let x = match linalg::solve(&rows, &rhs, 2 * nv) {
        LinearSolution::Unique(x) => x,
        LinearSolution::Family { .. } => return Err(Error::CutSystem("vertex positions are not determined".into())),
        LinearSolution::Inconsistent => return Err(Error::CutSystem("no vertex positions satisfy the cut".into())),
    };
    let pos: Vec<Point> = (0..nv).map(|v| [x[2 * v].clone(), x[2 * v + 1].clone()]).collect();
    if pos.iter().zip(&c.vertices).any(|(p, v)| p[..] != v.pos[..]) {
        return Err(Error::CutSystem("solved positions differ from the curve".into()));
    }
    Ok(pos)
}

/// Ways of pairing the cut ends back into the internal edges of the curve,
/// edges with identical data taken as interchangeable and ends labelled.
pub fn labeled_gluings(rc: &RigidCurve, pos: &[Point]) -> u64 {
    let c = &rc.curve;
    let stars = c.cut();
    let mut used: Vec<Vec<bool>> = stars.iter().map(|s| vec![false; s.ends.len()]).collect();
    fn go(c: &TropicalCurve, stars: &[VertexStar], pos: &[Point], used: &mut Vec<Vec<bool>>, i: usize) -> u64 {
        let Some(e) = c.edges.get(i) else { return 1 };
        let (t, h) = (e.v[0], e.v[1]);
        let neg: Vec<i64> = e.d.iter().map(|x| -x).collect();
        // the head must lie on the ray from the tail along d
        let diff = [&pos[h][0] - &pos[t][0], &pos[h][1] - &pos[t][1]];
        let along = &diff[0] * rat(e.d[0]) + &diff[1] * rat(e.d[1]);
        let perp = &diff[0] * rat(e.d[1]) - &diff[1] * rat(e.d[0]);
        if !perp.is_zero() || !along.is_positive() {
            return 0;
        }
        let mut total = 0;
        for a in 0..stars[t].ends.len() {
            if used[t][a] || stars[t].ends[a] != e.d {
                continue;
            }
            used[t][a] = true;
            for b in 0..stars[h].ends.len() {
                if used[h][b] || stars[h].ends[b] != neg {
                    continue;
                }
                used[h][b] = true;
                total += go(c, stars, pos, used, i + 1);
                used[h][b] = false;
            }
            used[t][a] = false;
        }
        total
    }
    let sequences = go(c, &stars, pos, &mut used, 0);
    let mut edge_classes: BTreeMap<(usize, usize, Vec<i64>, Rational), u64> = BTreeMap::new();
    for e in &c.edges {
        let k = if e.v[0] <= e.v[1] {
            (e.v[0], e.v[1], e.d.clone(), e.len.clone())
        } else {
            (e.v[1], e.v[0], e.d.iter().map(|x| -x).collect(), e.len.clone())
        };
        *edge_classes.entry(k).or_insert(0) += 1;
    }
    let mut end_classes: BTreeMap<(usize, Vec<i64>), u64> = BTreeMap::new();
    for e in &c.ends {
        *end_classes.entry((e.v, e.d.clone())).or_insert(0) += 1;
    }
    let fact = |n: u64| (1..=n).product::<u64>();
    let unordered = sequences / edge_classes.values().map(|&n| fact(n)).product::<u64>();
    unordered * end_classes.values().map(|&n| fact(n)).product::<u64>()
}

/// One curve type's bookkeeping in both pipelines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub type_hash: String,
    pub k_gamma: u64,
    pub aut: u64,
    pub labeled_gluings: u64,
    /// Labeled gluings with each diagonal point weighted by `1/m_e`.
    #[serde(with = "serde_q")]
    pub matching: Rational,
    #[serde(with = "serde_q")]
    pub multiplicity: Rational,
    #[serde(with = "serde_q")]
    pub contribution: Rational,
    #[serde(with = "serde_q")]
    pub direct: Rational,
}

impl LedgerEntry {
    pub fn balanced(&self) -> bool {
        self.contribution == self.direct
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountedCurve {
    pub curve: RigidCurve,
    pub ledger: LedgerEntry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    #[serde(with = "serde_q")]
    pub direct: Rational,
    #[serde(with = "serde_q")]
    pub glued: Rational,
    pub curves: Vec<CountedCurve>,
}

pub fn ledger_entry(rc: &RigidCurve, oracle: &dyn LocalContributionOracle) -> Result<LedgerEntry> {
    let multiplicity = oracle_product(&rc.curve, oracle)?;
    let pos = solve_cut_system(rc)?;
    let labeled = labeled_gluings(rc, &pos);
    let k_gamma = rc.curve.k_factor(false)?;
    let aut = rc.curve.automorphism_order()?;
    let matching = Rational::new(BigInt::from(labeled), BigInt::from(k_gamma));
    let contribution = Rational::new(BigInt::from(k_gamma), BigInt::from(aut)) * &matching * &multiplicity;
    Ok(LedgerEntry {
        type_hash: rc.type_hash(),
        k_gamma,
        aut,
        labeled_gluings: labeled,
        matching,
        direct: multiplicity.clone(),
        multiplicity,
        contribution,
    })
}

/// Both pipelines over the enumerated curves.
pub fn count(prob: &CountingProblem, oracle: &dyn LocalContributionOracle) -> Result<CountReport> {
    let curves = enumerate_rigid_curves(prob)?;
    let mut direct = Rational::zero();
    let mut glued = Rational::zero();
    let mut out = Vec::with_capacity(curves.len());
    for rc in curves {
        let ledger = ledger_entry(&rc, oracle)?;
        direct += &ledger.direct;
        glued += &ledger.contribution;
        out.push(CountedCurve { curve: rc, ledger });
    }
    Ok(CountReport { direct, glued, curves: out })
}

pub fn direct_count(prob: &CountingProblem, oracle: &dyn LocalContributionOracle) -> Result<Rational> {
    enumerate_rigid_curves(prob)?
        .iter()
        .try_fold(Rational::zero(), |acc, rc| Ok(acc + oracle_product(&rc.curve, oracle)?))
}

pub fn glued_count(prob: &CountingProblem, oracle: &dyn LocalContributionOracle) -> Result<Rational> {
    enumerate_rigid_curves(prob)?
        .iter()
        .try_fold(Rational::zero(), |acc, rc| Ok(acc + ledger_entry(rc, oracle)?.contribution))
}

/// Multiplicity of each edge, for reports.
pub fn edge_weights(c: &TropicalCurve) -> Vec<u64> {
    c.edges.iter().map(|e| edge_multiplicity(&e.d)).collect()
}

// ---------------------------------------------------------------------------
// Series

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SeriesKey {
    pub genus: u32,
    pub n: usize,
    pub degree: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GWSeries {
    terms: BTreeMap<SeriesKey, Rational>,
}

#[derive(Serialize, Deserialize)]
struct SeriesTerm {
    #[serde(flatten)]
    key: SeriesKey,
    #[serde(with = "serde_q")]
    weight: Rational,
}

impl GWSeries {
    pub fn add(&mut self, key: SeriesKey, w: Rational) {
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += w;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn merge(&mut self, other: &GWSeries) {
        for (k, w) in &other.terms {
            self.add(k.clone(), w.clone());
        }
    }

    pub fn get(&self, key: &SeriesKey) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SeriesKey, &Rational)> {
        self.terms.iter()
    }
}

impl Serialize for GWSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<SeriesTerm> =
            self.terms.iter().map(|(k, w)| SeriesTerm { key: k.clone(), weight: w.clone() }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GWSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<SeriesTerm>::deserialize(d)?;
        Ok(assemble_series(v.into_iter().map(|t| (t.key, t.weight))))
    }
}

pub fn assemble_series(results: impl IntoIterator<Item = (SeriesKey, Rational)>) -> GWSeries {
    let mut s = GWSeries::default();
    for (k, w) in results {
        s.add(k, w);
    }
    s
}
