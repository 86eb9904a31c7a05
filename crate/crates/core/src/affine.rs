//! Integral-affine polytopes `{x ∈ ℝ^m : x·α + a ≥ 0 (or > 0)}` with
//! integer normals and rational offsets, their faces, local cones,
//! unimodular equivalences, subdivisions and smooth-monomial monoids.

use std::collections::{BTreeSet, HashSet, VecDeque};

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, LinearSolution};
use crate::lp::{self, LinearConstraint, LpOutcome, Relation};
use crate::rational::{dot_int, format_rational, gcd_slice, rat, serde_q, Rational};

/// Bound on the number of lattice points visited per simplicial cone when
/// enumerating Hilbert basis candidates.
pub const HILBERT_SEARCH_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineConstraint {
    pub alpha: Vec<i64>,
    #[serde(with = "serde_q")]
    pub a: Rational,
    #[serde(default)]
    pub strict: bool,
}

impl AffineConstraint {
    pub fn new(alpha: Vec<i64>, a: Rational, strict: bool) -> Result<Self> {
        if alpha.iter().all(|&x| x == 0) {
            return Err(Error::InvalidConstraint("zero normal vector".into()));
        }
        Ok(Self { alpha, a, strict })
    }

    /// `α·x + a ≥ 0`, panicking on a zero normal. For literals in tests and
    /// fixed constructions.
    pub fn ge(alpha: &[i64], a: Rational) -> Self {
        Self::new(alpha.to_vec(), a, false).expect("nonzero normal")
    }

    pub fn gt(alpha: &[i64], a: Rational) -> Self {
        Self::new(alpha.to_vec(), a, true).expect("nonzero normal")
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        dot_int(&self.alpha, x) + &self.a
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let v = self.value(x);
        if self.strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    }

    fn as_lp(&self) -> LinearConstraint {
        LinearConstraint::new(
            self.alpha.iter().map(|&x| rat(x)).collect(),
            Relation::Ge,
            -self.a.clone(),
        )
    }

    /// Same half-space with a primitive normal.
    pub fn normalized(&self) -> Self {
        let g = gcd_slice(&self.alpha);
        Self {
            alpha: self.alpha.iter().map(|x| x / g).collect(),
            a: &self.a / rat(g),
            strict: self.strict,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolytopeRepr")]
pub struct Polytope {
    pub dim: usize,
    pub constraints: Vec<AffineConstraint>,
}

#[derive(Deserialize)]
struct PolytopeRepr {
    dim: usize,
    #[serde(default)]
    constraints: Vec<AffineConstraint>,
}

impl TryFrom<PolytopeRepr> for Polytope {
    type Error = Error;
    fn try_from(r: PolytopeRepr) -> Result<Self> {
        for c in &r.constraints {
            if c.alpha.iter().all(|&x| x == 0) {
                return Err(Error::InvalidConstraint("zero normal vector".into()));
            }
        }
        Polytope::new(r.dim, r.constraints)
    }
}

/// A face of the closure of a polytope. `tight` lists the constraints that
/// vanish identically on it; points are `origin + Σ yᵢ basis[i]` with `y` in
/// `polytope`, whose dimension is the face dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub tight: Vec<usize>,
    pub dim: usize,
    #[serde(with = "serde_q::vec")]
    pub origin: Vec<Rational>,
    pub basis: Vec<Vec<i64>>,
    pub polytope: Polytope,
}

impl Face {
    pub fn point(&self, y: &[Rational]) -> Vec<Rational> {
        let mut p = self.origin.clone();
        for (yi, row) in y.iter().zip(&self.basis) {
            for (pj, &r) in p.iter_mut().zip(row) {
                *pj += yi * rat(r);
            }
        }
        p
    }

    pub fn contains_face(&self, other: &Face) -> bool {
        self.tight.iter().all(|t| other.tight.contains(t))
    }
}

impl Polytope {
    pub fn new(dim: usize, constraints: Vec<AffineConstraint>) -> Result<Self> {
        for c in &constraints {
            if c.alpha.len() != dim {
                return Err(Error::Dimension(format!(
                    "constraint normal of length {} in dimension {dim}",
                    c.alpha.len()
                )));
            }
        }
        Ok(Self { dim, constraints })
    }

    /// ℝ^m.
    pub fn whole(dim: usize) -> Self {
        Self { dim, constraints: Vec::new() }
    }

    /// `[0,∞)^m`.
    pub fn orthant(dim: usize) -> Self {
        let constraints = (0..dim)
            .map(|i| AffineConstraint::ge(&unit(dim, i), Rational::zero()))
            .collect();
        Self { dim, constraints }
    }

    /// `[lo, hi] ⊂ ℝ`.
    pub fn interval(lo: Rational, hi: Rational) -> Self {
        Self {
            dim: 1,
            constraints: vec![AffineConstraint::ge(&[1], -lo), AffineConstraint::ge(&[-1], hi)],
        }
    }

    /// `[lo, hi]^m`.
    pub fn cube(dim: usize, lo: Rational, hi: Rational) -> Self {
        let mut constraints = Vec::new();
        for i in 0..dim {
            let e = unit(dim, i);
            constraints.push(AffineConstraint::ge(&e, -lo.clone()));
            constraints.push(AffineConstraint::ge(&e.iter().map(|x| -x).collect::<Vec<_>>(), hi.clone()));
        }
        Self { dim, constraints }
    }

    /// The cone generated by integer `rays`, which must span ℝ^m.
    pub fn cone_from_rays(dim: usize, rays: &[Vec<i64>]) -> Result<Self> {
        if rays.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("ray length differs from dimension".into()));
        }
        if linalg::rank_int(rays) != dim {
            return Err(Error::InvalidConstraint("rays do not span the ambient space".into()));
        }
        let facets = cone_facet_normals(dim, rays);
        Ok(Self {
            dim,
            constraints: facets
                .into_iter()
                .map(|n| AffineConstraint::ge(&n, Rational::zero()))
                .collect(),
        })
    }

    pub fn closure(&self) -> Self {
        let mut p = self.clone();
        for c in p.constraints.iter_mut() {
            c.strict = false;
        }
        p
    }

    pub fn with_constraints(&self, extra: impl IntoIterator<Item = AffineConstraint>) -> Self {
        let mut p = self.clone();
        p.constraints.extend(extra);
        p
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim && self.constraints.iter().all(|c| c.holds(x))
    }

    fn lp_system(&self) -> (Vec<LinearConstraint>, Vec<LinearConstraint>) {
        let mut ns = Vec::new();
        let mut st = Vec::new();
        for c in &self.constraints {
            if c.strict {
                st.push(c.as_lp());
            } else {
                ns.push(c.as_lp());
            }
        }
        (ns, st)
    }

    fn closure_system(&self) -> Vec<LinearConstraint> {
        self.constraints.iter().map(AffineConstraint::as_lp).collect()
    }

    /// A point of the polytope itself (respecting strictness).
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let (ns, st) = self.lp_system();
        lp::strict_feasible_point(self.dim, &ns, &st)
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    /// A point where every constraint holds strictly.
    pub fn interior_point(&self) -> Option<Vec<Rational>> {
        lp::strict_feasible_point(self.dim, &[], &self.closure_system())
    }

    pub fn has_nonempty_interior(&self) -> bool {
        self.interior_point().is_some()
    }

    /// Minimizes `α·x + a` over the closure.
    pub fn minimize(&self, alpha: &[i64], a: &Rational) -> LpOutcome {
        let obj: Vec<Rational> = alpha.iter().map(|&x| rat(x)).collect();
        match lp::minimize(self.dim, &obj, &self.closure_system()) {
            LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: value + a, point },
            other => other,
        }
    }

    pub fn maximize(&self, alpha: &[i64], a: &Rational) -> LpOutcome {
        let obj: Vec<Rational> = alpha.iter().map(|&x| rat(x)).collect();
        match lp::maximize(self.dim, &obj, &self.closure_system()) {
            LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: value + a, point },
            other => other,
        }
    }

    /// Whether `α·x + a ≥ 0` (or `> 0` when `strict`) on the whole polytope.
    pub fn implies(&self, alpha: &[i64], a: &Rational, strict: bool) -> bool {
        let (ns, mut st) = self.lp_system();
        let neg: Vec<Rational> = alpha.iter().map(|&x| rat(-x)).collect();
        let mut ns = ns;
        // violation: α·x + a < 0 (non-strict target) or ≤ 0 (strict target)
        let viol = LinearConstraint::new(neg, Relation::Ge, a.clone());
        if strict {
            ns.push(viol);
        } else {
            st.push(viol);
        }
        lp::strict_feasible_point(self.dim, &ns, &st).is_none()
    }

    pub fn contains_polytope(&self, inner: &Polytope) -> bool {
        self.dim == inner.dim
            && self.constraints.iter().all(|c| inner.implies(&c.alpha, &c.a, c.strict))
    }

    pub fn same_set(&self, other: &Polytope) -> bool {
        self.contains_polytope(other) && other.contains_polytope(self)
    }

    pub fn is_bounded(&self) -> bool {
        (0..self.dim).all(|i| {
            let e = unit(self.dim, i);
            let neg: Vec<i64> = e.iter().map(|x| -x).collect();
            !matches!(self.maximize(&e, &Rational::zero()), LpOutcome::Unbounded)
                && !matches!(self.maximize(&neg, &Rational::zero()), LpOutcome::Unbounded)
        })
    }

    /// Complete (closed) iff every strict constraint is bounded away from
    /// zero on the closure, so dropping its strictness changes nothing.
    pub fn is_complete(&self) -> bool {
        let closure = self.closure();
        if closure.feasible_point().is_none() {
            return true;
        }
        self.constraints.iter().filter(|c| c.strict).all(|c| {
            closure.implies(&c.alpha, &c.a, true)
        })
    }

    /// Constraints vanishing identically on the closure intersected with
    /// `{c_i = 0 : i ∈ eq}`; `None` if that set is empty.
    fn tight_closure(&self, eq: &[usize]) -> Option<Vec<usize>> {
        let mut sys = self.closure_system();
        for &i in eq {
            sys[i].rel = Relation::Eq;
        }
        let x = lp::feasible_point(self.dim, &sys)?;
        let mut tight = Vec::new();
        for (j, c) in self.constraints.iter().enumerate() {
            if eq.contains(&j) {
                tight.push(j);
                continue;
            }
            if !c.value(&x).is_zero() {
                continue;
            }
            let obj: Vec<Rational> = c.alpha.iter().map(|&v| rat(v)).collect();
            if let LpOutcome::Optimal { value, .. } = lp::maximize(self.dim, &obj, &sys) {
                if (value + &c.a).is_zero() {
                    tight.push(j);
                }
            }
        }
        Some(tight)
    }

    fn face_from_tight(&self, tight: Vec<usize>) -> Face {
        let rows: Vec<Vec<i64>> = tight.iter().map(|&i| self.constraints[i].alpha.clone()).collect();
        let basis = linalg::kernel_basis(&rows, self.dim);
        let origin = if rows.is_empty() {
            vec![Rational::zero(); self.dim]
        } else {
            let a = linalg::to_q(&rows);
            let b: Vec<Rational> = tight.iter().map(|&i| -self.constraints[i].a.clone()).collect();
            match linalg::solve(&a, &b, self.dim) {
                LinearSolution::Unique(x) => x,
                LinearSolution::Family { particular, .. } => particular,
                LinearSolution::Inconsistent => unreachable!("tight set of a nonempty face"),
            }
        };
        let dim = basis.len();
        let mut constraints = Vec::new();
        for (j, c) in self.constraints.iter().enumerate() {
            if tight.contains(&j) {
                continue;
            }
            let alpha: Vec<i64> = basis
                .iter()
                .map(|k| k.iter().zip(&c.alpha).map(|(x, y)| x * y).sum())
                .collect();
            if alpha.iter().all(|&x| x == 0) {
                continue;
            }
            constraints.push(AffineConstraint { alpha, a: c.value(&origin), strict: c.strict });
        }
        Face { tight, dim, origin, basis, polytope: Polytope { dim, constraints } }
    }

    /// All nonempty faces of the closure, sorted by dimension then tight set.
    pub fn faces(&self) -> Vec<Face> {
        let Some(top) = self.tight_closure(&[]) else { return Vec::new() };
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(top.clone());
        queue.push_back(top);
        let mut out = Vec::new();
        while let Some(t) = queue.pop_front() {
            for j in 0..self.constraints.len() {
                if t.contains(&j) {
                    continue;
                }
                let mut eq = t.clone();
                eq.push(j);
                eq.sort_unstable();
                if let Some(t2) = self.tight_closure(&eq) {
                    if seen.insert(t2.clone()) {
                        queue.push_back(t2);
                    }
                }
            }
            out.push(self.face_from_tight(t));
        }
        out.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.tight.cmp(&b.tight)));
        out
    }

    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        self.faces().into_iter().filter(|f| f.dim == 0).map(|f| f.origin).collect()
    }

    /// Lebesgue volume of the closure; `None` when unbounded.
    pub fn volume(&self) -> Option<Rational> {
        if !self.is_bounded() {
            return None;
        }
        if !self.has_nonempty_interior() {
            return Some(Rational::zero());
        }
        let faces = self.closure().faces();
        let vertices: Vec<usize> = (0..faces.len()).filter(|&i| faces[i].dim == 0).collect();
        let top = faces.len() - 1;
        let mut total = Rational::zero();
        for simplex in pulling_triangulation(&faces, &vertices, top) {
            let v0 = &faces[simplex[0]].origin;
            let m: Vec<Vec<Rational>> = simplex[1..]
                .iter()
                .map(|&i| faces[i].origin.iter().zip(v0).map(|(a, b)| a - b).collect())
                .collect();
            total += linalg::det(&m).abs();
        }
        let fact: i64 = (1..=self.dim as i64).product();
        Some(total / rat(fact))
    }
}

fn unit(dim: usize, i: usize) -> Vec<i64> {
    (0..dim).map(|j| i64::from(i == j)).collect()
}

/// Pulling triangulation of the face `f`, as lists of vertex-face indices.
fn pulling_triangulation(faces: &[Face], vertices: &[usize], f: usize) -> Vec<Vec<usize>> {
    let face = &faces[f];
    if face.dim == 0 {
        return vec![vec![f]];
    }
    let v0 = *vertices
        .iter()
        .find(|&&v| face.contains_face(&faces[v]))
        .expect("bounded face has a vertex");
    let mut out = Vec::new();
    for (g, sub) in faces.iter().enumerate() {
        if sub.dim + 1 != face.dim || !face.contains_face(sub) || sub.contains_face(&faces[v0]) {
            continue;
        }
        for mut s in pulling_triangulation(faces, vertices, g) {
            s.insert(0, v0);
            out.push(s);
        }
    }
    out
}

/// Primitive inward facet normals of the cone spanned by `rays`.
pub fn cone_facet_normals(dim: usize, rays: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
    for subset in (0..rays.len()).combinations(dim.saturating_sub(1)) {
        let rows: Vec<Vec<i64>> = subset.iter().map(|&i| rays[i].clone()).collect();
        if linalg::rank_int(&rows) + 1 != dim {
            continue;
        }
        let k = linalg::kernel_basis(&rows, dim);
        let n = linalg::primitive(&k[0]);
        let dots: Vec<i64> = rays.iter().map(|r| r.iter().zip(&n).map(|(a, b)| a * b).sum()).collect();
        if dots.iter().all(|&d| d >= 0) {
            out.insert(n);
        } else if dots.iter().all(|&d| d <= 0) {
            out.insert(n.iter().map(|x| -x).collect());
        }
    }
    out.into_iter().collect()
}

/// Cone of the closure at `p`: the constraints tight at `p`, homogenized.
pub fn local_cone(p: &Polytope, x: &[Rational]) -> Result<Polytope> {
    if !p.contains(x) {
        return Err(Error::NotInPolytope(fmt_point(x)));
    }
    let constraints = p
        .constraints
        .iter()
        .filter(|c| c.value(x).is_zero())
        .map(|c| AffineConstraint { alpha: c.alpha.clone(), a: Rational::zero(), strict: false })
        .collect();
    Ok(Polytope { dim: p.dim, constraints })
}

pub fn fmt_point(x: &[Rational]) -> String {
    format!("({})", x.iter().map(format_rational).join(", "))
}

/// Whether `p` is a vertex of `poly`.
pub fn is_vertex(poly: &Polytope, x: &[Rational]) -> bool {
    if !poly.contains(x) {
        return false;
    }
    let rows: Vec<Vec<i64>> = poly
        .constraints
        .iter()
        .filter(|c| c.value(x).is_zero())
        .map(|c| c.alpha.clone())
        .collect();
    linalg::rank_int(&rows) == poly.dim
}

/// Primitive extreme rays of a pointed cone `{x : n_i·x ≥ 0}`.
pub fn cone_rays(dim: usize, normals: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
    for subset in (0..normals.len()).combinations(dim.saturating_sub(1)) {
        let rows: Vec<Vec<i64>> = subset.iter().map(|&i| normals[i].clone()).collect();
        if linalg::rank_int(&rows) + 1 != dim {
            continue;
        }
        let k = linalg::kernel_basis(&rows, dim);
        let r = linalg::primitive(&k[0]);
        let dots: Vec<i64> = normals.iter().map(|n| n.iter().zip(&r).map(|(a, b)| a * b).sum()).collect();
        if dots.iter().all(|&d| d >= 0) {
            out.insert(r);
        } else if dots.iter().all(|&d| d <= 0) {
            out.insert(r.iter().map(|x| -x).collect());
        }
    }
    out.into_iter().collect()
}

/// Whether the polytope near vertex `v` is unimodularly `[0,∞)^m`.
pub fn is_standard_corner(p: &Polytope, v: &[Rational]) -> Result<bool> {
    if !is_vertex(p, v) {
        return Err(Error::NotAVertex(fmt_point(v)));
    }
    let cone = local_cone(p, v)?;
    let normals: Vec<Vec<i64>> = cone.constraints.iter().map(|c| c.alpha.clone()).collect();
    let rays = cone_rays(p.dim, &normals);
    Ok(rays.len() == p.dim && linalg::det_int(&rays).abs() == 1)
}

/// `x ↦ A x + b` with integer `A` (k × m) and rational `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegralAffineMap {
    pub matrix: Vec<Vec<i64>>,
    #[serde(with = "serde_q::vec")]
    pub translation: Vec<Rational>,
    pub source_dim: usize,
}

impl IntegralAffineMap {
    pub fn new(matrix: Vec<Vec<i64>>, translation: Vec<Rational>, source_dim: usize) -> Result<Self> {
        if matrix.len() != translation.len() || matrix.iter().any(|r| r.len() != source_dim) {
            return Err(Error::Dimension("affine map shape".into()));
        }
        Ok(Self { matrix, translation, source_dim })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            matrix: (0..m).map(|i| unit(m, i)).collect(),
            translation: vec![Rational::zero(); m],
            source_dim: m,
        }
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .zip(&self.translation)
            .map(|(row, b)| dot_int(row, x) + b)
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &IntegralAffineMap) -> IntegralAffineMap {
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                (0..inner.source_dim)
                    .map(|j| row.iter().zip(&inner.matrix).map(|(a, r)| a * r[j]).sum())
                    .collect()
            })
            .collect();
        let translation = self.apply(&inner.translation);
        IntegralAffineMap { matrix, translation, source_dim: inner.source_dim }
    }

    pub fn is_unimodular(&self) -> bool {
        self.target_dim() == self.source_dim && linalg::is_unimodular(&self.matrix)
    }

    pub fn is_injective(&self) -> bool {
        linalg::rank_int(&self.matrix) == self.source_dim
    }

    pub fn inverse(&self) -> Option<IntegralAffineMap> {
        if !self.is_unimodular() {
            return None;
        }
        let inv = linalg::inverse(&linalg::to_q(&self.matrix))?;
        let matrix: Vec<Vec<i64>> = inv.iter().map(|r| linalg::to_int_vec(r)).collect::<Option<_>>()?;
        let translation = linalg::mat_vec(&inv, &self.translation).into_iter().map(|x| -x).collect();
        Some(IntegralAffineMap { matrix, translation, source_dim: self.source_dim })
    }

    /// Pull a constraint on the target back along the map.
    pub fn pull_back(&self, c: &AffineConstraint) -> (Vec<i64>, Rational) {
        let alpha = (0..self.source_dim)
            .map(|j| c.alpha.iter().zip(&self.matrix).map(|(a, r)| a * r[j]).sum())
            .collect();
        (alpha, dot_int(&c.alpha, &self.translation) + &c.a)
    }

    /// Whether the image of `p` lies in `q`.
    pub fn maps_into(&self, p: &Polytope, q: &Polytope) -> bool {
        if p.dim != self.source_dim || q.dim != self.target_dim() {
            return false;
        }
        q.constraints.iter().all(|c| {
            let (alpha, a) = self.pull_back(c);
            if alpha.iter().all(|&x| x == 0) {
                p.is_empty() || if c.strict { a.is_positive() } else { !a.is_negative() }
            } else {
                p.implies(&alpha, &a, c.strict)
            }
        })
    }

    /// Image of `p` under a unimodular map.
    pub fn image(&self, p: &Polytope) -> Option<Polytope> {
        let inv = self.inverse()?;
        let constraints = p
            .constraints
            .iter()
            .map(|c| {
                let (alpha, a) = inv.pull_back(c);
                AffineConstraint { alpha, a, strict: c.strict }
            })
            .collect();
        Some(Polytope { dim: p.dim, constraints })
    }
}

/// Facets of a full-dimensional polytope as (primitive normal, offset,
/// strict), sorted.
fn facet_list(p: &Polytope) -> Vec<(Vec<i64>, Rational, bool)> {
    let mut out = Vec::new();
    for f in p.faces().iter().filter(|f| f.dim + 1 == p.dim) {
        let c = p.constraints[f.tight[0]].normalized();
        let strict = f.tight.iter().any(|&i| p.constraints[i].strict);
        out.push((c.alpha, c.a, strict));
    }
    out.sort();
    out
}

/// Splits off the lineality space: returns `u` unimodular and the pointed
/// part in the first `r` coordinates of `z = u⁻¹ x`.
fn split_lineality(p: &Polytope) -> (Vec<Vec<i64>>, Polytope) {
    let normals: Vec<Vec<i64>> = p.constraints.iter().map(|c| c.alpha.clone()).collect();
    let (h, u, r) = linalg::column_reduce(&normals, p.dim);
    let constraints = p
        .constraints
        .iter()
        .zip(&h)
        .map(|(c, row)| AffineConstraint { alpha: row[..r].to_vec(), a: c.a.clone(), strict: c.strict })
        .collect();
    (u, Polytope { dim: r, constraints })
}

/// A unimodular `f` with `f(p) = q`, if one exists. Searches over
/// matchings of facet normals; exhaustive for the polytopes used here
/// (up to 12 facets).
pub fn integral_affine_iso(p: &Polytope, q: &Polytope) -> Option<IntegralAffineMap> {
    if p.dim != q.dim {
        return None;
    }
    let m = p.dim;
    let (up, pp) = split_lineality(p);
    let (uq, qq) = split_lineality(q);
    if pp.dim != qq.dim {
        return None;
    }
    let r = pp.dim;
    let fp = facet_list(&pp);
    let fq = facet_list(&qq);
    if fp.len() != fq.len() {
        return None;
    }
    let inner = if r == 0 {
        IntegralAffineMap::identity(0)
    } else {
        find_pointed_iso(r, &fp, &fq)?
    };
    // z_q = diag(inner, I) z_p, x = u z
    let mut block: Vec<Vec<i64>> = (0..m).map(|i| unit(m, i)).collect();
    let mut trans = vec![Rational::zero(); m];
    for i in 0..r {
        block[i][..r].copy_from_slice(&inner.matrix[i]);
        trans[i] = inner.translation[i].clone();
    }
    let lift = IntegralAffineMap { matrix: block, translation: trans, source_dim: m };
    let to_q = IntegralAffineMap { matrix: uq, translation: vec![Rational::zero(); m], source_dim: m };
    let from_p = IntegralAffineMap { matrix: up, translation: vec![Rational::zero(); m], source_dim: m }
        .inverse()?;
    let f = to_q.compose(&lift).compose(&from_p);
    let img = f.image(p)?;
    img.same_set(q).then_some(f)
}

fn find_pointed_iso(
    r: usize,
    fp: &[(Vec<i64>, Rational, bool)],
    fq: &[(Vec<i64>, Rational, bool)],
) -> Option<IntegralAffineMap> {
    // r independent facets of q
    let mut chosen: Vec<usize> = Vec::new();
    for j in 0..fq.len() {
        let mut rows: Vec<Vec<i64>> = chosen.iter().map(|&k| fq[k].0.clone()).collect();
        rows.push(fq[j].0.clone());
        if linalg::rank_int(&rows) == rows.len() {
            chosen.push(j);
        }
        if chosen.len() == r {
            break;
        }
    }
    if chosen.len() < r {
        return None;
    }
    let b: Vec<Vec<i64>> = chosen.iter().map(|&k| fq[k].0.clone()).collect();
    let b_inv = linalg::inverse(&linalg::to_q(&b))?;
    let target: BTreeSet<&(Vec<i64>, Rational, bool)> = fp.iter().collect();
    for sigma in (0..fp.len()).permutations(r) {
        if sigma.iter().zip(&chosen).any(|(&i, &j)| fp[i].2 != fq[j].2) {
            continue;
        }
        let n_sigma: Vec<Vec<Rational>> =
            sigma.iter().map(|&i| fp[i].0.iter().map(|&x| rat(x)).collect()).collect();
        let a_q: Vec<Vec<Rational>> = (0..r)
            .map(|i| (0..r).map(|j| (0..r).fold(Rational::zero(), |acc, k| acc + &b_inv[i][k] * &n_sigma[k][j])).collect())
            .collect();
        let Some(a) = a_q.iter().map(|row| linalg::to_int_vec(row)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        if linalg::det_int(&a).abs() != 1 {
            continue;
        }
        let rhs: Vec<Rational> = sigma.iter().zip(&chosen).map(|(&i, &j)| &fp[i].1 - &fq[j].1).collect();
        let t = linalg::mat_vec(&b_inv, &rhs);
        let f = IntegralAffineMap { matrix: a, translation: t, source_dim: r };
        let ok = fq.iter().all(|(n, off, strict)| {
            let c = AffineConstraint { alpha: n.clone(), a: off.clone(), strict: *strict };
            let (alpha, a) = f.pull_back(&c);
            target.contains(&(alpha, a, *strict))
        });
        if ok {
            return Some(f);
        }
    }
    None
}

/// Checks that `pieces` subdivide `p`: each piece is a full-dimensional
/// subset of `p`, interiors are disjoint, pieces meet face to face and
/// cover `p`. All sets are taken closed. Coverage is decided by exact volume
/// additivity, inside a box large enough to meet every cell of the
/// hyperplane arrangement when `p` is unbounded.
pub fn validate_subdivision(p: &Polytope, pieces: &[Polytope]) -> Result<bool> {
    if pieces.is_empty() {
        return Err(Error::MalformedSubdivision("no pieces".into()));
    }
    for (i, q) in pieces.iter().enumerate() {
        if q.dim != p.dim {
            return Err(Error::MalformedSubdivision(format!("piece {i} has dimension {}", q.dim)));
        }
        if !q.has_nonempty_interior() {
            return Err(Error::MalformedSubdivision(format!("piece {i} has empty interior")));
        }
    }
    let p = p.closure();
    let pieces: Vec<Polytope> = pieces.iter().map(Polytope::closure).collect();
    if !pieces.iter().all(|q| p.contains_polytope(q)) {
        return Ok(false);
    }
    for (i, j) in (0..pieces.len()).tuple_combinations() {
        let both = pieces[i].with_constraints(pieces[j].constraints.iter().cloned());
        if both.has_nonempty_interior() {
            return Ok(false);
        }
        if both.is_empty() {
            continue;
        }
        if !meets_as_face(&pieces[i], &both) || !meets_as_face(&pieces[j], &both) {
            return Ok(false);
        }
    }
    let (whole, parts) = if p.is_bounded() {
        (p.volume(), pieces.iter().map(Polytope::volume).collect::<Option<Vec<_>>>())
    } else {
        let r = truncation_radius(&p, &pieces);
        let boxc = Polytope::cube(p.dim, -r.clone(), r).constraints;
        (
            p.with_constraints(boxc.clone()).volume(),
            pieces
                .iter()
                .map(|q| q.with_constraints(boxc.clone()).volume())
                .collect::<Option<Vec<_>>>(),
        )
    };
    let (Some(whole), Some(parts)) = (whole, parts) else {
        return Ok(false);
    };
    let sum = parts.into_iter().fold(Rational::zero(), |a, b| a + b);
    Ok(sum == whole)
}

/// Whether `inter ⊆ piece` is the face of `piece` cut out by the
/// constraints vanishing on it.
pub(crate) fn meets_as_face(piece: &Polytope, inter: &Polytope) -> bool {
    let tight: Vec<AffineConstraint> = piece
        .constraints
        .iter()
        .filter(|c| {
            matches!(inter.maximize(&c.alpha, &c.a), LpOutcome::Optimal { ref value, .. } if value.is_zero())
        })
        .cloned()
        .collect();
    let mut face = piece.clone();
    for c in tight {
        let neg: Vec<i64> = c.alpha.iter().map(|x| -x).collect();
        face.constraints.push(AffineConstraint { alpha: neg, a: -c.a.clone(), strict: false });
    }
    inter.contains_polytope(&face)
}

fn truncation_radius(p: &Polytope, pieces: &[Polytope]) -> Rational {
    let m = p.dim;
    let mut hyper: Vec<(Vec<i64>, Rational)> = (0..m).map(|i| (unit(m, i), Rational::zero())).collect();
    for c in p.constraints.iter().chain(pieces.iter().flat_map(|q| q.constraints.iter())) {
        let n = c.normalized();
        if !hyper.contains(&(n.alpha.clone(), n.a.clone())) {
            hyper.push((n.alpha, n.a));
        }
    }
    let mut r = Rational::zero();
    for subset in (0..hyper.len()).combinations(m) {
        let a: Vec<Vec<i64>> = subset.iter().map(|&i| hyper[i].0.clone()).collect();
        let b: Vec<Rational> = subset.iter().map(|&i| -hyper[i].1.clone()).collect();
        if let LinearSolution::Unique(x) = linalg::solve(&linalg::to_q(&a), &b, m) {
            for v in x {
                if v.abs() > r {
                    r = v.abs();
                }
            }
        }
    }
    r + rat(2)
}

/// The affine function `x ↦ a + α·x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonoidElement {
    #[serde(with = "serde_q")]
    pub a: Rational,
    pub alpha: Vec<i64>,
}

impl MonoidElement {
    pub fn new(a: Rational, alpha: Vec<i64>) -> Self {
        Self { a, alpha }
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        dot_int(&self.alpha, x) + &self.a
    }

    pub fn add(&self, o: &MonoidElement) -> MonoidElement {
        MonoidElement {
            a: &self.a + &o.a,
            alpha: self.alpha.iter().zip(&o.alpha).map(|(x, y)| x + y).collect(),
        }
    }

    fn sort_key(&self) -> (i64, Rational, Vec<i64>) {
        (self.alpha.iter().map(|x| x.abs()).sum(), self.a.clone(), self.alpha.clone())
    }
}

pub fn sort_generators(g: &mut [MonoidElement]) {
    g.sort_by_key(MonoidElement::sort_key);
}

/// Minimal generators of the smooth-monomial monoid of `p`: the union over
/// minimal faces of the Hilbert bases of the dual local cones, each shifted
/// to vanish on its face.
pub fn smooth_monomial_generators(p: &Polytope) -> Result<Vec<MonoidElement>> {
    if !p.has_nonempty_interior() {
        return Err(Error::InvalidConstraint("polytope has empty interior".into()));
    }
    let faces = p.closure().faces();
    let min_dim = faces.first().map_or(0, |f| f.dim);
    let mut out: BTreeSet<MonoidElement> = BTreeSet::new();
    for face in faces.iter().filter(|f| f.dim == min_dim) {
        let normals: Vec<Vec<i64>> = face.tight.iter().map(|&i| p.constraints[i].alpha.clone()).collect();
        for alpha in dual_cone_hilbert_basis(p.dim, &normals)? {
            let a = -dot_int(&alpha, &face.origin);
            out.insert(MonoidElement { a, alpha });
        }
    }
    let mut v: Vec<MonoidElement> = out.into_iter().collect();
    sort_generators(&mut v);
    Ok(v)
}

/// Hilbert basis of `cone(normals) ∩ ℤ^m`, the cone being pointed.
pub fn dual_cone_hilbert_basis(m: usize, normals: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    if normals.is_empty() {
        return Ok(Vec::new());
    }
    // lattice coordinates on the saturated span
    let w = linalg::saturated_span_basis(normals, m);
    let s = w.len();
    let wt = linalg::to_q(&linalg::transpose(&w, m));
    let to_coords = |v: &[i64]| -> Vec<i64> {
        let b: Vec<Rational> = v.iter().map(|&x| rat(x)).collect();
        match linalg::solve(&wt, &b, s) {
            LinearSolution::Unique(c) => linalg::to_int_vec(&c).expect("saturated lattice"),
            _ => unreachable!("vector in span"),
        }
    };
    let gens: Vec<Vec<i64>> = normals.iter().map(|n| linalg::primitive(&to_coords(n))).collect();
    let basis = hilbert_basis(s, &gens)?;
    Ok(basis
        .into_iter()
        .map(|c| (0..m).map(|j| c.iter().zip(&w).map(|(ci, row)| ci * row[j]).sum()).collect())
        .collect())
}

/// Hilbert basis of a full-dimensional pointed cone in ℤ^s given by
/// generators.
pub fn hilbert_basis(s: usize, gens: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let facets = cone_facet_normals(s, gens);
    let in_cone = |v: &[i64]| {
        facets.iter().all(|n| n.iter().zip(v).map(|(a, b)| a * b).sum::<i64>() >= 0)
    };
    let rays = cone_rays(s, &facets);
    let mut candidates: BTreeSet<Vec<i64>> = rays.iter().cloned().collect();
    for subset in (0..rays.len()).combinations(s) {
        let r: Vec<Vec<i64>> = subset.iter().map(|&i| rays[i].clone()).collect();
        if linalg::rank_int(&r) != s {
            continue;
        }
        for v in parallelepiped_points(s, &r)? {
            if v.iter().any(|&x| x != 0) {
                candidates.insert(v);
            }
        }
    }
    let cand: Vec<Vec<i64>> = candidates.into_iter().collect();
    let irreducible: Vec<Vec<i64>> = cand
        .iter()
        .filter(|g| {
            !cand.iter().any(|h| {
                h != *g && {
                    let d: Vec<i64> = g.iter().zip(h).map(|(a, b)| a - b).collect();
                    in_cone(&d)
                }
            })
        })
        .cloned()
        .collect();
    Ok(irreducible)
}

/// Lattice points `Σ λᵢ rᵢ` with `0 ≤ λᵢ < 1`.
fn parallelepiped_points(s: usize, r: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let mut lo = vec![0i64; s];
    let mut hi = vec![0i64; s];
    for row in r {
        for j in 0..s {
            if row[j] < 0 {
                lo[j] += row[j];
            } else {
                hi[j] += row[j];
            }
        }
    }
    let size: u64 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as u64).product();
    if size > HILBERT_SEARCH_LIMIT {
        return Err(Error::TooLarge(format!("parallelepiped box of {size} points")));
    }
    // x = Rᵀ λ  ⇒  λ = (Rᵀ)⁻¹ x
    let rt_inv = linalg::inverse(&linalg::to_q(&linalg::transpose(r, s))).expect("independent rays");
    let mut out = Vec::new();
    let mut x = lo.clone();
    loop {
        let xq: Vec<Rational> = x.iter().map(|&v| rat(v)).collect();
        let lambda = linalg::mat_vec(&rt_inv, &xq);
        if lambda.iter().all(|l| !l.is_negative() && *l < Rational::one()) {
            out.push(x.clone());
        }
        let mut k = 0;
        loop {
            if k == s {
                return Ok(out);
            }
            x[k] += 1;
            if x[k] <= hi[k] {
                break;
            }
            x[k] = lo[k];
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn ge(alpha: &[i64], a: i64) -> AffineConstraint {
        AffineConstraint::ge(alpha, rat(a))
    }

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    fn triangle3() -> Polytope {
        Polytope::new(2, vec![ge(&[1, 0], 0), ge(&[0, 1], 0), ge(&[-1, -1], 3)]).unwrap()
    }

    fn cone12() -> Polytope {
        Polytope::cone_from_rays(2, &[vec![1, 0], vec![1, 2]]).unwrap()
    }

    #[test]
    fn zero_normal_rejected() {
        assert!(AffineConstraint::new(vec![0, 0], rat(1), false).is_err());
        let bad = r#"{"dim":1,"constraints":[{"alpha":[0],"a":"1/1","strict":false}]}"#;
        assert!(serde_json::from_str::<Polytope>(bad).is_err());
        let bad = r#"{"dim":2,"constraints":[{"alpha":[1],"a":"1/1"}]}"#;
        assert!(serde_json::from_str::<Polytope>(bad).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = triangle3();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"a\":\"3/1\""));
        assert_eq!(serde_json::from_str::<Polytope>(&s).unwrap(), p);
    }

    #[test]
    fn interior_examples() {
        assert!(Polytope::orthant(1).has_nonempty_interior());
        let point = Polytope::new(1, vec![ge(&[1], 0), ge(&[-1], 0)]).unwrap();
        assert!(!point.has_nonempty_interior());
        let t = triangle3();
        let x = t.interior_point().unwrap();
        assert!(t.constraints.iter().all(|c| c.value(&x).is_positive()));
    }

    #[test]
    fn completeness_examples() {
        assert!(Polytope::interval(rat(0), rat(2)).is_complete());
        let open = Polytope::new(1, vec![AffineConstraint::gt(&[1], rat(0)), AffineConstraint::gt(&[-1], rat(1))]).unwrap();
        assert!(!open.is_complete());
        assert!(Polytope::whole(1).is_complete());
        // a strict constraint that is implied with room to spare
        let p = Polytope::new(1, vec![ge(&[1], 0), AffineConstraint::gt(&[1], rat(1))]).unwrap();
        assert!(p.is_complete());
    }

    #[test]
    fn face_examples() {
        let f = Polytope::orthant(1).faces();
        assert_eq!(f.iter().map(|f| f.dim).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(f[0].origin, pt(&[0]));
        let f = Polytope::interval(rat(0), rat(5)).faces();
        assert_eq!(f.iter().map(|f| f.dim).collect::<Vec<_>>(), vec![0, 0, 1]);
        let verts: BTreeSet<Vec<Rational>> = f.iter().filter(|f| f.dim == 0).map(|f| f.origin.clone()).collect();
        assert_eq!(verts, [pt(&[0]), pt(&[5])].into_iter().collect());
        let f = Polytope::orthant(2).faces();
        assert_eq!(f.iter().map(|f| f.dim).collect::<Vec<_>>(), vec![0, 1, 1, 2]);
        // each ray face lives in its own 1-dim lattice as [0,∞)
        for face in f.iter().filter(|f| f.dim == 1) {
            assert!(integral_affine_iso(&face.polytope, &Polytope::orthant(1)).is_some());
        }
    }

    #[test]
    fn local_cone_examples() {
        let seg = Polytope::interval(rat(0), rat(4));
        assert_eq!(local_cone(&seg, &pt(&[2])).unwrap(), Polytope::whole(1));
        assert!(local_cone(&seg, &pt(&[0])).unwrap().same_set(&Polytope::orthant(1)));
        assert!(local_cone(&triangle3(), &pt(&[0, 0])).unwrap().same_set(&Polytope::orthant(2)));
        assert!(matches!(local_cone(&seg, &pt(&[5])), Err(Error::NotInPolytope(_))));
    }

    #[test]
    fn standard_corner_examples() {
        assert!(is_standard_corner(&Polytope::orthant(2), &pt(&[0, 0])).unwrap());
        assert!(!is_standard_corner(&cone12(), &pt(&[0, 0])).unwrap());
        assert!(is_standard_corner(&Polytope::interval(rat(0), rat(3)), &pt(&[0])).unwrap());
        assert!(matches!(is_standard_corner(&Polytope::orthant(2), &pt(&[1, 0])), Err(Error::NotAVertex(_))));
    }

    #[test]
    fn iso_examples() {
        let unit_seg = Polytope::interval(rat(0), rat(1));
        assert!(integral_affine_iso(&unit_seg, &Polytope::interval(rat(0), rat(2))).is_none());
        assert!(integral_affine_iso(&Polytope::orthant(1), &unit_seg).is_none());
        let sq = Polytope::cube(2, rat(0), rat(1));
        let shear = IntegralAffineMap::new(vec![vec![1, 1], vec![0, 1]], pt(&[0, 0]), 2).unwrap();
        let img = shear.image(&sq).unwrap();
        let f = integral_affine_iso(&sq, &img).unwrap();
        assert!(f.image(&sq).unwrap().same_set(&img));
        let g = integral_affine_iso(&img, &sq).unwrap();
        assert!(g.image(&img).unwrap().same_set(&sq));
        // translated segment
        let f = integral_affine_iso(&unit_seg, &Polytope::interval(ratio(1, 2), ratio(3, 2))).unwrap();
        assert_eq!(&f.apply(&pt(&[0]))[0] + &f.apply(&pt(&[1]))[0], rat(2));
        // lineality: half-plane vs sheared half-plane
        let hp = Polytope::new(2, vec![ge(&[1, 0], 0)]).unwrap();
        let hp2 = Polytope::new(2, vec![ge(&[1, 3], 2)]).unwrap();
        assert!(integral_affine_iso(&hp, &hp2).is_some());
        assert!(integral_affine_iso(&hp, &Polytope::orthant(2)).is_none());
    }

    #[test]
    fn subdivision_examples() {
        let fan = [vec![1, 0], vec![0, 1], vec![-1, -1]];
        let pieces: Vec<Polytope> = [(0, 1), (1, 2), (2, 0)]
            .iter()
            .map(|&(i, j)| Polytope::cone_from_rays(2, &[fan[i].clone(), fan[j].clone()]).unwrap())
            .collect();
        assert!(validate_subdivision(&Polytope::whole(2), &pieces).unwrap());
        assert!(!validate_subdivision(&Polytope::whole(2), &pieces[..2]).unwrap());
        let seg = Polytope::interval(rat(0), rat(2));
        let halves = [Polytope::interval(rat(0), rat(1)), Polytope::interval(rat(1), rat(2))];
        assert!(validate_subdivision(&seg, &halves).unwrap());
        let overlap = [Polytope::interval(rat(0), rat(1)), Polytope::interval(ratio(1, 2), rat(2))];
        assert!(!validate_subdivision(&seg, &overlap).unwrap());
        let degenerate = [Polytope::interval(rat(0), rat(0)), seg.clone()];
        assert!(matches!(validate_subdivision(&seg, &degenerate), Err(Error::MalformedSubdivision(_))));
    }

    #[test]
    fn non_face_to_face_rejected() {
        // square split into a left half and two right quarters: the left
        // half meets each quarter in half of its edge
        let sq = Polytope::cube(2, rat(0), rat(2));
        let left = Polytope::new(2, vec![ge(&[1, 0], 0), ge(&[-1, 0], 1), ge(&[0, 1], 0), ge(&[0, -1], 2)]).unwrap();
        let rb = Polytope::new(2, vec![ge(&[1, 0], -1), ge(&[-1, 0], 2), ge(&[0, 1], 0), ge(&[0, -1], 1)]).unwrap();
        let rt = Polytope::new(2, vec![ge(&[1, 0], -1), ge(&[-1, 0], 2), ge(&[0, 1], -1), ge(&[0, -1], 2)]).unwrap();
        assert!(!validate_subdivision(&sq, &[left.clone(), rb.clone(), rt.clone()]).unwrap());
        let right = Polytope::new(2, vec![ge(&[1, 0], -1), ge(&[-1, 0], 2), ge(&[0, 1], 0), ge(&[0, -1], 2)]).unwrap();
        assert!(validate_subdivision(&sq, &[left, right]).unwrap());
    }

    #[test]
    fn volumes() {
        assert_eq!(triangle3().volume(), Some(ratio(9, 2)));
        assert_eq!(Polytope::cube(3, rat(0), rat(2)).volume(), Some(rat(8)));
        assert_eq!(Polytope::orthant(2).volume(), None);
    }

    #[test]
    fn generator_examples() {
        let g = smooth_monomial_generators(&Polytope::orthant(1)).unwrap();
        assert_eq!(g, vec![MonoidElement::new(rat(0), vec![1])]);
        let g = smooth_monomial_generators(&Polytope::interval(rat(0), ratio(7, 2))).unwrap();
        assert_eq!(g, vec![MonoidElement::new(rat(0), vec![1]), MonoidElement::new(ratio(7, 2), vec![-1])]);
        let g = smooth_monomial_generators(&cone12()).unwrap();
        let set: BTreeSet<MonoidElement> = g.into_iter().collect();
        let want: BTreeSet<MonoidElement> = [vec![0, 1], vec![2, -1], vec![1, 0]]
            .into_iter()
            .map(|a| MonoidElement::new(rat(0), a))
            .collect();
        assert_eq!(set, want);
        assert!(smooth_monomial_generators(&Polytope::whole(2)).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn local_cone_constant_on_open_faces(l in 1i64..6, t in 1i64..100) {
            // points in the relative interior of the same face share a cone
            let seg = Polytope::interval(rat(0), rat(l));
            let x = ratio(t, 101) * rat(l);
            prop_assert_eq!(local_cone(&seg, &[x]).unwrap(), Polytope::whole(1));
            let tri = triangle3();
            let y = ratio(t, 34);
            let a = local_cone(&tri, &[y.clone(), rat(0)]).unwrap();
            let b = local_cone(&tri, &[ratio(1, 2), rat(0)]).unwrap();
            prop_assert!(a.same_set(&b));
        }

        #[test]
        fn subdivision_invariant_under_unimodular_maps(a in -3i64..4, b in -3i64..4, tx in -5i64..5) {
            let m = IntegralAffineMap::new(vec![vec![1, a], vec![b, 1 + a * b]], pt(&[tx, 0]), 2).unwrap();
            let sq = Polytope::cube(2, rat(0), rat(2));
            let halves = [
                Polytope::new(2, vec![ge(&[1, 0], 0), ge(&[-1, 0], 1), ge(&[0, 1], 0), ge(&[0, -1], 2)]).unwrap(),
                Polytope::new(2, vec![ge(&[1, 0], -1), ge(&[-1, 0], 2), ge(&[0, 1], 0), ge(&[0, -1], 2)]).unwrap(),
            ];
            let img: Vec<Polytope> = halves.iter().map(|h| m.image(h).unwrap()).collect();
            prop_assert!(validate_subdivision(&m.image(&sq).unwrap(), &img).unwrap());
            prop_assert!(!validate_subdivision(&m.image(&sq).unwrap(), &img[..1]).unwrap());
        }

        #[test]
        fn iso_is_symmetric(a in -3i64..4, b in -3i64..4, l in 1i64..4) {
            let m = IntegralAffineMap::new(vec![vec![1, a], vec![b, 1 + a * b]], pt(&[l, -l]), 2).unwrap();
            let tri = Polytope::new(2, vec![ge(&[1, 0], 0), ge(&[0, 1], 0), ge(&[-1, -1], l)]).unwrap();
            let img = m.image(&tri).unwrap();
            let f = integral_affine_iso(&tri, &img).unwrap();
            let g = integral_affine_iso(&img, &tri).unwrap();
            prop_assert!(f.image(&tri).unwrap().same_set(&img));
            prop_assert!(g.image(&img).unwrap().same_set(&tri));
        }
    }
}
