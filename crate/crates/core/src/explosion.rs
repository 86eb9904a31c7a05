//! The explosion functor on normal-crossing combinatorics, refinement by
//! subdivisions and fans, rend components, tropical completion and the
//! tropical part of a degeneration.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::affine::{self, AffineConstraint, IntegralAffineMap, Polytope};
use crate::charts::{make_morphism, Chart, ChartMorphism, ExplodedMonomial};
use crate::complex::{Cell, PolytopeComplex};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};
use crate::semiring::ExplodedScalar;

/// Components `D₁..D_k` and the index sets `I` (1-based) with
/// `⋂_{i∈I} Dᵢ ≠ ∅`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NcConfiguration {
    pub k: usize,
    pub nerve: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    /// Complex dimension of the ambient manifold; sets the `ℝⁿ` factor of
    /// each chart when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_dim: Option<usize>,
}

impl NcConfiguration {
    pub fn new(k: usize, nerve: Vec<Vec<usize>>) -> Self {
        Self { k, nerve, labels: Vec::new(), complex_dim: None }
    }

    /// All subsets of `{1..k}`.
    pub fn full(k: usize) -> Self {
        let nerve = (0..=k).flat_map(|r| (1..=k).combinations(r)).collect();
        Self::new(k, nerve)
    }

    /// Checks the nerve and returns it as a set of sorted index sets.
    pub fn normalized_nerve(&self) -> Result<BTreeSet<Vec<usize>>> {
        let mut set = BTreeSet::new();
        for s in &self.nerve {
            let mut v = s.clone();
            v.sort_unstable();
            if v.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidNerve(format!("repeated index in {s:?}")));
            }
            if let Some(&bad) = v.iter().find(|&&i| i == 0 || i > self.k) {
                return Err(Error::InvalidNerve(format!("index {bad} outside 1..={}", self.k)));
            }
            set.insert(v);
        }
        if !set.contains(&Vec::new()) {
            return Err(Error::InvalidNerve("nerve lacks the empty set".into()));
        }
        for i in 1..=self.k {
            if !set.contains(&vec![i]) {
                return Err(Error::InvalidNerve(format!("component {i} missing from nerve")));
            }
        }
        for s in &set {
            for r in 0..s.len() {
                for sub in s.iter().copied().combinations(r) {
                    if !set.contains(&sub) {
                        return Err(Error::InvalidNerve(format!(
                            "not downward closed: {s:?} present but {sub:?} missing"
                        )));
                    }
                }
            }
        }
        Ok(set)
    }

    pub fn maximal_sets(&self) -> Result<Vec<Vec<usize>>> {
        let set = self.normalized_nerve()?;
        Ok(set
            .iter()
            .filter(|s| !set.iter().any(|t| t.len() > s.len() && s.iter().all(|i| t.contains(i))))
            .cloned()
            .collect())
    }

    /// The configuration induced on `Dᵢ` by the other components; returns
    /// it with the original indices of its components.
    pub fn link(&self, i: usize) -> Result<(NcConfiguration, Vec<usize>)> {
        let set = self.normalized_nerve()?;
        let comps: Vec<usize> = (1..=self.k).filter(|&j| j != i && set.contains(&sorted(vec![i, j]))).collect();
        let mut nerve = Vec::new();
        for s in &set {
            if s.contains(&i) {
                let rest: Vec<usize> = s
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|j| comps.iter().position(|c| c == j).expect("neighbour") + 1)
                    .collect();
                nerve.push(rest);
            }
        }
        let mut cfg = NcConfiguration::new(comps.len(), nerve);
        cfg.complex_dim = self.complex_dim.map(|d| d.saturating_sub(1));
        Ok((cfg, comps))
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// A polytope complex with one chart per cell and the gluing morphisms
/// from face charts into the cell charts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplodedComplex {
    pub complex: PolytopeComplex,
    pub charts: Vec<Chart>,
    pub gluings: Vec<ChartGluing>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartGluing {
    pub cells: (usize, usize),
    pub face_chart: Chart,
    pub maps: (ChartMorphism, ChartMorphism),
}

/// The morphism whose entries are `⌊e^{bₖ}⌋ z^{Aₖ}`.
pub fn morphism_from_map(src: &Chart, dst: &Chart, f: &IntegralAffineMap) -> Result<ChartMorphism> {
    let entries = f
        .matrix
        .iter()
        .zip(&f.translation)
        .map(|(row, b)| ExplodedMonomial::new(ExplodedScalar::tropical(b.clone()), row.clone()).into())
        .collect();
    make_morphism(src, dst, entries)
}

impl ExplodedComplex {
    pub fn from_complex(complex: PolytopeComplex, ns: &[usize]) -> Result<Self> {
        let charts: Vec<Chart> = complex
            .cells
            .iter()
            .zip(ns)
            .map(|(c, &n)| Chart::new(n, c.polytope.clone()))
            .collect::<Result<_>>()?;
        let mut gluings = Vec::new();
        for g in &complex.gluings {
            let (i, j) = g.cells;
            let face_chart = Chart::new(charts[i].n.min(charts[j].n), g.face.clone())?;
            let mi = morphism_from_map(&face_chart, &charts[i], &g.maps.0)?;
            let mj = morphism_from_map(&face_chart, &charts[j], &g.maps.1)?;
            gluings.push(ChartGluing { cells: g.cells, face_chart, maps: (mi, mj) });
        }
        Ok(Self { complex, charts, gluings })
    }

    /// Re-derives charts and gluings from the cells and compares.
    pub fn validate(&self) -> Result<()> {
        self.complex.validate()?;
        if self.charts.len() != self.complex.cells.len() {
            return Err(Error::ChartMismatch("one chart per cell expected".into()));
        }
        for (c, cell) in self.charts.iter().zip(&self.complex.cells) {
            if c.polytope != cell.polytope {
                return Err(Error::ChartMismatch("chart polytope differs from its cell".into()));
            }
            c.validate()?;
        }
        let ns: Vec<usize> = self.charts.iter().map(|c| c.n).collect();
        let fresh = ExplodedComplex::from_complex(self.complex.clone(), &ns)?;
        if fresh.gluings != self.gluings {
            return Err(Error::ChartMismatch("gluing morphisms differ from the cell geometry".into()));
        }
        Ok(())
    }

    /// `𝐓^m`: one chart with tropical part ℝ^m.
    pub fn tropical_space(m: usize) -> Self {
        let complex = PolytopeComplex::new(m, vec![Cell::standalone(Polytope::whole(m))]).expect("single cell");
        Self::from_complex(complex, &[0]).expect("whole space chart")
    }
}

fn coordinate_embedding(k: usize, set: &[usize]) -> IntegralAffineMap {
    let matrix = (1..=k)
        .map(|r| set.iter().map(|&i| i64::from(i == r)).collect())
        .collect();
    IntegralAffineMap { matrix, translation: vec![Rational::from_integer(0.into()); k], source_dim: set.len() }
}

/// One chart `T_{[0,∞)^{|I|}}` per maximal nerve element `I`, placed on the
/// coordinate face of `[0,∞)^k` spanned by `I`.
pub fn explode_nc(cfg: &NcConfiguration) -> Result<ExplodedComplex> {
    let maximal = cfg.maximal_sets()?;
    let cells: Vec<Cell> = maximal
        .iter()
        .map(|s| Cell::new(Polytope::orthant(s.len()), coordinate_embedding(cfg.k, s)))
        .collect::<Result<_>>()?;
    let ns: Vec<usize> = maximal
        .iter()
        .map(|s| cfg.complex_dim.map_or(0, |d| 2 * d.saturating_sub(s.len())))
        .collect();
    let complex = PolytopeComplex::new(cfg.k, cells)?;
    ExplodedComplex::from_complex(complex, &ns)
}

/// A complete fan in ℝ^dim given by rays and maximal cones (indices into
/// `rays`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

impl Fan {
    pub fn pieces(&self) -> Result<Vec<Polytope>> {
        self.cones
            .iter()
            .map(|c| {
                let rays: Vec<Vec<i64>> = c
                    .iter()
                    .map(|&i| {
                        self.rays
                            .get(i)
                            .cloned()
                            .ok_or_else(|| Error::MalformedSubdivision(format!("ray index {i} out of range")))
                    })
                    .collect::<Result<_>>()?;
                Polytope::cone_from_rays(self.dim, &rays)
                    .map_err(|e| Error::MalformedSubdivision(e.to_string()))
            })
            .collect()
    }
}

/// Replaces each cell by the pieces of its subdivision (`None` keeps the
/// cell). Pieces are in the cell's own coordinates.
pub fn refine(ec: &ExplodedComplex, subdivisions: &[Option<Vec<Polytope>>]) -> Result<ExplodedComplex> {
    if subdivisions.len() != ec.complex.cells.len() {
        return Err(Error::InvalidSubdivision(format!(
            "{} subdivisions for {} cells",
            subdivisions.len(),
            ec.complex.cells.len()
        )));
    }
    let mut cells = Vec::new();
    let mut ns = Vec::new();
    for ((cell, chart), sub) in ec.complex.cells.iter().zip(&ec.charts).zip(subdivisions) {
        match sub {
            None => {
                cells.push(cell.clone());
                ns.push(chart.n);
            }
            Some(pieces) => {
                if !affine::validate_subdivision(&cell.polytope, pieces)? {
                    return Err(Error::InvalidSubdivision("pieces do not subdivide the cell".into()));
                }
                for p in pieces {
                    cells.push(Cell::new(p.closure(), cell.embedding.clone())?);
                    ns.push(chart.n);
                }
            }
        }
    }
    let complex = PolytopeComplex::new(ec.complex.ambient_dim, cells).map_err(|e| match e {
        Error::InvalidComplex(m) => Error::InvalidSubdivision(format!("incompatible on shared faces: {m}")),
        other => other,
    })?;
    ExplodedComplex::from_complex(complex, &ns)
}

/// `𝐓^dim` refined by a complete fan.
pub fn refine_by_fan(fan: &Fan) -> Result<ExplodedComplex> {
    refine(&ExplodedComplex::tropical_space(fan.dim), &[Some(fan.pieces()?)])
}

/// Pieces of both subdivisions intersected, keeping full-dimensional
/// intersections.
pub fn common_refinement(a: &[Polytope], b: &[Polytope]) -> Vec<Polytope> {
    let mut out = Vec::new();
    for p in a {
        for q in b {
            let r = p.with_constraints(q.constraints.iter().cloned());
            if r.has_nonempty_interior() {
                out.push(r);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RendClass {
    /// No contact: the space itself.
    Base,
    /// Order-n contact with a single component: its explosion, with the
    /// configuration it inherits.
    ExplosionOf { component: usize, link: NcConfiguration, link_components: Vec<usize> },
    /// Contact with several components at once.
    NeedsRefinement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RendComponent {
    pub contact: Vec<u64>,
    pub class: RendClass,
}

/// Contact vectors with entries `≤ max_order` whose support is a nerve
/// element, in lexicographic order, classified.
pub fn rend_components(cfg: &NcConfiguration, max_order: u64) -> Result<Vec<RendComponent>> {
    let set = cfg.normalized_nerve()?;
    if cfg.k == 0 {
        return Ok(vec![RendComponent { contact: Vec::new(), class: RendClass::Base }]);
    }
    let mut out = Vec::new();
    for contact in (0..cfg.k).map(|_| 0..=max_order).multi_cartesian_product() {
        let support: Vec<usize> = (0..cfg.k).filter(|&i| contact[i] > 0).map(|i| i + 1).collect();
        if !set.contains(&support) {
            continue;
        }
        let class = match support.as_slice() {
            [] => RendClass::Base,
            [i] => {
                let (link, link_components) = cfg.link(*i)?;
                RendClass::ExplosionOf { component: *i, link, link_components }
            }
            _ => RendClass::NeedsRefinement,
        };
        out.push(RendComponent { contact, class });
    }
    Ok(out)
}

/// The complex of local cones at an ambient point `x`, one per cell
/// containing it, all placed at the origin.
pub fn tropical_completion(ec: &ExplodedComplex, x: &[Rational]) -> Result<ExplodedComplex> {
    if x.len() != ec.complex.ambient_dim {
        return Err(Error::Dimension("point has the wrong ambient dimension".into()));
    }
    let mut cells = Vec::new();
    let mut ns = Vec::new();
    for i in ec.complex.cells_containing(x) {
        let cell = &ec.complex.cells[i];
        let y = cell.preimage(x).expect("contained point has a preimage");
        let cone = affine::local_cone(&cell.polytope, &y)?;
        let mut linear = cell.embedding.clone();
        linear.translation = vec![rat(0); linear.target_dim()];
        let c = Cell::new(cone, linear)?;
        if !cells.contains(&c) {
            cells.push(c);
            ns.push(ec.charts[i].n);
        }
    }
    if cells.is_empty() {
        return Err(Error::NotInPolytope(affine::fmt_point(x)));
    }
    // drop cones contained in a larger one (cells meeting x only in a face)
    let amb: Vec<Polytope> = cells.iter().map(Cell::ambient_polytope).collect();
    let keep: Vec<usize> = (0..cells.len())
        .filter(|&i| !(0..cells.len()).any(|j| j != i && cells[j].dim() > cells[i].dim() && amb[j].contains_polytope(&amb[i])))
        .collect();
    let cells: Vec<Cell> = keep.iter().map(|&i| cells[i].clone()).collect();
    let ns: Vec<usize> = keep.iter().map(|&i| ns[i]).collect();
    let complex = PolytopeComplex::new(ec.complex.ambient_dim, cells)?;
    ExplodedComplex::from_complex(complex, &ns)
}

/// The standard unit simplex `{y ≥ 0, Σy ≤ 1}` in ℝ^d.
pub fn standard_simplex(d: usize) -> Polytope {
    let mut constraints: Vec<AffineConstraint> = (0..d)
        .map(|i| AffineConstraint::ge(&(0..d).map(|j| i64::from(i == j)).collect::<Vec<_>>(), rat(0)))
        .collect();
    if d > 0 {
        constraints.push(AffineConstraint::ge(&vec![-1; d], rat(1)));
    }
    Polytope { dim: d, constraints }
}

/// Dual complex of a degeneration with components `N₁..N_k`: a vertex
/// `eᵢ` per component and a unit simplex on `{eᵢ : i ∈ I}` per maximal
/// nerve element.
pub fn degeneration_fiber_complex(cfg: &NcConfiguration) -> Result<PolytopeComplex> {
    let k = cfg.k;
    let mut cells = Vec::new();
    for s in cfg.maximal_sets()? {
        let Some((&first, rest)) = s.split_first() else { continue };
        let d = rest.len();
        let matrix = (1..=k)
            .map(|r| rest.iter().map(|&i| i64::from(i == r) - i64::from(first == r)).collect())
            .collect();
        let translation = (1..=k).map(|r| rat(i64::from(r == first))).collect();
        cells.push(Cell::new(standard_simplex(d), IntegralAffineMap { matrix, translation, source_dim: d })?);
    }
    PolytopeComplex::new(k, cells)
}
