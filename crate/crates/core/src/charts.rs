//! Exploded coordinate charts `ℝⁿ × T^m_P`, exploded monomials, morphisms
//! given by monomial entries, and fibers of monomial maps.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::affine::{self, AffineConstraint, IntegralAffineMap, MonoidElement, Polytope};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{dot_int, format_rational, rat, GaussianRational, Rational};
use crate::semiring::ExplodedScalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub n: usize,
    pub polytope: Polytope,
    pub generators: Vec<MonoidElement>,
    /// Extra `ℂ*` factors: tropical directions in which the chart's
    /// tropical part is a single point.
    #[serde(default)]
    pub torus_rank: usize,
}

impl Chart {
    pub fn new(n: usize, polytope: Polytope) -> Result<Self> {
        let generators = affine::smooth_monomial_generators(&polytope)?;
        Ok(Self { n, polytope, generators, torus_rank: 0 })
    }

    pub fn tropical_dim(&self) -> usize {
        self.polytope.dim
    }

    /// Real dimension `n + 2m`, counting `ℂ*` factors in `m`.
    pub fn dimension(&self) -> usize {
        self.n + 2 * (self.polytope.dim + self.torus_rank)
    }

    /// Recomputes the generators and compares.
    pub fn validate(&self) -> Result<()> {
        let fresh = affine::smooth_monomial_generators(&self.polytope)?;
        if fresh != self.generators {
            return Err(Error::ChartMismatch("stored generators differ from the polytope's".into()));
        }
        Ok(())
    }

    pub fn generator_monomials(&self) -> Vec<ExplodedMonomial> {
        self.generators
            .iter()
            .map(|g| ExplodedMonomial::new(ExplodedScalar::tropical(g.a.clone()), g.alpha.clone()))
            .collect()
    }
}

/// `c⌊e^a⌋ z^α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExplodedMonomial {
    pub coeff: ExplodedScalar,
    pub exponents: Vec<i64>,
}

impl ExplodedMonomial {
    pub fn new(coeff: ExplodedScalar, exponents: Vec<i64>) -> Self {
        Self { coeff, exponents }
    }

    /// `zᵢ` on a chart of tropical dimension `m`.
    pub fn coordinate(m: usize, i: usize) -> Self {
        Self::new(ExplodedScalar::one(), (0..m).map(|j| i64::from(i == j)).collect())
    }

    /// The tropical part `x ↦ a + α·x`.
    pub fn tropical_part(&self) -> MonoidElement {
        MonoidElement::new(self.coeff.tropical_part(), self.exponents.clone())
    }

    pub fn is_smooth_on(&self, p: &Polytope) -> bool {
        self.coeff.is_unit() && p.implies(&self.exponents, &self.coeff.exponent, false)
    }

    pub fn mul(&self, o: &ExplodedMonomial) -> ExplodedMonomial {
        ExplodedMonomial::new(
            &self.coeff * &o.coeff,
            self.exponents.iter().zip(&o.exponents).map(|(a, b)| a + b).collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub coords: Vec<ExplodedScalar>,
    #[serde(with = "crate::rational::serde_q::vec")]
    pub real: Vec<Rational>,
}

impl ChartPoint {
    pub fn new(chart: &Chart, coords: Vec<ExplodedScalar>, real: Vec<Rational>) -> Result<Self> {
        if coords.len() != chart.tropical_dim() || real.len() != chart.n {
            return Err(Error::Dimension("point shape differs from chart".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_unit()) {
            return Err(Error::NotInvertible(c.to_string()));
        }
        let p = Self { coords, real };
        if !chart.polytope.contains(&p.tropical_part()) {
            return Err(Error::NotInPolytope(affine::fmt_point(&p.tropical_part())));
        }
        Ok(p)
    }

    pub fn tropical_part(&self) -> Vec<Rational> {
        self.coords.iter().map(ExplodedScalar::tropical_part).collect()
    }
}

/// `c⌊e^a⌋ ∏ wᵢ^{αᵢ}`.
pub fn evaluate_monomial(mon: &ExplodedMonomial, p: &ChartPoint) -> Result<ExplodedScalar> {
    if mon.exponents.len() != p.coords.len() {
        return Err(Error::Dimension("monomial and point differ in tropical dimension".into()));
    }
    let mut out = mon.coeff.clone();
    for (w, &k) in p.coords.iter().zip(&mon.exponents) {
        out = &out * &w.pow(k)?;
    }
    Ok(out)
}

/// Smooth parts of the chart's generators at `p`.
pub fn smooth_coordinates(chart: &Chart, p: &ChartPoint) -> Result<Vec<GaussianRational>> {
    chart
        .generator_monomials()
        .iter()
        .map(|m| evaluate_monomial(m, p)?.smooth_part())
        .collect()
}

/// Formal smooth factor `h`: a product of named units with integer powers.
pub type FormalFactor = BTreeMap<String, i64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismEntry {
    pub monomial: ExplodedMonomial,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub smooth: FormalFactor,
}

impl From<ExplodedMonomial> for MorphismEntry {
    fn from(monomial: ExplodedMonomial) -> Self {
        Self { monomial, smooth: FormalFactor::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartMorphism {
    pub source: Chart,
    pub target: Chart,
    pub entries: Vec<MorphismEntry>,
}

impl ChartMorphism {
    /// `x ↦ (aᵢ + x·αᵢ)ᵢ`.
    pub fn tropical_part(&self) -> IntegralAffineMap {
        IntegralAffineMap {
            matrix: self.entries.iter().map(|e| e.monomial.exponents.clone()).collect(),
            translation: self.entries.iter().map(|e| e.monomial.coeff.tropical_part()).collect(),
            source_dim: self.source.tropical_dim(),
        }
    }

    pub fn apply(&self, p: &ChartPoint) -> Result<Vec<ExplodedScalar>> {
        self.entries.iter().map(|e| evaluate_monomial(&e.monomial, p)).collect()
    }

    pub fn identity(chart: &Chart) -> Self {
        let m = chart.tropical_dim();
        Self {
            source: chart.clone(),
            target: chart.clone(),
            entries: (0..m).map(|i| ExplodedMonomial::coordinate(m, i).into()).collect(),
        }
    }
}

pub fn make_morphism(src: &Chart, dst: &Chart, entries: Vec<MorphismEntry>) -> Result<ChartMorphism> {
    if entries.len() != dst.tropical_dim() {
        return Err(Error::Dimension(format!(
            "{} entries for a target of tropical dimension {}",
            entries.len(),
            dst.tropical_dim()
        )));
    }
    for e in &entries {
        if e.monomial.exponents.len() != src.tropical_dim() {
            return Err(Error::Dimension("entry exponent length differs from source".into()));
        }
        if !e.monomial.coeff.is_unit() {
            return Err(Error::NotInvertible(e.monomial.coeff.to_string()));
        }
    }
    let f = ChartMorphism { source: src.clone(), target: dst.clone(), entries };
    if !f.tropical_part().maps_into(&src.polytope, &dst.polytope) {
        return Err(Error::TropicalImage(format!(
            "image of {} entries not inside target",
            f.entries.len()
        )));
    }
    Ok(f)
}

/// `g ∘ f` by monomial substitution.
pub fn compose_morphisms(f: &ChartMorphism, g: &ChartMorphism) -> Result<ChartMorphism> {
    if f.target != g.source {
        return Err(Error::ChartMismatch("codomain of the first map is not the domain of the second".into()));
    }
    let m = f.source.tropical_dim();
    let mut entries = Vec::new();
    for ge in &g.entries {
        let mut coeff = ge.monomial.coeff.clone();
        let mut exps = vec![0i64; m];
        let mut smooth = ge.smooth.clone();
        for (fe, &k) in f.entries.iter().zip(&ge.monomial.exponents) {
            coeff = &coeff * &fe.monomial.coeff.pow(k)?;
            for (x, &a) in exps.iter_mut().zip(&fe.monomial.exponents) {
                *x += k * a;
            }
            for (name, &pw) in &fe.smooth {
                *smooth.entry(name.clone()).or_insert(0) += k * pw;
            }
        }
        smooth.retain(|_, v| *v != 0);
        entries.push(MorphismEntry { monomial: ExplodedMonomial::new(coeff, exps), smooth });
    }
    Ok(ChartMorphism { source: f.source.clone(), target: g.target.clone(), entries })
}

/// A fiber chart together with the inclusion of its tropical part into the
/// source tropical part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fiber {
    pub chart: Chart,
    pub inclusion: IntegralAffineMap,
}

impl Fiber {
    /// Restriction of a function on the source tropical part.
    pub fn restrict(&self, g: &MonoidElement) -> MonoidElement {
        let c = AffineConstraint { alpha: g.alpha.clone(), a: g.a.clone(), strict: false };
        let (alpha, a) = self.inclusion.pull_back(&c);
        MonoidElement::new(a, alpha)
    }
}

/// The fiber of a one-entry morphism over `value`: the slice
/// `{x ∈ P : a + x·α = ⌊value⌋}` in lattice coordinates on the kernel of
/// `α`, further reduced to its affine hull when it has no interior there.
pub fn fiber_of_monomial_map(f: &ChartMorphism, value: &ExplodedScalar) -> Result<Fiber> {
    if f.entries.len() != 1 {
        return Err(Error::Dimension("fiber needs a single-entry morphism".into()));
    }
    if !value.is_unit() {
        return Err(Error::NotInvertible(value.to_string()));
    }
    let t = value.tropical_part();
    if !f.target.polytope.contains(&[t.clone()]) {
        return Err(Error::NotInPolytope(format_rational(&t)));
    }
    let mon = &f.entries[0].monomial;
    let alpha = &mon.exponents;
    let a = mon.coeff.tropical_part();
    let p = &f.source.polytope;
    let m = p.dim;
    let mut x0 = vec![Rational::zero(); m];
    if let Some(j) = (0..m).filter(|&j| alpha[j] != 0).min_by_key(|&j| (alpha[j].abs(), j)) {
        x0[j] = (&t - &a) / rat(alpha[j]);
    } else if a != t {
        return Err(Error::EmptyFiber);
    }
    let kernel = linalg::kernel_basis(&[alpha.clone()], m);
    let k = kernel.len();
    let slice_map = IntegralAffineMap {
        matrix: (0..m).map(|r| (0..k).map(|c| kernel[c][r]).collect()).collect(),
        translation: x0,
        source_dim: k,
    };
    let mut constraints = Vec::new();
    for c in &p.constraints {
        let (na, off) = slice_map.pull_back(c);
        if na.iter().all(|&v| v == 0) {
            let ok = if c.strict { off.is_positive() } else { !off.is_negative() };
            if !ok {
                return Err(Error::EmptyFiber);
            }
        } else {
            constraints.push(AffineConstraint { alpha: na, a: off, strict: c.strict });
        }
    }
    let slice = Polytope { dim: k, constraints };
    if slice.is_empty() {
        return Err(Error::EmptyFiber);
    }
    let (polytope, inclusion) = if slice.has_nonempty_interior() {
        (slice, slice_map)
    } else {
        let faces = slice.faces();
        let top = faces.last().expect("nonempty slice");
        let hull = IntegralAffineMap {
            matrix: (0..k).map(|r| (0..top.dim).map(|c| top.basis[c][r]).collect()).collect(),
            translation: top.origin.clone(),
            source_dim: top.dim,
        };
        (top.polytope.clone(), slice_map.compose(&hull))
    };
    let lost = k - polytope.dim;
    let mut chart = Chart::new(f.source.n, polytope)?;
    chart.torus_rank = f.source.torus_rank + lost;
    Ok(Fiber { chart, inclusion })
}

/// Exponent of the monomial's value at tropical position `x`.
pub fn monomial_value_exponent(mon: &ExplodedMonomial, x: &[Rational]) -> Rational {
    dot_int(&mon.exponents, x) + mon.coeff.tropical_part()
}
