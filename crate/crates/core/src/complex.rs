//! Complexes of integral-affine polytopes. Each cell is a polytope in its
//! own lattice coordinates together with an injective integral-affine
//! embedding into a common ambient ℝ^N; identifications between cells are
//! derived from where their images meet.

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::affine::{self, AffineConstraint, IntegralAffineMap, Polytope};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{dot_int, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub polytope: Polytope,
    pub embedding: IntegralAffineMap,
}

/// The common face of cells `cells.0` and `cells.1`, as a polytope in its
/// own lattice coordinates with its two inclusions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub cells: (usize, usize),
    pub face: Polytope,
    pub maps: (IntegralAffineMap, IntegralAffineMap),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeComplex {
    pub ambient_dim: usize,
    pub cells: Vec<Cell>,
    pub gluings: Vec<Gluing>,
}

impl Cell {
    pub fn new(polytope: Polytope, embedding: IntegralAffineMap) -> Result<Self> {
        if embedding.source_dim != polytope.dim {
            return Err(Error::Dimension("embedding source differs from polytope dimension".into()));
        }
        if !embedding.is_injective() {
            return Err(Error::InvalidComplex("cell embedding is not injective".into()));
        }
        Ok(Self { polytope, embedding })
    }

    /// A cell that is its own ambient space.
    pub fn standalone(polytope: Polytope) -> Self {
        let m = polytope.dim;
        Self { polytope, embedding: IntegralAffineMap::identity(m) }
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim
    }

    /// Rational left inverse of the embedding's linear part, built from a
    /// set of pivot rows.
    fn left_inverse(&self) -> Vec<Vec<Rational>> {
        let e = &self.embedding.matrix;
        let d = self.dim();
        let n = e.len();
        let mut rows: Vec<usize> = Vec::new();
        for i in 0..n {
            let mut cand: Vec<Vec<i64>> = rows.iter().map(|&r| e[r].clone()).collect();
            cand.push(e[i].clone());
            if linalg::rank_int(&cand) == cand.len() {
                rows.push(i);
            }
            if rows.len() == d {
                break;
            }
        }
        let sub: Vec<Vec<i64>> = rows.iter().map(|&r| e[r].clone()).collect();
        let inv = linalg::inverse(&linalg::to_q(&sub)).unwrap_or_default();
        (0..d)
            .map(|i| {
                let mut out = vec![Rational::zero(); n];
                for (k, &r) in rows.iter().enumerate() {
                    out[r] = inv[i][k].clone();
                }
                out
            })
            .collect()
    }

    /// Own coordinates of an ambient point in the affine span of the image.
    pub fn preimage(&self, x: &[Rational]) -> Option<Vec<Rational>> {
        let t = &self.embedding.translation;
        let diff: Vec<Rational> = x.iter().zip(t).map(|(a, b)| a - b).collect();
        let y = linalg::mat_vec(&self.left_inverse(), &diff);
        (self.embedding.apply(&y) == x).then_some(y)
    }

    /// The image as a polytope in ℝ^N (lower-dimensional images carry
    /// their affine span as pairs of opposite inequalities).
    pub fn ambient_polytope(&self) -> Polytope {
        let n = self.embedding.target_dim();
        let d = self.dim();
        let t = &self.embedding.translation;
        let mut constraints = Vec::new();
        let et = linalg::transpose(&self.embedding.matrix, d);
        for l in linalg::kernel_basis(&et, n) {
            let c = dot_int(&l, t);
            constraints.push(AffineConstraint::ge(&l, -c.clone()));
            let neg: Vec<i64> = l.iter().map(|x| -x).collect();
            constraints.push(AffineConstraint::ge(&neg, c));
        }
        let linv = self.left_inverse();
        for c in &self.polytope.constraints {
            // α·E⁺(x − t) + a, cleared of denominators
            let beta: Vec<Rational> = (0..n)
                .map(|j| (0..d).fold(Rational::zero(), |acc, i| acc + rat(c.alpha[i]) * &linv[i][j]))
                .collect();
            let den = beta.iter().fold(num_bigint::BigInt::from(1), |acc, q| acc.lcm(q.denom()));
            let scale = Rational::from_integer(den);
            let alpha: Vec<i64> = beta
                .iter()
                .map(|q| crate::rational::to_i64(&(q * &scale)).expect("integral after scaling"))
                .collect();
            let off = (&c.a - beta.iter().zip(t).fold(Rational::zero(), |acc, (b, ti)| acc + b * ti)) * &scale;
            constraints.push(AffineConstraint { alpha, a: off, strict: c.strict });
        }
        Polytope { dim: n, constraints }
    }

    /// Constraints on own coordinates cutting out the preimage of an
    /// ambient polytope; `None` if some pulled-back constraint is a
    /// violated constant.
    fn pull_back(&self, amb: &Polytope) -> Option<Vec<AffineConstraint>> {
        let mut out = Vec::new();
        for c in &amb.constraints {
            let (alpha, a) = self.embedding.pull_back(c);
            if alpha.iter().all(|&x| x == 0) {
                let ok = if c.strict { a.is_positive() } else { !a.is_negative() };
                if !ok {
                    return None;
                }
            } else {
                out.push(AffineConstraint { alpha, a, strict: c.strict });
            }
        }
        Some(out)
    }

    pub fn contains_ambient(&self, x: &[Rational]) -> bool {
        self.preimage(x).is_some_and(|y| self.polytope.contains(&y))
    }
}

impl PolytopeComplex {
    /// Builds the complex and computes the identification of every pair
    /// of cells that meet. Fails unless each such intersection is a common
    /// face.
    pub fn new(ambient_dim: usize, cells: Vec<Cell>) -> Result<Self> {
        for (i, c) in cells.iter().enumerate() {
            if c.embedding.target_dim() != ambient_dim {
                return Err(Error::Dimension(format!("cell {i} embeds in the wrong dimension")));
            }
            if !c.polytope.is_complete() {
                return Err(Error::InvalidComplex(format!("cell {i} is not complete")));
            }
            if !c.polytope.has_nonempty_interior() {
                return Err(Error::InvalidComplex(format!("cell {i} has empty interior")));
            }
        }
        let amb: Vec<Polytope> = cells.iter().map(Cell::ambient_polytope).collect();
        let mut gluings = Vec::new();
        for (i, j) in (0..cells.len()).tuple_combinations() {
            if let Some(g) = glue(&cells, &amb, i, j)? {
                gluings.push(g);
            }
        }
        Ok(Self { ambient_dim, cells, gluings })
    }

    /// Recomputes the gluings and compares with the stored ones.
    pub fn validate(&self) -> Result<()> {
        let fresh = PolytopeComplex::new(self.ambient_dim, self.cells.clone())?;
        if fresh.gluings != self.gluings {
            return Err(Error::InvalidComplex("stored gluings differ from the cell geometry".into()));
        }
        Ok(())
    }

    pub fn cells_containing(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].contains_ambient(x)).collect()
    }

    /// Ambient vertices of all cells, deduplicated and sorted.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let mut out: Vec<Vec<Rational>> = self
            .cells
            .iter()
            .flat_map(|c| c.polytope.vertices().into_iter().map(|v| c.embedding.apply(&v)).collect::<Vec<_>>())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

fn glue(cells: &[Cell], amb: &[Polytope], i: usize, j: usize) -> Result<Option<Gluing>> {
    let Some(extra) = cells[i].pull_back(&amb[j]) else { return Ok(None) };
    let inter = cells[i].polytope.closure().with_constraints(extra);
    if inter.is_empty() {
        return Ok(None);
    }
    let Some(extra_j) = cells[j].pull_back(&amb[i]) else {
        return Err(Error::InvalidComplex(format!("cells {i} and {j} meet asymmetrically")));
    };
    let inter_j = cells[j].polytope.closure().with_constraints(extra_j);
    if !affine::meets_as_face(&cells[i].polytope.closure(), &inter)
        || !affine::meets_as_face(&cells[j].polytope.closure(), &inter_j)
    {
        return Err(Error::InvalidComplex(format!(
            "cells {i} and {j} do not meet in a common face"
        )));
    }
    let faces = inter.faces();
    let top = faces.last().expect("nonempty intersection has a face");
    let d = cells[i].dim();
    let k = top.dim;
    let phi_i = IntegralAffineMap {
        matrix: (0..d).map(|r| (0..k).map(|c| top.basis[c][r]).collect()).collect(),
        translation: top.origin.clone(),
        source_dim: k,
    };
    let to_amb = cells[i].embedding.compose(&phi_i);
    let linv = cells[j].left_inverse();
    let t = &cells[j].embedding.translation;
    let n = t.len();
    let mut matrix = Vec::new();
    for row in &linv {
        let mut out = Vec::new();
        for c in 0..k {
            let v = (0..n).fold(Rational::zero(), |acc, r| acc + &row[r] * rat(to_amb.matrix[r][c]));
            out.push(crate::rational::to_i64(&v).ok_or_else(|| {
                Error::InvalidComplex(format!("lattices of cells {i} and {j} disagree on their face"))
            })?);
        }
        matrix.push(out);
    }
    let diff: Vec<Rational> = to_amb.translation.iter().zip(t).map(|(a, b)| a - b).collect();
    let phi_j = IntegralAffineMap { matrix, translation: linalg::mat_vec(&linv, &diff), source_dim: k };
    Ok(Some(Gluing { cells: (i, j), face: top.polytope.clone(), maps: (phi_i, phi_j) }))
}
