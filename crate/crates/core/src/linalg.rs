//! Dense exact linear algebra: rational elimination and integer lattice
//! reductions (column echelon with unimodular transform, Hermite form).

use num_traits::{One, Signed, Zero};

use crate::rational::{rat, Rational};

pub type QMatrix = Vec<Vec<Rational>>;
pub type ZMatrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution {
    Unique(Vec<Rational>),
    /// Consistent but with free variables; the particular solution sets
    /// every free variable to zero.
    Family { particular: Vec<Rational>, free: Vec<usize> },
    Inconsistent,
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut QMatrix, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pv = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = &*x / &pv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let (src, dst) = if r < row {
                    let (a, b) = m.split_at_mut(row);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = m.split_at_mut(r);
                    (&a[row], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d = &*d - &f * s;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &QMatrix) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let mut m = rows.clone();
    rref(&mut m, n).len()
}

pub fn rank_int(rows: &[Vec<i64>]) -> usize {
    rank(&to_q(rows))
}

pub fn to_q(rows: &[Vec<i64>]) -> QMatrix {
    rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
}

/// Solves `a x = b`.
pub fn solve(a: &QMatrix, b: &[Rational], ncols: usize) -> LinearSolution {
    let mut m: QMatrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, ncols);
    for row in m.iter().skip(pivots.len()) {
        if !row[ncols].is_zero() {
            return LinearSolution::Inconsistent;
        }
    }
    let mut x = vec![Rational::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][ncols].clone();
    }
    if pivots.len() == ncols {
        LinearSolution::Unique(x)
    } else {
        let free = (0..ncols).filter(|c| !pivots.contains(c)).collect();
        LinearSolution::Family { particular: x, free }
    }
}

pub fn det(m: &QMatrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        let pv = a[col][col].clone();
        d *= &pv;
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &pv;
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
    }
    d
}

pub fn det_int(m: &[Vec<i64>]) -> i64 {
    let d = det(&to_q(m));
    crate::rational::to_i64(&d).expect("integer determinant")
}

pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut aug: QMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug, n);
    if piv.len() < n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &QMatrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>], ncols: usize) -> Vec<Vec<T>> {
    (0..ncols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Column-echelon reduction over ℤ: returns `(h, u, rank)` with
/// `n · u = h`, `u` unimodular, the first `rank` columns of `h` in echelon
/// form and the remaining columns zero. `n` is `k × m`.
pub fn column_reduce(n: &[Vec<i64>], m: usize) -> (ZMatrix, ZMatrix, usize) {
    let k = n.len();
    let mut h: ZMatrix = n.to_vec();
    let mut u: ZMatrix = (0..m)
        .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
        .collect();
    let col_op = |mat: &mut ZMatrix, dst: usize, src: usize, q: i64| {
        for row in mat.iter_mut() {
            row[dst] -= q * row[src];
        }
    };
    let swap = |mat: &mut ZMatrix, a: usize, b: usize| {
        for row in mat.iter_mut() {
            row.swap(a, b);
        }
    };
    let mut c = 0;
    for i in 0..k {
        if c >= m {
            break;
        }
        loop {
            let nz: Vec<usize> = (c..m).filter(|&j| h[i][j] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&j) = nz.first() {
                    swap(&mut h, c, j);
                    swap(&mut u, c, j);
                    if h[i][c] < 0 {
                        for row in h.iter_mut().chain(u.iter_mut()) {
                            row[c] = -row[c];
                        }
                    }
                    c += 1;
                }
                break;
            }
            let &best = nz.iter().min_by_key(|&&j| h[i][j].abs()).unwrap();
            swap(&mut h, c, best);
            swap(&mut u, c, best);
            for j in c + 1..m {
                if h[i][j] != 0 {
                    let q = h[i][j].div_euclid(h[i][c]);
                    col_op(&mut h, j, c, q);
                    col_op(&mut u, j, c, q);
                }
            }
        }
    }
    (h, u, c)
}

/// Row Hermite normal form of a lattice basis (rows). The result is unique
/// for the lattice the rows span.
pub fn hermite_rows(basis: &[Vec<i64>]) -> ZMatrix {
    if basis.is_empty() {
        return Vec::new();
    }
    let m = basis[0].len();
    let mut b: ZMatrix = basis.to_vec();
    let mut row = 0;
    for col in 0..m {
        if row >= b.len() {
            break;
        }
        loop {
            let nz: Vec<usize> = (row..b.len()).filter(|&r| b[r][col] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&r) = nz.first() {
                    b.swap(row, r);
                    if b[row][col] < 0 {
                        for x in b[row].iter_mut() {
                            *x = -*x;
                        }
                    }
                    let pv = b[row][col];
                    for r2 in 0..row {
                        let q = b[r2][col].div_euclid(pv);
                        if q != 0 {
                            for j in 0..m {
                                b[r2][j] -= q * b[row][j];
                            }
                        }
                    }
                    row += 1;
                }
                break;
            }
            let &best = nz.iter().min_by_key(|&&r| b[r][col].abs()).unwrap();
            b.swap(row, best);
            for r in row + 1..b.len() {
                if b[r][col] != 0 {
                    let q = b[r][col].div_euclid(b[row][col]);
                    for j in 0..m {
                        b[r][j] -= q * b[row][j];
                    }
                }
            }
        }
    }
    b.truncate(row);
    b
}

/// Canonical basis (as rows) of the lattice `{x ∈ ℤ^m : n x = 0}`.
pub fn kernel_basis(n: &[Vec<i64>], m: usize) -> ZMatrix {
    let (_, u, r) = column_reduce(n, m);
    let cols: ZMatrix = (r..m).map(|j| u.iter().map(|row| row[j]).collect()).collect();
    hermite_rows(&cols)
}

/// Basis of `span_ℝ(vectors) ∩ ℤ^m` (saturation of the span).
pub fn saturated_span_basis(vectors: &[Vec<i64>], m: usize) -> ZMatrix {
    let perp = kernel_basis(vectors, m);
    kernel_basis(&perp, m)
}

pub fn is_unimodular(m: &[Vec<i64>]) -> bool {
    m.len() == m.first().map_or(0, |r| r.len()) && det_int(m).abs() == 1
}

pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = crate::rational::gcd_slice(v);
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Converts a rational vector to an integer one, if it is integral.
pub fn to_int_vec(v: &[Rational]) -> Option<Vec<i64>> {
    v.iter().map(crate::rational::to_i64).collect()
}

pub fn is_nonneg(q: &Rational) -> bool {
    !q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kernel_of_sum_functional() {
        let k = kernel_basis(&[vec![1, 1]], 2);
        assert_eq!(k, vec![vec![1, -1]]);
        let k = kernel_basis(&[vec![2, 4, 6]], 3);
        assert_eq!(k.len(), 2);
        for row in &k {
            assert_eq!(2 * row[0] + 4 * row[1] + 6 * row[2], 0);
        }
    }

    #[test]
    fn solve_cases() {
        let a = to_q(&[vec![1, 1], vec![1, -1]]);
        assert_eq!(solve(&a, &[rat(2), rat(0)], 2), LinearSolution::Unique(vec![rat(1), rat(1)]));
        let a = to_q(&[vec![1, 1], vec![2, 2]]);
        assert_eq!(solve(&a, &[rat(1), rat(3)], 2), LinearSolution::Inconsistent);
        assert!(matches!(solve(&a, &[rat(1), rat(2)], 2), LinearSolution::Family { .. }));
    }

    proptest! {
        #[test]
        fn column_reduce_is_unimodular(rows in prop::collection::vec(prop::collection::vec(-6i64..6, 3), 1..3)) {
            let (h, u, r) = column_reduce(&rows, 3);
            prop_assert_eq!(det_int(&u).abs(), 1);
            for (i, row) in rows.iter().enumerate() {
                for j in 0..3 {
                    let v: i64 = (0..3).map(|t| row[t] * u[t][j]).sum();
                    prop_assert_eq!(v, h[i][j]);
                }
            }
            prop_assert_eq!(r, rank_int(&rows));
            for row in &h {
                for j in r..3 {
                    prop_assert_eq!(row[j], 0);
                }
            }
        }

        #[test]
        fn hermite_is_basis_invariant(a in -5i64..5, b in -5i64..5, c in -5i64..5, d in -5i64..5) {
            prop_assume!(a * d - b * c != 0);
            let basis = vec![vec![a, b], vec![c, d]];
            let mixed = vec![vec![a + c, b + d], vec![c, d]];
            prop_assert_eq!(hermite_rows(&basis), hermite_rows(&mixed));
        }
    }
}
