//! Exact Gaussian elimination over any field whose elements implement
//! [`FieldElem`]. Matrices are dense row vectors; elimination skips zero
//! entries, which keeps the sparse systems built by the cohomology and
//! reconstruction code cheap.

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;

/// Minimal exact-field interface used by the solvers.
pub trait FieldElem: Clone + Debug {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
}

impl FieldElem for BigRational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Reduces `m` in place to reduced row echelon form over its first `ncols`
/// columns and returns the pivot columns. Rows beyond the rank become zero.
pub fn rref<E: FieldElem>(m: &mut [Vec<E>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inverse().expect("nonzero pivot");
        let width = m[row].len();
        for j in col..width {
            if !m[row][j].is_zero() {
                m[row][j] = m[row][j].times(&inv);
            }
        }
        let pivot_row = m[row].clone();
        let support: Vec<usize> = (col..width).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, r) in m.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for &j in &support {
                r[j] = r[j].minus(&f.times(&pivot_row[j]));
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Rank of the matrix given by `rows` (all rows of width `ncols`).
pub fn rank<E: FieldElem>(rows: &[Vec<E>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : M x = 0}` for `M` with `ncols` columns. `zero` supplies
/// the field when `rows` is empty.
pub fn nullspace<E: FieldElem>(rows: &[Vec<E>], ncols: usize, zero: &E) -> Vec<Vec<E>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let one = zero.one_like();
    let mut is_pivot = vec![None; ncols];
    for (r, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![zero.clone(); ncols];
        v[free] = one.clone();
        for (r, &c) in pivots.iter().enumerate() {
            if !m[r][free].is_zero() {
                v[c] = m[r][free].negate();
            }
        }
        basis.push(v);
    }
    basis
}

/// Solves `M x = b`. Returns a particular solution and a nullspace basis,
/// or `None` when the system is inconsistent.
pub fn solve<E: FieldElem>(
    rows: &[Vec<E>],
    rhs: &[E],
    ncols: usize,
    zero: &E,
) -> Option<(Vec<E>, Vec<Vec<E>>)> {
    assert_eq!(rows.len(), rhs.len());
    let mut aug: Vec<Vec<E>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols);
    for r in aug.iter().skip(pivots.len()) {
        if !r[ncols].is_zero() {
            return None;
        }
    }
    let mut x = vec![zero.clone(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][ncols].clone();
    }
    Some((x, nullspace(rows, ncols, zero)))
}

/// Inverse of a square matrix, if it exists.
pub fn inverse<E: FieldElem>(m: &[Vec<E>]) -> Option<Vec<Vec<E>>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let zero = m[0][0].zero_like();
    let one = zero.one_like();
    let mut aug: Vec<Vec<E>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { one.clone() } else { zero.clone() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug, n);
    if pivots.len() < n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Product of two dense matrices.
pub fn matmul<E: FieldElem>(a: &[Vec<E>], b: &[Vec<E>]) -> Vec<Vec<E>> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = row[0].zero_like();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc = acc.plus(&row[k].times(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Indices of a maximal subset of `candidates` that is linearly independent
/// modulo the span of `base`. Used to extract cohomology representatives.
pub fn complement_indices<E: FieldElem>(base: &[Vec<E>], candidates: &[Vec<E>], ncols: usize) -> Vec<usize> {
    // Echelon rows sorted by pivot; each row vanishes left of its pivot
    // and is normalised to 1 there.
    let mut echelon: Vec<(usize, Vec<E>)> = Vec::new();
    let insert = |v: &[E], echelon: &mut Vec<(usize, Vec<E>)>| -> bool {
        let mut v = v.to_vec();
        for (p, row) in echelon.iter() {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for j in *p..ncols {
                if !row[j].is_zero() {
                    v[j] = v[j].minus(&f.times(&row[j]));
                }
            }
        }
        let Some(p) = (0..ncols).find(|&j| !v[j].is_zero()) else {
            return false;
        };
        let inv = v[p].inverse().expect("nonzero pivot");
        for x in v.iter_mut().skip(p) {
            if !x.is_zero() {
                *x = x.times(&inv);
            }
        }
        let at = echelon.partition_point(|(q, _)| *q < p);
        echelon.insert(at, (p, v));
        true
    };
    for b in base {
        insert(b, &mut echelon);
    }
    candidates.iter().enumerate().filter(|(_, c)| insert(c, &mut echelon)).map(|(i, _)| i).collect()
}
