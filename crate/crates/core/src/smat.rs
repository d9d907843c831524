//! Square matrices whose entries live in a common truncated series ring.

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalars::{Field, Scalar};
use crate::series::TruncSeries;

pub type SMat = Vec<Vec<TruncSeries>>;

pub fn zero(field: &Field, n: usize, r: usize, len: usize) -> SMat {
    vec![vec![TruncSeries::zero(field, r, len); n]; n]
}

pub fn identity(field: &Field, n: usize, r: usize, len: usize) -> SMat {
    let mut m = zero(field, n, r, len);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = TruncSeries::one(field, r, len);
    }
    m
}

pub fn add(a: &SMat, b: &SMat) -> SMat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.add(q)).collect()).collect()
}

pub fn sub(a: &SMat, b: &SMat) -> SMat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.sub(q)).collect()).collect()
}

pub fn scale(a: &SMat, c: &Scalar) -> SMat {
    a.iter().map(|x| x.iter().map(|p| p.scale(c)).collect()).collect()
}

pub fn mul(a: &SMat, b: &SMat) -> SMat {
    let n = a.len();
    let k = b.len();
    let cols = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let mut acc = a[i][0].mul(&b[0][j]);
                    for t in 1..k {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            acc = acc.add(&a[i][t].mul(&b[t][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Constant matrix of coefficients at order `k`.
pub fn coeff(a: &SMat, k: usize) -> Vec<Vec<Scalar>> {
    a.iter().map(|row| row.iter().map(|s| s.coeff(k)).collect()).collect()
}

/// Inverse of a matrix with invertible constant term, by the recursion
/// `h_k = -g_0^{-1} sum_{j>=1} g_j h_{k-j}`.
pub fn inverse(g: &SMat) -> Result<SMat> {
    let n = g.len();
    let s = &g[0][0];
    let (field, r, len) = (s.field().clone(), s.ram(), s.n());
    let g0inv = linalg::inverse(&coeff(g, 0)).ok_or(Error::DivisionByZero)?;
    let mut h: Vec<Vec<Vec<Scalar>>> = vec![g0inv.clone()];
    for k in 1..len {
        let mut acc = vec![vec![field.zero(); n]; n];
        for j in 1..=k {
            let gj = coeff(g, j);
            if gj.iter().flatten().all(Scalar::is_zero) {
                continue;
            }
            let p = linalg::matmul(&gj, &h[k - j]);
            for (ar, pr) in acc.iter_mut().zip(p) {
                for (x, y) in ar.iter_mut().zip(pr) {
                    *x = &*x + &y;
                }
            }
        }
        let hk = linalg::matmul(&g0inv, &acc);
        h.push(hk.into_iter().map(|row| row.into_iter().map(|x| -x).collect()).collect());
    }
    Ok((0..n)
        .map(|i| (0..n).map(|j| TruncSeries::new(r, (0..len).map(|k| h[k][i][j].clone()).collect())).collect())
        .collect())
}

pub fn resize(a: &SMat, len: usize) -> SMat {
    a.iter().map(|row| row.iter().map(|s| s.resize(len)).collect()).collect()
}

pub fn derivative(a: &SMat) -> SMat {
    a.iter().map(|row| row.iter().map(TruncSeries::derivative).collect()).collect()
}

pub fn shift(a: &SMat, k: usize) -> SMat {
    a.iter().map(|row| row.iter().map(|s| s.shift(k)).collect()).collect()
}

pub fn trace(a: &SMat) -> TruncSeries {
    let mut acc = a[0][0].clone();
    for (i, row) in a.iter().enumerate().skip(1) {
        acc = acc.add(&row[i]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let f = Field::rationals();
        let s = |c: &[i64]| TruncSeries::new(1, c.iter().map(|&x| f.from_int(x)).collect());
        let g = vec![vec![s(&[1, 2, 0, 1]), s(&[0, 1, 1, 0])], vec![s(&[3, 0, 0, 5]), s(&[1, 0, 2, 0])]];
        // det(g(0)) = 1*1 - 0*3 = 1.
        let h = inverse(&g).unwrap();
        assert_eq!(mul(&g, &h), identity(&f, 2, 1, 4));
        assert_eq!(mul(&h, &g), identity(&f, 2, 1, 4));
    }
}
