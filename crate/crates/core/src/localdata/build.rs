use super::{flatten, unflatten, LocalRamifiedData};
use crate::error::{Error, Result};
use crate::formal::{recover_exponent, Exponent, FormalConnection};
use crate::linalg;
use crate::scalars::{Scalar, Q};
use crate::series::TruncSeries;
use crate::smat::{self, SMat};
use num_bigint::BigInt;

/// Output of [`build_from_formal`]: the data in the adapted frame and the
/// frame itself (columns `e_k` with `pi(e_k) = w^k`, modulo `z^m`).
#[derive(Clone, Debug)]
pub struct Built {
    pub data: LocalRamifiedData,
    pub frame: SMat,
    pub exponent: Exponent,
    pub quotient: Vec<TruncSeries>,
}

/// The quotient map `pi: W -> K[[w]]` intertwining `nabla` with `d + nu`,
/// as the images `p_j = pi(e_j)` modulo `w^{mr}`. Solves
/// `sum_j p_j A_jk(w^r) - nu p_k - (w^N/r) p_k' = 0` modulo a working order
/// above `w^{mr}` and projects; the projection must be a line.
pub fn eigen_quotient(conn: &FormalConnection, nu: &Exponent) -> Result<Vec<TruncSeries>> {
    let (r, m) = (conn.rank, conn.m);
    let n = nu.n();
    let target = m * r;
    let t = (2 * m * r).min(r * conn.big_m).max(target);
    let field = conn.field().clone();
    let nvars = r * t;
    let idx = |j: usize, s: usize| j * t + s;
    let inv_r = Q::new(BigInt::from(1), BigInt::from(r));
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(r * t);
    for k in 0..r {
        for s in 0..t {
            let mut row = vec![field.zero(); nvars];
            for j in 0..r {
                for tt in (s % r..=s).step_by(r) {
                    let c = conn.a[j][k].coeff((s - tt) / r);
                    if !c.is_zero() {
                        row[idx(j, tt)] = &row[idx(j, tt)] + &c;
                    }
                }
            }
            for l in 0..n.min(s + 1) {
                let c = &nu.c[l];
                if !c.is_zero() {
                    row[idx(k, s - l)] = &row[idx(k, s - l)] - c;
                }
            }
            // (w^N / r) p_k' contributes (tt/r) p_{k,tt} at order tt + N - 1.
            if s + 1 >= n {
                let tt = s + 1 - n;
                if tt >= 1 && tt < t {
                    let c = field.from_q(&inv_r * Q::from_integer(BigInt::from(tt)));
                    row[idx(k, tt)] = &row[idx(k, tt)] - &c;
                }
            }
            rows.push(row);
        }
    }
    let ns = linalg::nullspace(&rows, nvars, &field.zero());
    let projected: Vec<Vec<Scalar>> =
        ns.iter().map(|v| (0..r).flat_map(|j| (0..target).map(move |s| v[idx(j, s)].clone())).collect()).collect();
    let dim = linalg::rank(&projected, r * target);
    if dim != 1 {
        return Err(Error::NotIso(format!("intertwining quotient maps modulo w^{target} form a space of dimension {dim}")));
    }
    let v = projected.into_iter().find(|v| v.iter().any(|x| !x.is_zero())).expect("rank one");
    Ok((0..r).map(|j| TruncSeries::new(r, v[j * target..(j + 1) * target].to_vec())).collect())
}

/// Frame `e_k = (pi|_W)^{-1}(w^k)` modulo `z^m`, as the matrix whose
/// column `k` is `e_k`.
pub fn frame_from_quotient(p: &[TruncSeries], m: usize) -> Result<SMat> {
    let r = p.len();
    let dim = r * m;
    let field = p[0].field().clone();
    // Column (j, i) is pi(z^i e_j) = w^{ri} p_j modulo w^{mr}.
    let mut rows = vec![vec![field.zero(); dim]; dim];
    for j in 0..r {
        for i in 0..m {
            let img = p[j].resize(dim).shift(r * i);
            for (s, row) in rows.iter_mut().enumerate() {
                row[j * m + i] = img.coeff(s);
            }
        }
    }
    let inv = linalg::inverse(&rows).ok_or_else(|| Error::NotIso("pi restricted to W is not bijective modulo z^m".into()))?;
    let mut frame = smat::zero(&field, r, 1, m);
    for k in 0..r {
        let x: Vec<Scalar> = (0..dim).map(|c| inv[c][k].clone()).collect();
        for (j, s) in unflatten(&x, r, m).into_iter().enumerate() {
            frame[j][k] = s;
        }
    }
    Ok(frame)
}

/// Local data of a formal connection of generic ramified type. When
/// `quotient` is `None` the quotient map is computed from the connection;
/// a supplied one must intertwine `nabla` with the recovered exponent.
pub fn build_from_formal(conn: &FormalConnection, quotient: Option<&[TruncSeries]>) -> Result<Built> {
    let (r, m) = (conn.rank, conn.m);
    let nu = recover_exponent(conn)?;
    let p = match quotient {
        Some(q) => {
            if q.len() != r || q.iter().any(|s| s.ram() != r) {
                return Err(Error::Invalid("quotient map must list r series in w".into()));
            }
            q.iter().map(|s| s.resize(m * r)).collect()
        }
        None => eigen_quotient(conn, &nu)?,
    };
    let frame = frame_from_quotient(&p, m)?;
    let a = smat::resize(&conn.a, m);
    let fi = smat::inverse(&frame)?;
    let b = smat::mul(&smat::mul(&fi, &a), &frame);
    let data = LocalRamifiedData::with_canonical_maps(&nu, b);
    if quotient.is_some() && !data.verify().all_pass() {
        return Err(Error::NotIso("the supplied quotient map does not intertwine the connection".into()));
    }
    Ok(Built { data, frame, exponent: nu, quotient: p })
}

/// `V_0`-coordinates of the frame columns, used by the reconstruction claim.
pub(crate) fn frame_columns(frame: &SMat, m: usize) -> Vec<Vec<Scalar>> {
    let r = frame.len();
    (0..r).map(|k| flatten(&(0..r).map(|j| frame[j][k].clone()).collect::<Vec<_>>(), m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::pushforward_ramified;
    use crate::scalars::Field;

    #[test]
    fn identity_chart_for_the_model() {
        let f = Field::cyclotomic(3);
        let nu = Exponent::new(3, 2, [2, 1, -1, 3].iter().map(|&x| f.from_int(x)).collect()).unwrap();
        let conn = pushforward_ramified(&nu, 2);
        let built = build_from_formal(&conn, None).unwrap();
        assert!(built.data.verify().all_pass());
        // The frame is a constant multiple of the identity.
        let c = built.frame[0][0].coeff(0);
        for j in 0..3 {
            for k in 0..3 {
                let expect = if j == k { TruncSeries::constant(&c, 1, 2) } else { TruncSeries::zero(&f, 1, 2) };
                assert_eq!(built.frame[j][k], expect);
            }
        }
        assert_eq!(built.data, LocalRamifiedData::canonical(&nu));
    }
}
