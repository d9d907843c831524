//! Newton–Puiseux for monic `P(T)` over `K[z]/(z^M)`, restricted to the
//! shapes met by generic ramified and unramified blocks: at each root `c`
//! of `P(0, T)` of multiplicity `mu`, either `mu = 1` (Hensel) or a single
//! Newton segment from `(0, v0)` to `(mu, 0)` with `gcd(v0, mu) = 1`.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalars::{gcd_u64, Scalar, Q};
use crate::series::TruncSeries;
use num_bigint::BigInt;

/// One Galois orbit of roots `T(w)` with `w^e = z`, all sharing the
/// constant term `center`. `complete` is false when the field lacks the
/// roots of unity needed to list every conjugate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxOrbit {
    pub e: usize,
    pub center: Scalar,
    pub roots: Vec<TruncSeries>,
    pub complete: bool,
}

/// `P(c + S)` with coefficients in `S`.
pub(crate) fn taylor_shift_series(p: &[TruncSeries], c: &Scalar) -> Vec<TruncSeries> {
    let n = p.len();
    let mut binom = vec![vec![Q::from_integer(BigInt::from(0)); n]; n];
    for j in 0..n {
        binom[j][0] = Q::from_integer(BigInt::from(1));
        for i in 1..=j {
            binom[j][i] = &binom[j - 1][i - 1] + &binom[j - 1][i];
        }
    }
    (0..n)
        .map(|i| {
            let mut acc = p[i].clone();
            let mut cp = c.clone();
            for j in i + 1..n {
                acc = acc.add(&p[j].scale(&cp).scale_q(&binom[j][i]));
                cp = &cp * c;
            }
            acc
        })
        .collect()
}

/// Roots of `P` truncated at `w^target`, grouped by orbit, orbits ordered
/// by their constant terms.
pub fn newton_puiseux(p: &[TruncSeries], target: usize) -> Result<Vec<PuiseuxOrbit>> {
    let deg = p.len().checked_sub(1).ok_or_else(|| Error::Invalid("empty polynomial".into()))?;
    if deg == 0 || !p[deg].coeffs()[0].is_one() || p[deg].coeffs()[1..].iter().any(|c| !c.is_zero()) {
        return Err(Error::Invalid("newton_puiseux expects a monic polynomial of positive degree".into()));
    }
    let field = p[0].field().clone();
    let big_m = p[0].n();
    let p0 = Poly::new(&field, p.iter().map(|s| s.coeff(0)).collect());
    let roots = p0.roots().map_err(|e| Error::DegenerateNewtonPolygon(format!("leading polynomial: {e}")))?;
    let mut out = Vec::new();
    for (c, mu) in roots {
        let q = taylor_shift_series(p, &c);
        if mu == 1 {
            let r: Vec<TruncSeries> = q.clone();
            let d = r[1].coeff(0);
            if target > big_m {
                return Err(Error::TruncationTooShort(format!("unramified root known mod z^{big_m}, asked for {target}")));
            }
            let u = lift(&r, &field.zero(), &d, big_m)?;
            let root = u.add(&TruncSeries::constant(&c, 1, big_m)).resize(target);
            out.push(PuiseuxOrbit { e: 1, center: c, roots: vec![root], complete: true });
            continue;
        }
        let v0 = q[0].ord();
        if v0 >= big_m {
            return Err(Error::DegenerateNewtonPolygon("constant term vanishes to working precision".into()));
        }
        if gcd_u64(v0 as u64, mu as u64) != 1 {
            return Err(Error::DegenerateNewtonPolygon(format!("segment (0,{v0})-({mu},0) has interior lattice points")));
        }
        for (i, qi) in q.iter().enumerate().take(mu).skip(1) {
            if mu * qi.ord() < v0 * (mu - i) {
                return Err(Error::DegenerateNewtonPolygon("more than one slope at a multiple root".into()));
            }
        }
        if big_m <= v0 {
            return Err(Error::TruncationTooShort("no precision left after the Newton substitution".into()));
        }
        let prec = mu * (big_m - v0);
        if target > prec + v0 {
            return Err(Error::TruncationTooShort(format!(
                "roots known mod w^{}, asked for w^{target}",
                prec + v0
            )));
        }
        // R_i(w) = q_i(w^mu) w^(v0 i - v0 mu), known modulo w^prec.
        let r: Vec<TruncSeries> = q
            .iter()
            .enumerate()
            .map(|(i, qi)| {
                let s = qi.z_to_w(mu, prec + v0 * mu + 1);
                let sh = v0 * i;
                let tot = v0 * mu;
                let s = if sh >= tot {
                    s.shift(sh - tot)
                } else {
                    s.unshift(tot - sh).expect("Newton segment bounds the order")
                };
                s.resize(prec)
            })
            .collect();
        let qmu0 = q[mu].coeff(0);
        let gamma = -(q[0].coeff(v0).div(&qmu0)?);
        let u0s = gamma.nth_roots(mu as u32);
        if u0s.is_empty() {
            return Err(Error::RootNotInField { n: mu as u32 });
        }
        let complete = u0s.len() == mu;
        let mut roots = Vec::new();
        for u0 in u0s {
            let d = &qmu0.scale(&Q::from_integer(BigInt::from(mu))) * &u0.pow(mu as u32 - 1);
            let u = lift(&r, &u0, &d, prec)?;
            let full = u.resize(prec + v0).shift(v0).add(&TruncSeries::constant(&c, mu, prec + v0)).with_ram(mu);
            roots.push(full.resize(target));
        }
        out.push(PuiseuxOrbit { e: mu, center: c, roots, complete });
    }
    Ok(out)
}

/// Lifts a simple root `u0` of `R(U, 0)` to `R(U, w) = 0` modulo `w^prec`,
/// one coefficient at a time; `d = dR/dU (u0, 0)`.
fn lift(r: &[TruncSeries], u0: &Scalar, d: &Scalar, prec: usize) -> Result<TruncSeries> {
    let ram = r[0].ram();
    let dinv = d.inv().map_err(|_| Error::DegenerateNewtonPolygon("root is not simple".into()))?;
    let mut u = TruncSeries::constant(u0, ram, prec);
    for k in 1..prec {
        let val = eval(r, &u, k + 1);
        let ck = val.coeff(k);
        if !ck.is_zero() {
            u.set_coeff(k, -(&ck * &dinv));
        }
    }
    Ok(u)
}

fn eval(r: &[TruncSeries], u: &TruncSeries, n: usize) -> TruncSeries {
    let u = u.resize(n);
    let mut acc = TruncSeries::zero(u.field(), u.ram(), n);
    for ri in r.iter().rev() {
        acc = acc.mul(&u).add(&ri.resize(n).with_ram(u.ram()));
    }
    acc
}
