use super::connection::{GlobalConnection, Position};
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Poly;
use crate::scalars::{Scalar, Q};
use crate::series::TruncSeries;
use crate::smat;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

/// `F = O(e_1) + ... + O(e_k) -> E`, the inclusion written in the `U_0`
/// frames as an `r x k` matrix; entry `(a, c)` has degree at most
/// `d_a - e_c`.
#[derive(Clone, Debug)]
pub struct Subbundle {
    pub degrees: Vec<i64>,
    pub inclusion: Vec<Vec<Poly>>,
}

/// A ∇-invariant line subbundle with its parabolic slope against `E`.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeWitness {
    /// Degree of the saturated line subbundle.
    pub degree: i64,
    /// Block chosen at every pole.
    pub assignment: Vec<usize>,
    /// Section coefficients, low to high, one list per summand of `E`.
    pub section: Vec<Vec<String>>,
    pub sub_slope: String,
    pub total_slope: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StabilityVerdict {
    /// A pole carries a single ramified block with `c_1 != 0`, so no proper
    /// formal subobject exists.
    AutoStable { pole: usize },
    Stable { candidates: usize },
    /// Some invariant subbundle has slope equal to that of `E`.
    SemistableNotStable { witness: SlopeWitness },
    Unstable { witness: SlopeWitness },
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, StabilityVerdict::AutoStable { .. } | StabilityVerdict::Stable { .. })
    }
}

fn integer(x: &Q) -> Option<i64> {
    x.is_integer().then(|| x.to_integer().try_into().ok()).flatten()
}

/// Saturation of a section `s` of `Hom(O(e), E)`: divides out common finite
/// zeros and zeros at infinity; returns the new degree and section.
fn saturate(gc: &GlobalConnection, e: i64, s: &[Poly]) -> Result<(i64, Vec<Poly>)> {
    let mut g = Poly::zero(&gc.field);
    for p in s {
        if !p.is_zero() {
            g = if g.is_zero() { p.monic()? } else { g.gcd(p) };
        }
    }
    if g.is_zero() {
        return Err(Error::Invalid("the inclusion vanishes".into()));
    }
    let s: Vec<Poly> = s.iter().map(|p| p.div_rem(&g).map(|x| x.0)).collect::<Result<_>>()?;
    let mut e = e + g.degree().unwrap_or(0) as i64;
    let slack = s
        .iter()
        .zip(&gc.splitting)
        .filter_map(|(p, &d)| p.degree().map(|k| d - e - k as i64))
        .min()
        .expect("nonzero section");
    if slack < 0 {
        return Err(Error::Invalid("inclusion entry exceeds the degree allowed by the splitting".into()));
    }
    e += slack;
    Ok((e, s))
}

/// Local column of the line spanned by `s` (saturated, degree `e`) at pole
/// `i`, in adapted coordinates modulo `x^m`.
fn local_line(gc: &GlobalConnection, i: usize, e: i64, s: &[Poly]) -> Result<Vec<TruncSeries>> {
    let p = &gc.poles[i];
    let m = p.m;
    let col: Vec<TruncSeries> = match &p.position {
        Position::Finite(t) => s.iter().map(|q| TruncSeries::new(1, (0..m).map(|k| q.taylor_shift(t).coeff(k)).collect())).collect(),
        Position::Infinity => s
            .iter()
            .zip(&gc.splitting)
            .map(|(q, &d)| {
                let mut c = vec![gc.field.zero(); m];
                if let Some(deg) = q.degree() {
                    let off = (d - e - deg as i64) as usize;
                    for k in 0..=deg {
                        if off + k < m {
                            c[off + k] = q.coeff(deg - k);
                        }
                    }
                }
                TruncSeries::new(1, c)
            })
            .collect(),
    };
    let pinv = smat::inverse(&p.frame)?;
    Ok((0..col.len())
        .map(|a| {
            let mut acc = TruncSeries::zero(&gc.field, 1, m);
            for (b, cb) in col.iter().enumerate() {
                acc = acc.add(&pinv[a][b].mul(cb));
            }
            acc
        })
        .collect())
}

/// `sum_j alpha_j length(F ∩ l_{j-1} / F ∩ l_j)` at pole `i` for the line
/// with adapted column `y`.
fn weighted_lengths(gc: &GlobalConnection, i: usize, y: &[TruncSeries]) -> Q {
    let p = &gc.poles[i];
    let (r, m) = (gc.rank(), p.m);
    let owner: Vec<usize> = p.blocks.iter().enumerate().flat_map(|(j, b)| std::iter::repeat_n(j, b.r)).collect();
    let f_rows: Vec<Vec<Scalar>> = (0..m)
        .map(|sh| {
            let mut v = Vec::with_capacity(r * m);
            for ya in y {
                let s = ya.shift(sh);
                v.extend((0..m).map(|k| s.coeff(k)));
            }
            v
        })
        .collect();
    let dim_f = linalg::rank(&f_rows, r * m);
    let inter = |j: usize| -> usize {
        let mut rows = f_rows.clone();
        let mut dim_l = 0;
        for (a, &o) in owner.iter().enumerate() {
            if o >= j {
                for k in 0..m {
                    let mut v = vec![gc.field.zero(); r * m];
                    v[a * m + k] = gc.field.one();
                    rows.push(v);
                    dim_l += 1;
                }
            }
        }
        dim_f + dim_l - linalg::rank(&rows, r * m)
    };
    let mut total = Q::zero();
    for (j, w) in p.weights.iter().enumerate() {
        let len = inter(j) - inter(j + 1);
        total += w * Q::from_integer(BigInt::from(len));
    }
    total
}

/// `deg F + sum_i sum_j alpha_j length(F|_{m_i t_i} ∩ l_{j-1} / F ∩ l_j)`
/// for a line subbundle (saturated first) or for `F = E`.
pub fn parabolic_degree(f: &Subbundle, gc: &GlobalConnection) -> Result<Q> {
    let r = gc.rank();
    let k = f.degrees.len();
    if k == 0 || f.inclusion.len() != r || f.inclusion.iter().any(|row| row.len() != k) {
        return Err(Error::Invalid("subbundle must have rank >= 1 and an r x k inclusion".into()));
    }
    if k == r {
        let mut pd = Q::from_integer(BigInt::from(gc.degree()));
        for p in &gc.poles {
            for (w, b) in p.weights.iter().zip(&p.blocks) {
                pd += w * Q::from_integer(BigInt::from(p.m * b.r));
            }
        }
        return Ok(pd);
    }
    if k != 1 {
        return Err(Error::Unsupported("parabolic degree of intermediate ranks".into()));
    }
    let col: Vec<Poly> = f.inclusion.iter().map(|row| row[0].clone()).collect();
    let (e, s) = saturate(gc, f.degrees[0], &col)?;
    let mut pd = Q::from_integer(BigInt::from(e));
    for i in 0..gc.poles.len() {
        let y = local_line(gc, i, e, &s)?;
        pd += weighted_lengths(gc, i, &y);
    }
    Ok(pd)
}

/// Stability against every weight via formal irreducibility, or an
/// exhaustive search over invariant line subbundles in rank 2: each choice
/// of one rank-one block per pole fixes the residues of the candidate and,
/// through the Fuchs relation, its degree; horizontal inclusions are then
/// a linear system.
pub fn is_stable(gc: &GlobalConnection) -> Result<StabilityVerdict> {
    let r = gc.rank();
    if r == 1 {
        return Ok(StabilityVerdict::Stable { candidates: 0 });
    }
    for (i, p) in gc.poles.iter().enumerate() {
        if p.blocks.len() == 1 && p.blocks[0].nu[0].generic_c1() {
            return Ok(StabilityVerdict::AutoStable { pole: i });
        }
    }
    if r != 2 {
        return Err(Error::Inconclusive(format!("rank {r} without a single-block ramified pole")));
    }
    if gc.poles.iter().any(|p| p.blocks.len() != 2) {
        return Err(Error::Inconclusive("a rank-2 block without c_1 != 0 admits no line search here".into()));
    }
    let e_full = Subbundle { degrees: gc.splitting.clone(), inclusion: identity_inclusion(gc) };
    let total = parabolic_degree(&e_full, gc)? / Q::from_integer(BigInt::from(2));
    let n = gc.poles.len();
    let mut candidates = 0;
    let mut semistable: Option<SlopeWitness> = None;
    for mask in 0..(1usize << n) {
        let assignment: Vec<usize> = (0..n).map(|i| (mask >> i) & 1).collect();
        let Some((d, lambda)) = candidate_form(gc, &assignment)? else { continue };
        for s in horizontal_sections(gc, d, &lambda)? {
            candidates += 1;
            let f = Subbundle { degrees: vec![d], inclusion: s.iter().map(|p| vec![p.clone()]).collect() };
            let sub = parabolic_degree(&f, gc)?;
            let (deg, sat) = saturate(gc, d, &s)?;
            let witness = SlopeWitness {
                degree: deg,
                assignment: assignment.clone(),
                section: sat.iter().map(|p| p.coeffs().iter().map(Scalar::render).collect()).collect(),
                sub_slope: sub.to_string(),
                total_slope: total.to_string(),
            };
            if sub > total {
                return Ok(StabilityVerdict::Unstable { witness });
            }
            if sub == total && semistable.is_none() {
                semistable = Some(witness);
            }
        }
    }
    Ok(match semistable {
        Some(witness) => StabilityVerdict::SemistableNotStable { witness },
        None => StabilityVerdict::Stable { candidates },
    })
}

fn identity_inclusion(gc: &GlobalConnection) -> Vec<Vec<Poly>> {
    let r = gc.rank();
    (0..r)
        .map(|a| (0..r).map(|b| if a == b { Poly::constant(&gc.field.one()) } else { Poly::zero(&gc.field) }).collect())
        .collect()
}

/// Degree and numerator `L` (over the common denominator) of the rank-one
/// connection with the chosen block exponents, or `None` when the Fuchs
/// relation gives a non-integral degree.
fn candidate_form(gc: &GlobalConnection, assignment: &[usize]) -> Result<Option<(i64, Poly)>> {
    let field = &gc.field;
    let mut res_sum = Q::zero();
    for (p, &j) in gc.poles.iter().zip(assignment) {
        let nu = &p.blocks[j].nu[0];
        match nu.residue().as_rational() {
            Some(q) => res_sum += q,
            None => return Ok(None),
        }
    }
    let Some(d) = integer(&-res_sum) else { return Ok(None) };
    if d > *gc.splitting.iter().max().expect("rank >= 1") {
        return Ok(None);
    }
    let delta = gc.denominator();
    let mut l = Poly::zero(field);
    for (p, &j) in gc.poles.iter().zip(assignment) {
        if let Position::Finite(t) = &p.position {
            let nu = &p.blocks[j].nu[0];
            let lin = Poly::linear_root(t);
            let mut num = Poly::zero(field);
            for (k, c) in nu.c.iter().enumerate() {
                num = num.add(&lin.pow(k).scale(c));
            }
            let (rest, rem) = delta.div_rem(&lin.pow(p.m))?;
            debug_assert!(rem.is_zero());
            l = l.add(&num.mul(&rest));
        }
    }
    if let Some((i, p)) = gc.poles.iter().enumerate().find(|(_, p)| p.position == Position::Infinity) {
        let target = &p.blocks[assignment[i]].nu[0].c;
        let probe = rank_one(gc, d, &l);
        let e = probe.local_matrix(i, p.m)?.swap_remove(0).swap_remove(0);
        let mut q = Poly::zero(field);
        for k in 0..p.m.saturating_sub(1) {
            let pos = p.m - 2 - k;
            q = q.add(&Poly::monomial(&(&e.coeff(pos) - &target[pos]), k));
        }
        l = l.add(&q.mul(&delta));
    }
    Ok(Some((d, l)))
}

/// Probe used only to expand `L` at infinity.
fn rank_one(gc: &GlobalConnection, d: i64, l: &Poly) -> GlobalConnection {
    let poles = gc
        .poles
        .iter()
        .map(|p| super::Pole {
            position: p.position.clone(),
            m: p.m,
            frame: smat::identity(&gc.field, 1, 1, p.m),
            blocks: vec![p.blocks[0].clone()],
            weights: vec![p.weights[0].clone()],
        })
        .collect::<Vec<_>>();
    GlobalConnection { field: gc.field.clone(), splitting: vec![d], numerators: vec![vec![l.clone()]], poles }
}

/// Nonzero `s: O(d) -> E` with `Delta s' + A s - L s = 0`, as a basis of
/// the solution space.
fn horizontal_sections(gc: &GlobalConnection, d: i64, l: &Poly) -> Result<Vec<Vec<Poly>>> {
    let field = &gc.field;
    let r = gc.rank();
    let delta = gc.denominator();
    let sizes: Vec<usize> = gc.splitting.iter().map(|&da| if da >= d { (da - d + 1) as usize } else { 0 }).collect();
    let nvars: usize = sizes.iter().sum();
    if nvars == 0 {
        return Ok(Vec::new());
    }
    let mut images: Vec<Vec<Poly>> = Vec::with_capacity(nvars);
    for (b, &nb) in sizes.iter().enumerate() {
        for k in 0..nb {
            let zk = Poly::monomial(&field.one(), k);
            let img = (0..r)
                .map(|a| {
                    let mut v = gc.numerators[a][b].mul(&zk);
                    if a == b {
                        v = v.add(&delta.mul(&zk.derivative())).sub(&l.mul(&zk));
                    }
                    v
                })
                .collect();
            images.push(img);
        }
    }
    let maxdeg = images.iter().flatten().filter_map(Poly::degree).max().unwrap_or(0) + 1;
    let rows: Vec<Vec<Scalar>> = (0..r)
        .flat_map(|a| {
            let images = &images;
            (0..maxdeg).map(move |t| images.iter().map(|img| img[a].coeff(t)).collect())
        })
        .collect();
    let ns = linalg::nullspace(&rows, nvars, &field.zero());
    Ok(ns
        .into_iter()
        .map(|v| {
            let mut out = Vec::with_capacity(r);
            let mut at = 0;
            for &nb in &sizes {
                out.push(Poly::new(field, v[at..at + nb].to_vec()));
                at += nb;
            }
            out
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::connection::tests::{poly, rank_two_model};
    use super::super::connection::PoleSpec;
    use super::*;
    use crate::scalars::{q, Field};

    fn two_pole(f: &Field, splitting: Vec<i64>, a: Vec<Vec<Poly>>, w0: [Q; 2], w1: [Q; 2]) -> GlobalConnection {
        let specs = vec![
            PoleSpec { position: Position::Finite(f.zero()), m: 1, block_sizes: vec![1, 1], weights: w0.to_vec() },
            PoleSpec { position: Position::Infinity, m: 1, block_sizes: vec![1, 1], weights: w1.to_vec() },
        ];
        let gc = GlobalConnection::from_matrix(f.clone(), splitting, a, specs).unwrap();
        assert!(gc.check().all_pass(), "{:?}", gc.check().checks);
        gc
    }

    #[test]
    fn ramified_single_block_is_auto_stable() {
        assert!(matches!(is_stable(&rank_two_model()).unwrap(), StabilityVerdict::AutoStable { pole: 0 }));
    }

    #[test]
    fn equal_slopes_are_semistable_only() {
        let f = Field::rationals();
        let a = vec![vec![Poly::constant(&f.rat(1, 3)), Poly::zero(&f)], vec![Poly::zero(&f), Poly::constant(&f.rat(-1, 4))]];
        let gc = two_pole(&f, vec![1, 0], a, [q(1, 5), q(3, 5)], [q(1, 10), q(7, 10)]);
        match is_stable(&gc).unwrap() {
            StabilityVerdict::SemistableNotStable { witness } => {
                assert_eq!(witness.sub_slope, witness.total_slope);
                assert_eq!(witness.total_slope, "13/10");
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn invariant_trivial_summand_destabilises() {
        let f = Field::rationals();
        let a = vec![vec![Poly::constant(&f.rat(1, 3)), poly(&f, &[0, 1])], vec![Poly::zero(&f), Poly::constant(&f.rat(-1, 4))]];
        let gc = two_pole(&f, vec![0, -2], a, [q(1, 5), q(3, 5)], [q(1, 10), q(7, 10)]);
        match is_stable(&gc).unwrap() {
            StabilityVerdict::Unstable { witness } => {
                assert_eq!(witness.degree, 0);
                // O ⊂ E meets l_1 trivially at both poles: 0 + 1/5 + 1/10.
                assert_eq!(witness.sub_slope, "3/10");
                let f_line = Subbundle { degrees: vec![0], inclusion: vec![vec![Poly::constant(&f.one())], vec![Poly::zero(&f)]] };
                assert_eq!(parabolic_degree(&f_line, &gc).unwrap(), q(3, 10));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn full_bundle_degree() {
        let gc = rank_two_model();
        let e = Subbundle { degrees: gc.splitting.clone(), inclusion: identity_inclusion(&gc) };
        assert_eq!(parabolic_degree(&e, &gc).unwrap(), q(-1, 1) + q(1, 2) * q(8, 1));
        let empty = Subbundle { degrees: vec![], inclusion: vec![vec![], vec![]] };
        assert!(parabolic_degree(&empty, &gc).is_err());
    }
}
