//! Tangent space of the moduli problem as the hypercohomology `H^1` of the
//! two-term complex `F^0 -> F^1` on P¹, computed with the cover
//! `U_0 = P¹ - {∞}`, `U_1 = P¹ - {0}`, and the trace pairing on it.
//!
//! All sections are stored as Laurent polynomial matrices in `z` in the
//! `U_0` frame `e_a`; regularity on `U_1` is a degree bound twisted by the
//! splitting type. Poles are therefore restricted to `0` and `∞`.
//!
//! Infinite-dimensional section spaces are replaced by degree windows. The
//! window for `H^1` is `[-B, B]` on `U_01`; the degree-0 cochains and the
//! `F^1` pieces get margins so that every coboundary of a window cocycle is
//! seen. The result is certified by recomputing at `B + 1` and `B + 2`.

mod local;

use crate::error::{Error, Result};
use crate::global::{GlobalConnection, Position};
use crate::linalg;
use crate::scalars::{Field, Scalar};
use crate::smat::{self, SMat};
use local::PoleConditions;
use std::collections::{BTreeMap, HashMap};

/// Laurent polynomial in `z`; only nonzero terms are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    field: Field,
    terms: BTreeMap<i64, Scalar>,
}

impl Laurent {
    pub fn zero(field: &Field) -> Laurent {
        Laurent { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(c: &Scalar, k: i64) -> Laurent {
        let mut l = Laurent::zero(c.field());
        l.add_term(k, c);
        l
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeff(&self, k: i64) -> Scalar {
        self.terms.get(&k).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Nonzero terms in increasing degree.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, k: i64, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let s = &self.coeff(k) + c;
        if s.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, s);
        }
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (k, c) in o.terms() {
            out.add_term(k, c);
        }
        out
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        self.add(&o.scale(&-self.field.one()))
    }

    pub fn scale(&self, s: &Scalar) -> Laurent {
        let mut out = Laurent::zero(&self.field);
        for (k, c) in self.terms() {
            out.add_term(k, &(c * s));
        }
        out
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut out = Laurent::zero(&self.field);
        for (i, a) in self.terms() {
            for (j, b) in o.terms() {
                out.add_term(i + j, &(a * b));
            }
        }
        out
    }

    pub fn derivative(&self) -> Laurent {
        let mut out = Laurent::zero(&self.field);
        for (k, c) in self.terms() {
            out.add_term(k - 1, &(c * &self.field.from_int(k)));
        }
        out
    }
}

/// Square matrix of Laurent polynomials.
pub type LMat = Vec<Vec<Laurent>>;

fn lzero(field: &Field, r: usize) -> LMat {
    vec![vec![Laurent::zero(field); r]; r]
}

fn lunit(field: &Field, r: usize, a: usize, b: usize, c: &Scalar, k: i64) -> LMat {
    let mut m = lzero(field, r);
    m[a][b] = Laurent::monomial(c, k);
    m
}

fn ladd(x: &LMat, y: &LMat) -> LMat {
    x.iter().zip(y).map(|(p, q)| p.iter().zip(q).map(|(a, b)| a.add(b)).collect()).collect()
}

fn lscale(x: &LMat, s: &Scalar) -> LMat {
    x.iter().map(|row| row.iter().map(|a| a.scale(s)).collect()).collect()
}

fn lmul(x: &LMat, y: &LMat) -> LMat {
    let r = x.len();
    let field = x[0][0].field().clone();
    let mut out = lzero(&field, r);
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                out[i][j] = out[i][j].add(&x[i][k].mul(&y[k][j]));
            }
        }
    }
    out
}

fn ltrace(x: &LMat) -> Laurent {
    let mut t = Laurent::zero(x[0][0].field());
    for (i, row) in x.iter().enumerate() {
        t = t.add(&row[i]);
    }
    t
}

/// A Čech 1-hypercocycle `(u_01, v_0, v_1)`: `u_01` a section of `F^0` on
/// `U_01`, `v_alpha dz` sections of `F^1` on `U_alpha`, all in the `U_0`
/// frame, with `[nabla, u_01] = v_1 - v_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentCocycle {
    pub splitting: Vec<i64>,
    pub u01: LMat,
    pub v0: LMat,
    pub v1: LMat,
}

impl TangentCocycle {
    pub fn add(&self, o: &TangentCocycle) -> Result<TangentCocycle> {
        if self.splitting != o.splitting {
            return Err(Error::ChartMismatch);
        }
        Ok(TangentCocycle {
            splitting: self.splitting.clone(),
            u01: ladd(&self.u01, &o.u01),
            v0: ladd(&self.v0, &o.v0),
            v1: ladd(&self.v1, &o.v1),
        })
    }

    pub fn scale(&self, s: &Scalar) -> TangentCocycle {
        TangentCocycle {
            splitting: self.splitting.clone(),
            u01: lscale(&self.u01, s),
            v0: lscale(&self.v0, s),
            v1: lscale(&self.v1, s),
        }
    }

    /// Whether `[nabla, u_01] = v_1 - v_0` holds exactly for `gc`.
    pub fn is_cocycle(&self, gc: &GlobalConnection) -> Result<bool> {
        let cx = Complex::new(gc, false)?;
        let lhs = cx.bracket(&self.u01);
        let rhs = ladd(&self.v1, &lscale(&self.v0, &-gc.field.one()));
        Ok(lhs == rhs)
    }
}

/// `omega(x, y) = -[Tr(u_01 v'_1 - v_0 u'_01)]` in `H^1(P¹, Omega^1) = K`,
/// read off as the `dz/z` coefficient (no other monomial survives the
/// quotient by forms regular on `U_0` or `U_1`).
pub fn symplectic_pair(x: &TangentCocycle, y: &TangentCocycle) -> Result<Scalar> {
    if x.splitting != y.splitting || x.u01.len() != y.u01.len() {
        return Err(Error::ChartMismatch);
    }
    let t = ltrace(&lmul(&x.u01, &y.v1)).sub(&ltrace(&lmul(&x.v0, &y.u01)));
    Ok(-t.coeff(-1))
}

/// Pairing matrix `omega(b_i, b_j)` on a list of cocycles.
pub fn pairing_matrix(basis: &[TangentCocycle]) -> Result<Vec<Vec<Scalar>>> {
    basis.iter().map(|x| basis.iter().map(|y| symplectic_pair(x, y)).collect()).collect()
}

/// The Čech coboundary of a 0-cochain `(u_0, u_1)` of `F^0`.
pub fn coboundary(gc: &GlobalConnection, u0: &LMat, u1: &LMat) -> Result<TangentCocycle> {
    let cx = Complex::new(gc, false)?;
    Ok(TangentCocycle {
        splitting: gc.splitting.clone(),
        u01: ladd(u1, &lscale(u0, &-gc.field.one())),
        v0: cx.bracket(u0),
        v1: cx.bracket(u1),
    })
}

/// Basis of `H^1` with its stabilization certificate.
#[derive(Clone, Debug)]
pub struct TangentSpace {
    pub dimension: usize,
    pub bound: i64,
    /// `(B', dim H^1_{B'})` for `B' = B, B + 1, B + 2`.
    pub certificate: Vec<(i64, usize)>,
    pub trace_free: bool,
    pub basis: Vec<TangentCocycle>,
}

/// `sum_i m_i r + max d - min d + 4`.
pub fn default_bound(gc: &GlobalConnection) -> i64 {
    let r = gc.rank() as i64;
    let dmax = gc.splitting.iter().copied().max().unwrap_or(0);
    let dmin = gc.splitting.iter().copied().min().unwrap_or(0);
    gc.poles.iter().map(|p| p.m as i64 * r).sum::<i64>() + dmax - dmin + 4
}

/// `H^1(F^0 -> F^1)` for the full complex.
pub fn tangent_space(gc: &GlobalConnection, bound: Option<i64>) -> Result<TangentSpace> {
    certified(gc, bound, false)
}

/// `H^1` of the trace-free subcomplex (`Tr u = 0`, `Tr v = 0`).
pub fn tangent_space_trace_free(gc: &GlobalConnection, bound: Option<i64>) -> Result<TangentSpace> {
    certified(gc, bound, true)
}

fn certified(gc: &GlobalConnection, bound: Option<i64>, trace_free: bool) -> Result<TangentSpace> {
    let rep = gc.check();
    if !rep.all_pass() {
        return Err(Error::Invalid(format!("connection fails checks: {:?}", rep.failed())));
    }
    let cx = Complex::new(gc, trace_free)?;
    let b = bound.unwrap_or_else(|| default_bound(gc));
    if b < 1 {
        return Err(Error::Invalid("degree bound must be positive".into()));
    }
    let basis = cx.h1(b);
    let mut certificate = vec![(b, basis.len())];
    for extra in 1..=2 {
        certificate.push((b + extra, cx.h1(b + extra).len()));
    }
    if certificate.iter().any(|&(_, d)| d != basis.len()) {
        return Err(Error::BoundTooSmall(format!("dimensions {certificate:?}")));
    }
    Ok(TangentSpace { dimension: basis.len(), bound: b, certificate, trace_free, basis })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Piece {
    U0,
    U1,
    U01,
    V0,
    V1,
}

type Key = (Piece, usize, usize, i64);

struct LocalFrame {
    cond: PoleConditions,
    m: usize,
    frame: SMat,
    inv: SMat,
}

struct Complex {
    field: Field,
    r: usize,
    d: Vec<i64>,
    m0: i64,
    minf: i64,
    margin: i64,
    omega: LMat,
    at0: Option<LocalFrame>,
    atinf: Option<LocalFrame>,
    trace_free: bool,
}

impl Complex {
    fn new(gc: &GlobalConnection, trace_free: bool) -> Result<Complex> {
        let field = gc.field.clone();
        let r = gc.rank();
        let (mut at0, mut atinf, mut m0) = (None, None, 0i64);
        for pole in &gc.poles {
            let lf = LocalFrame { cond: PoleConditions::new(pole), m: pole.m, frame: pole.frame.clone(), inv: smat::inverse(&pole.frame)? };
            match &pole.position {
                Position::Finite(t) if t.is_zero() => {
                    m0 = pole.m as i64;
                    at0 = Some(lf);
                }
                Position::Infinity => atinf = Some(lf),
                Position::Finite(t) => {
                    return Err(Error::Unsupported(format!("tangent space needs poles in {{0, ∞}}, found a pole at {t}")))
                }
            }
        }
        let mut omega = lzero(&field, r);
        let mut maxdeg = 0i64;
        for a in 0..r {
            for b in 0..r {
                let p = &gc.numerators[a][b];
                maxdeg = maxdeg.max(p.degree().unwrap_or(0) as i64);
                for (k, c) in p.coeffs().iter().enumerate() {
                    omega[a][b].add_term(k as i64 - m0, c);
                }
            }
        }
        let spread = gc.splitting.iter().max().unwrap_or(&0) - gc.splitting.iter().min().unwrap_or(&0);
        Ok(Complex {
            field,
            r,
            d: gc.splitting.clone(),
            m0,
            minf: gc.m_infinity() as i64,
            margin: spread + maxdeg + 2,
            omega,
            at0,
            atinf,
            trace_free,
        })
    }

    /// `[nabla, u] = u' + Omega u - u Omega` (coefficient of `dz`).
    fn bracket(&self, u: &LMat) -> LMat {
        let du: LMat = u.iter().map(|row| row.iter().map(Laurent::derivative).collect()).collect();
        let comm = ladd(&lmul(&self.omega, u), &lscale(&lmul(u, &self.omega), &-self.field.one()));
        ladd(&du, &comm)
    }

    fn window(&self, piece: Piece, a: usize, b: usize, bound: i64) -> (i64, i64) {
        let t = self.d[a] - self.d[b];
        let s = self.margin;
        match piece {
            Piece::U0 => (0, bound + s),
            Piece::U1 => (-bound - s, t),
            Piece::U01 => (-bound, bound),
            Piece::V0 => (-self.m0, bound + 2 * s),
            Piece::V1 => (-bound - 2 * s, t + self.minf - 2),
        }
    }

    fn vars(&self, pieces: &[Piece], bound: i64) -> Vec<Key> {
        let mut out = Vec::new();
        for &p in pieces {
            for a in 0..self.r {
                for b in 0..self.r {
                    let (lo, hi) = self.window(p, a, b, bound);
                    out.extend((lo..=hi).map(|k| (p, a, b, k)));
                }
            }
        }
        out
    }

    /// Image of a unit variable under the Čech differential, as a sparse
    /// vector over keys. `d0 (u_0, u_1) = (u_1 - u_0, [nabla, u_0],
    /// [nabla, u_1])`, `d1 (u_01, v_0, v_1) = [nabla, u_01] - v_1 + v_0`;
    /// the target of `d1` is tagged `U01`.
    fn differential(&self, key: Key) -> Vec<(Key, Scalar)> {
        let (p, a, b, k) = key;
        let one = self.field.one();
        let unit = lunit(&self.field, self.r, a, b, &one, k);
        let sparse = |m: &LMat, tag: Piece, out: &mut Vec<(Key, Scalar)>| {
            for (i, row) in m.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    out.extend(e.terms().map(|(d, c)| ((tag, i, j, d), c.clone())));
                }
            }
        };
        let mut out = Vec::new();
        match p {
            Piece::U0 => {
                out.push(((Piece::U01, a, b, k), -one));
                sparse(&self.bracket(&unit), Piece::V0, &mut out);
            }
            Piece::U1 => {
                out.push(((Piece::U01, a, b, k), one));
                sparse(&self.bracket(&unit), Piece::V1, &mut out);
            }
            Piece::U01 => sparse(&self.bracket(&unit), Piece::U01, &mut out),
            Piece::V0 => out.push(((Piece::U01, a, b, k), one)),
            Piece::V1 => out.push(((Piece::U01, a, b, k), -one)),
        }
        out
    }

    /// Local condition values of a unit variable: its local matrix in the
    /// adapted frame at the relevant pole, fed to the `F^0` or `F^1` test.
    fn local_values(&self, key: Key) -> Option<(usize, Vec<Scalar>)> {
        let (p, a, b, k) = key;
        let t = self.d[a] - self.d[b];
        let (slot, lf, power, sign, f1) = match p {
            Piece::U0 => (0, self.at0.as_ref()?, k, 1, false),
            Piece::U1 => (1, self.atinf.as_ref()?, t - k, 1, false),
            Piece::V0 => (0, self.at0.as_ref()?, k + self.m0, 1, true),
            Piece::V1 => (1, self.atinf.as_ref()?, t - k - 2 + self.minf, -1, true),
            Piece::U01 => return None,
        };
        debug_assert!(power >= 0, "window admits a pole");
        let m = lf.m;
        let mut x = smat::zero(&self.field, self.r, 1, m);
        if (power as usize) < m {
            let s = self.field.from_int(sign);
            for (i, row) in x.iter_mut().enumerate() {
                for (j, e) in row.iter_mut().enumerate() {
                    let c = &lf.inv[i][a].mul(&lf.frame[b][j]).scale(&s).shift(power as usize);
                    *e = c.clone();
                }
            }
        }
        Some((slot, if f1 { lf.cond.f1(&x) } else { lf.cond.f0(&x) }))
    }

    /// Linear constraints on `vars` from the local conditions and, for the
    /// trace-free complex, from `Tr = 0` on every piece.
    fn constraint_rows(&self, vars: &[Key]) -> Vec<Vec<Scalar>> {
        let n = vars.len();
        let zero = self.field.zero();
        let mut blocks: [Vec<Vec<Scalar>>; 2] = [Vec::new(), Vec::new()];
        for (col, &key) in vars.iter().enumerate() {
            if let Some((slot, vals)) = self.local_values(key) {
                let rows = &mut blocks[slot];
                if rows.is_empty() {
                    *rows = vec![vec![zero.clone(); n]; vals.len()];
                }
                for (row, v) in rows.iter_mut().zip(vals) {
                    row[col] = v;
                }
            }
        }
        let [mut rows, more] = blocks;
        rows.extend(more);
        rows.retain(|row| row.iter().any(|c| !c.is_zero()));
        if self.trace_free {
            let mut tr: BTreeMap<(Piece, i64), Vec<Scalar>> = BTreeMap::new();
            for (col, &(p, a, b, k)) in vars.iter().enumerate() {
                if a == b {
                    tr.entry((p, k)).or_insert_with(|| vec![zero.clone(); n])[col] = self.field.one();
                }
            }
            rows.extend(tr.into_values());
        }
        rows
    }

    /// Representatives of a basis of `H^1` in the window `bound`.
    fn h1(&self, bound: i64) -> Vec<TangentCocycle> {
        let zero = self.field.zero();
        let w1 = self.vars(&[Piece::V0, Piece::V1, Piece::U01], bound);
        let index1: HashMap<Key, usize> = w1.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let n1 = w1.len();

        let mut rows = self.constraint_rows(&w1);
        let mut target: HashMap<Key, usize> = HashMap::new();
        let mut drows: Vec<Vec<Scalar>> = Vec::new();
        for (col, &key) in w1.iter().enumerate() {
            for (t, c) in self.differential(key) {
                let r = *target.entry(t).or_insert_with(|| {
                    drows.push(vec![zero.clone(); n1]);
                    drows.len() - 1
                });
                drows[r][col] = &drows[r][col] + &c;
            }
        }
        rows.extend(drows);
        let cocycles = linalg::nullspace(&rows, n1, &zero);

        let w0 = self.vars(&[Piece::U0, Piece::U1], bound);
        let n0 = w0.len();
        let images: Vec<Vec<(Key, Scalar)>> = w0.iter().map(|&k| self.differential(k)).collect();
        let mut rows0 = self.constraint_rows(&w0);
        let mut outside: HashMap<Key, usize> = HashMap::new();
        let mut orows: Vec<Vec<Scalar>> = Vec::new();
        for (col, img) in images.iter().enumerate() {
            for (t, c) in img {
                if index1.contains_key(t) {
                    continue;
                }
                let r = *outside.entry(*t).or_insert_with(|| {
                    orows.push(vec![zero.clone(); n0]);
                    orows.len() - 1
                });
                orows[r][col] = &orows[r][col] + c;
            }
        }
        rows0.extend(orows);
        let cochains = linalg::nullspace(&rows0, n0, &zero);
        let boundaries: Vec<Vec<Scalar>> = cochains
            .iter()
            .map(|c| {
                let mut v = vec![zero.clone(); n1];
                for (col, coef) in c.iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    for (t, s) in &images[col] {
                        let i = index1[t];
                        v[i] = &v[i] + &(coef * s);
                    }
                }
                v
            })
            .collect();
        linalg::complement_indices(&boundaries, &cocycles, n1)
            .into_iter()
            .map(|i| self.assemble(&w1, &cocycles[i]))
            .collect()
    }

    fn assemble(&self, vars: &[Key], v: &[Scalar]) -> TangentCocycle {
        let mut u01 = lzero(&self.field, self.r);
        let mut v0 = u01.clone();
        let mut v1 = u01.clone();
        for (&(p, a, b, k), c) in vars.iter().zip(v) {
            let slot = match p {
                Piece::U01 => &mut u01,
                Piece::V0 => &mut v0,
                Piece::V1 => &mut v1,
                _ => continue,
            };
            slot[a][b].add_term(k, c);
        }
        TangentCocycle { splitting: self.d.clone(), u01, v0, v1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::global::{PoleSpec, Position};
    use crate::scalars::q;

    fn poly(f: &Field, c: &[i64]) -> crate::poly::Poly {
        crate::poly::Poly::new(f, c.iter().map(|&x| f.from_int(x)).collect())
    }

    fn rank_one() -> GlobalConnection {
        let f = Field::rationals();
        let spec = PoleSpec { position: Position::Finite(f.zero()), m: 2, block_sizes: vec![1], weights: vec![q(1, 3)] };
        GlobalConnection::from_matrix(f.clone(), vec![-1], vec![vec![poly(&f, &[3, 1])]], vec![spec]).unwrap()
    }

    #[test]
    fn rank_one_has_no_deformations() {
        let ts = tangent_space(&rank_one(), None).unwrap();
        assert_eq!(ts.dimension, 0);
    }

    #[test]
    fn rank_two_model_is_symplectic() {
        let gc = crate::global::connection_tests::rank_two_model();
        let ts = tangent_space(&gc, None).unwrap();
        assert_eq!(ts.dimension, 2, "{:?}", ts.certificate);
        for b in &ts.basis {
            assert!(b.is_cocycle(&gc).unwrap());
        }
        let pm = pairing_matrix(&ts.basis).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((&pm[i][j] + &pm[j][i]).is_zero());
            }
        }
        assert_eq!(linalg::rank(&pm, 2), 2);
    }

    #[test]
    fn trace_free_matches_full_in_genus_zero() {
        // The trace part is d: O -> Omega^1 on P¹, whose H^1 is H^1_dR = 0.
        let gc = crate::global::connection_tests::rank_two_model();
        let full = tangent_space(&gc, None).unwrap();
        let tf = tangent_space_trace_free(&gc, None).unwrap();
        assert_eq!(full.dimension, tf.dimension);
        for b in &tf.basis {
            for row in [&b.u01, &b.v0, &b.v1] {
                assert!(ltrace(row).is_zero());
            }
        }
    }

    fn lpoly(f: &Field, entries: &[&[(i64, i64)]], r: usize) -> LMat {
        let mut m = lzero(f, r);
        for (idx, terms) in entries.iter().enumerate() {
            for &(k, c) in terms.iter() {
                m[idx / r][idx % r].add_term(k, &f.from_int(c));
            }
        }
        m
    }

    #[test]
    fn pairing_is_bilinear_and_ignores_coboundaries() {
        let gc = crate::global::connection_tests::rank_two_model();
        let f = gc.field.clone();
        let ts = tangent_space(&gc, None).unwrap();
        let (x, y) = (&ts.basis[0], &ts.basis[1]);
        let a = f.rat(-3, 7);
        let lhs = symplectic_pair(&x.scale(&a).add(y).unwrap(), x).unwrap();
        let rhs = &(&a * &symplectic_pair(x, x).unwrap()) + &symplectic_pair(y, x).unwrap();
        assert_eq!(lhs, rhs);

        // u_0 vanishes to order m at 0, u_1 is regular on U_1 for d = (0, -1).
        let u0 = lpoly(&f, &[&[(4, 1), (5, 2)], &[(6, -1)], &[(4, 3)], &[(5, 1)]], 2);
        let u1 = lpoly(&f, &[&[(-1, 1)], &[(-2, 2), (1, 1)], &[(-3, 1)], &[(0, 5)]], 2);
        let cb = coboundary(&gc, &u0, &u1).unwrap();
        assert!(cb.is_cocycle(&gc).unwrap());
        for b in &ts.basis {
            assert!(symplectic_pair(&cb, b).unwrap().is_zero());
            assert!(symplectic_pair(b, &cb).unwrap().is_zero());
            let shifted = b.add(&cb).unwrap();
            assert_eq!(symplectic_pair(&shifted, x).unwrap(), symplectic_pair(b, x).unwrap());
        }
    }

    #[test]
    fn mismatched_cocycles_are_rejected() {
        let gc = crate::global::connection_tests::rank_two_model();
        let ts = tangent_space(&gc, None).unwrap();
        let mut other = ts.basis[0].clone();
        other.splitting = vec![1, -2];
        assert_eq!(symplectic_pair(&ts.basis[0], &other), Err(Error::ChartMismatch));
    }

    #[test]
    fn finite_nonzero_pole_is_unsupported() {
        let f = Field::rationals();
        let spec = PoleSpec { position: Position::Finite(f.one()), m: 2, block_sizes: vec![1], weights: vec![q(1, 3)] };
        let gc = GlobalConnection::from_matrix(f.clone(), vec![-1], vec![vec![poly(&f, &[2, 1])]], vec![spec]).unwrap();
        assert!(gc.check().all_pass(), "{:?}", gc.check().failed());
        assert!(matches!(tangent_space(&gc, None), Err(Error::Unsupported(_))));
    }
}
