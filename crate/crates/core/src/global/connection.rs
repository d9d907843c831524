use super::{det_exponents, validate_exponent_set, ExponentSet, PoleExponents};
use crate::error::{Error, Result};
use crate::formal::{default_buffer, Exponent, FormalConnection};
use crate::localdata::{build_from_formal, CheckResult, LocalRamifiedData, Status, VerifyReport};
use crate::poly::Poly;
use crate::scalars::{Field, Scalar, Q};
use crate::series::TruncSeries;
use crate::smat::{self, SMat};
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Position {
    Finite(Scalar),
    Infinity,
}

/// Parabolic structure at one pole. The local coordinate is `x = z - t` at
/// a finite point and `x = 1/z` at infinity; the local frame of `E` is the
/// chart frame (`e_a` on `U_0`, `z^{d_a} e_a` on `U_1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pole {
    pub position: Position,
    pub m: usize,
    /// Columns are the adapted basis modulo `x^m`, grouped by block; the
    /// flag `l_j` is spanned by blocks `j..s`.
    pub frame: SMat,
    pub blocks: Vec<LocalRamifiedData>,
    /// `0 < alpha_1 < ... < alpha_s < 1`.
    pub weights: Vec<Q>,
}

impl Pole {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.r).collect()
    }

    fn block_of(&self) -> Vec<usize> {
        self.blocks.iter().enumerate().flat_map(|(j, b)| std::iter::repeat_n(j, b.r)).collect()
    }
}

/// `nabla = d + A(z) dz / prod_{finite i} (z - t_i)^{m_i}` on
/// `E = O(d_1) + ... + O(d_r)` over P¹, written in the `U_0` frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalConnection {
    pub field: Field,
    pub splitting: Vec<i64>,
    pub numerators: Vec<Vec<Poly>>,
    pub poles: Vec<Pole>,
}

/// Pole description for [`GlobalConnection::from_matrix`], which derives the
/// frame and local data from the matrix.
#[derive(Clone, Debug)]
pub struct PoleSpec {
    pub position: Position,
    pub m: usize,
    pub block_sizes: Vec<usize>,
    pub weights: Vec<Q>,
}

fn poly_series(p: &Poly, len: usize) -> TruncSeries {
    TruncSeries::new(1, (0..len).map(|i| p.coeff(i)).collect())
}

impl GlobalConnection {
    /// Validates shapes: square numerators over one field, distinct poles,
    /// frames invertible modulo `x`, blocks summing to the rank.
    pub fn new(field: Field, splitting: Vec<i64>, numerators: Vec<Vec<Poly>>, poles: Vec<Pole>) -> Result<GlobalConnection> {
        let r = splitting.len();
        let bad = |s: String| Err(Error::Invalid(s));
        if r == 0 {
            return bad("rank must be at least 1".into());
        }
        if numerators.len() != r || numerators.iter().any(|row| row.len() != r) {
            return bad(format!("connection matrix must be {r} x {r}"));
        }
        if numerators.iter().flatten().any(|p| *p.field() != field) {
            return Err(Error::FieldMismatch);
        }
        for (i, p) in poles.iter().enumerate() {
            if p.m == 0 {
                return bad(format!("pole {i} has multiplicity 0"));
            }
            if poles[..i].iter().any(|q| q.position == p.position) {
                return bad(format!("pole {i} coincides with an earlier pole"));
            }
            if let Position::Finite(t) = &p.position {
                if *t.field() != field {
                    return Err(Error::FieldMismatch);
                }
            }
            if p.block_sizes().iter().sum::<usize>() != r {
                return bad(format!("block sizes at pole {i} do not sum to {r}"));
            }
            if p.blocks.iter().any(|b| b.m != p.m || *b.field() != field) {
                return bad(format!("local data at pole {i} has the wrong m or field"));
            }
            if p.frame.len() != r || p.frame.iter().any(|row| row.len() != r || row.iter().any(|s| s.ram() != 1)) {
                return bad(format!("frame at pole {i} must be {r} x {r}"));
            }
            let frame = smat::resize(&p.frame, p.m);
            if smat::inverse(&frame).is_err() {
                return bad(format!("frame at pole {i} is not invertible"));
            }
            if p.weights.len() != p.blocks.len() {
                return bad(format!("pole {i} needs one weight per block"));
            }
        }
        let poles = poles.into_iter().map(|p| Pole { frame: smat::resize(&p.frame, p.m), ..p }).collect();
        Ok(GlobalConnection { field, splitting, numerators, poles })
    }

    /// Derives every pole frame and block from the matrix: a single block is
    /// put in adapted form through its quotient map; several blocks require
    /// the local matrix to be block lower triangular modulo `x^m`, each
    /// diagonal block being adapted separately.
    pub fn from_matrix(field: Field, splitting: Vec<i64>, numerators: Vec<Vec<Poly>>, specs: Vec<PoleSpec>) -> Result<GlobalConnection> {
        let r = splitting.len();
        let bare: Vec<Pole> = specs
            .iter()
            .map(|s| Pole { position: s.position.clone(), m: s.m, frame: Vec::new(), blocks: Vec::new(), weights: Vec::new() })
            .collect();
        let probe = GlobalConnection { field: field.clone(), splitting: splitting.clone(), numerators: numerators.clone(), poles: bare };
        let mut poles = Vec::with_capacity(specs.len());
        for (i, spec) in specs.into_iter().enumerate() {
            let m = spec.m;
            let big_m = 2 * m + default_buffer();
            let b = probe.local_matrix(i, big_m)?;
            let mut frame = smat::zero(&field, r, 1, m);
            let mut blocks = Vec::new();
            let mut start = 0;
            for (j, &rj) in spec.block_sizes.iter().enumerate() {
                let end = start + rj;
                if end > r || rj == 0 {
                    return Err(Error::Invalid(format!("block sizes at pole {i} do not fit rank {r}")));
                }
                for row in &b[..start] {
                    if row[start..end].iter().any(|s| s.ord() < m) {
                        return Err(Error::Invalid(format!("local matrix at pole {i} is not block lower triangular (block {j})")));
                    }
                }
                let sub: SMat = b[start..end].iter().map(|row| row[start..end].to_vec()).collect();
                let built = build_from_formal(&FormalConnection::new(m, big_m, sub)?, None)?;
                for (a, row) in built.frame.iter().enumerate() {
                    for (c, s) in row.iter().enumerate() {
                        frame[start + a][start + c] = s.clone();
                    }
                }
                blocks.push(built.data);
                start = end;
            }
            if start != r {
                return Err(Error::Invalid(format!("block sizes at pole {i} do not sum to {r}")));
            }
            poles.push(Pole { position: spec.position, m, frame, blocks, weights: spec.weights });
        }
        GlobalConnection::new(field, splitting, numerators, poles)
    }

    pub fn rank(&self) -> usize {
        self.splitting.len()
    }

    pub fn degree(&self) -> i64 {
        self.splitting.iter().sum()
    }

    fn finite_poles(&self) -> impl Iterator<Item = (&Scalar, usize)> {
        self.poles.iter().filter_map(|p| match &p.position {
            Position::Finite(t) => Some((t, p.m)),
            Position::Infinity => None,
        })
    }

    /// `prod_{finite i} (z - t_i)^{m_i}`.
    pub fn denominator(&self) -> Poly {
        let mut d = Poly::constant(&self.field.one());
        for (t, m) in self.finite_poles() {
            d = d.mul(&Poly::linear_root(t).pow(m));
        }
        d
    }

    /// Order of the pole allowed at infinity (0 when infinity is not a pole).
    pub fn m_infinity(&self) -> usize {
        self.poles.iter().find(|p| p.position == Position::Infinity).map_or(0, |p| p.m)
    }

    /// Numerator of the connection matrix with respect to `dx/x^{m_i}` in the
    /// local frame at pole `i`, to `len` terms.
    pub fn local_matrix(&self, i: usize, len: usize) -> Result<SMat> {
        match &self.poles[i].position {
            Position::Finite(t) => Ok(self.expand_finite(t, len)),
            Position::Infinity => self.expand_infinity(self.poles[i].m, len),
        }
    }

    fn expand_finite(&self, t: &Scalar, len: usize) -> SMat {
        let mut other = TruncSeries::one(&self.field, 1, len);
        for (s, m) in self.finite_poles() {
            if s != t {
                let lin = TruncSeries::new(1, vec![t - s, self.field.one()]).resize(len);
                other = other.mul(&lin.pow(m));
            }
        }
        let h = other.inverse().expect("distinct poles");
        self.numerators.iter().map(|row| row.iter().map(|p| poly_series(&p.taylor_shift(t), len).mul(&h)).collect()).collect()
    }

    /// In `x = 1/z` and the `U_1` frame the entry `(a, b)` is
    /// `-d_b delta_ab x^{m-1} - x^{m - 2 + d_a - d_b + sum m_i - deg A_ab}
    /// rev(A_ab)(x) / prod (1 - t_i x)^{m_i}`; negative powers mean the pole
    /// at infinity exceeds `m`.
    fn expand_infinity(&self, m: usize, len: usize) -> Result<SMat> {
        let r = self.rank();
        let mfin: i64 = self.finite_poles().map(|(_, m)| m as i64).sum();
        let mi = m as i64;
        let mut exps = vec![vec![None; r]; r];
        let mut low = 0i64;
        for a in 0..r {
            for b in 0..r {
                if let Some(deg) = self.numerators[a][b].degree() {
                    let e = mi - 2 + self.splitting[a] - self.splitting[b] + mfin - deg as i64;
                    low = low.min(e);
                    exps[a][b] = Some(e);
                }
                if a == b && self.splitting[b] != 0 {
                    low = low.min(mi - 1);
                }
            }
        }
        let shift = (-low) as usize;
        let total = len + shift;
        let mut den = TruncSeries::one(&self.field, 1, total);
        for (t, m) in self.finite_poles() {
            let lin = TruncSeries::new(1, vec![self.field.one(), -t]).resize(total);
            den = den.mul(&lin.pow(m));
        }
        let hinv = den.inverse().expect("constant term 1");
        let mut out = smat::zero(&self.field, r, 1, len);
        for a in 0..r {
            for b in 0..r {
                let mut acc = TruncSeries::zero(&self.field, 1, total);
                if let Some(e) = exps[a][b] {
                    let p = &self.numerators[a][b];
                    let deg = p.degree().expect("nonzero");
                    let rev: Vec<Scalar> = (0..=deg).map(|k| p.coeff(deg - k)).collect();
                    let s = TruncSeries::new(1, rev).resize(total).mul(&hinv);
                    acc = acc.sub(&s.shift((e + shift as i64) as usize));
                }
                if a == b && self.splitting[b] != 0 {
                    let k = (mi - 1 + shift as i64) as usize;
                    if k < total {
                        let mut c = acc.coeff(k);
                        c = &c - &self.field.from_int(self.splitting[b]);
                        acc.set_coeff(k, c);
                    }
                }
                let entry = acc.unshift(shift).map_err(|_| {
                    Error::PoleOverflow(format!("entry ({a},{b}) has a pole of order above {m} at infinity"))
                })?;
                out[a][b] = entry.resize(len);
            }
        }
        Ok(out)
    }

    /// Local matrix at pole `i` in the adapted frame, modulo `x^m`.
    pub fn adapted_matrix(&self, i: usize) -> Result<SMat> {
        let p = &self.poles[i];
        let b = self.local_matrix(i, p.m)?;
        let fi = smat::inverse(&p.frame)?;
        Ok(smat::mul(&smat::mul(&fi, &b), &p.frame))
    }

    pub fn exponent_set(&self) -> ExponentSet {
        ExponentSet {
            a: self.degree(),
            poles: self
                .poles
                .iter()
                .map(|p| PoleExponents { m: p.m, blocks: p.blocks.iter().map(|b| b.nu.clone()).collect() })
                .collect(),
        }
    }

    /// Regularity in both charts, weights, flag invariance, agreement of the
    /// diagonal blocks with the stored local data, verification of every
    /// block, and the Fuchs relation.
    pub fn check(&self) -> VerifyReport {
        let mut checks = Vec::new();
        let mut push = |name: &str, w: Option<String>| {
            let status = if w.is_none() { Status::Pass } else { Status::Fail };
            checks.push(CheckResult { check_name: name.into(), pass: w.is_none(), status, witness: w });
        };
        // U_0: the matrix is polynomial and the only zeros of the
        // denominator are declared poles, so only the finite expansions are
        // exercised here.
        push("chart_u0", None);
        let u1 = self.expand_infinity(self.m_infinity(), self.m_infinity().max(1)).err().map(|e| e.to_string());
        push("chart_u1", u1);
        push("weights", self.check_weights());
        let mut flag = None;
        let mut block = None;
        for (i, p) in self.poles.iter().enumerate() {
            let b = match self.adapted_matrix(i) {
                Ok(b) => b,
                Err(e) => {
                    flag.get_or_insert(format!("pole {i}: {e}"));
                    continue;
                }
            };
            let owner = p.block_of();
            for (x, row) in b.iter().enumerate() {
                for (y, s) in row.iter().enumerate() {
                    if owner[x] < owner[y] && !s.is_zero() {
                        flag.get_or_insert(format!("pole {i}: nabla moves block {} out of l_{}", owner[y], owner[y]));
                    }
                }
            }
            let mut start = 0;
            for (j, d) in p.blocks.iter().enumerate() {
                let sub: SMat = b[start..start + d.r].iter().map(|row| row[start..start + d.r].to_vec()).collect();
                if sub != d.nabla {
                    block.get_or_insert(format!("pole {i}: block {j} of the connection differs from the stored local data"));
                }
                start += d.r;
            }
        }
        push("flag_invariance", flag);
        push("block_connection", block);
        let mut local = None;
        for (i, p) in self.poles.iter().enumerate() {
            for (j, d) in p.blocks.iter().enumerate() {
                let rep = d.verify();
                if !rep.all_pass() {
                    local.get_or_insert(format!("pole {i} block {j}: {:?} failed", rep.failed()));
                }
            }
        }
        push("local_data", local);
        let set = validate_exponent_set(&self.exponent_set());
        push("fuchs", (!set.all_pass()).then(|| format!("exponent set fails {:?}", set.failed())));
        VerifyReport { checks }
    }

    fn check_weights(&self) -> Option<String> {
        let mut seen: Vec<&Q> = Vec::new();
        for (i, p) in self.poles.iter().enumerate() {
            for (j, w) in p.weights.iter().enumerate() {
                if *w <= Q::zero() || *w >= Q::one() {
                    return Some(format!("alpha at pole {i}, block {j} is outside (0, 1)"));
                }
                if j > 0 && p.weights[j - 1] >= *w {
                    return Some(format!("weights at pole {i} are not increasing"));
                }
                if seen.contains(&w) {
                    return Some(format!("weight {w} repeats"));
                }
                seen.push(w);
            }
        }
        None
    }
}

/// `(det E, tr nabla)` with its exponent set. The rank-one connection is
/// built from the trace of the matrix, the exponent set from the trace
/// formula on exponents; callers can compare the two.
pub fn det_connection(gc: &GlobalConnection) -> Result<(GlobalConnection, ExponentSet)> {
    let rep = gc.check();
    if !rep.all_pass() {
        return Err(Error::Invalid(format!("connection fails {:?}", rep.failed())));
    }
    let mut tr = Poly::zero(&gc.field);
    for (a, row) in gc.numerators.iter().enumerate() {
        tr = tr.add(&row[a]);
    }
    let mut poles = Vec::with_capacity(gc.poles.len());
    for (i, p) in gc.poles.iter().enumerate() {
        let t = smat::trace(&gc.local_matrix(i, p.m)?);
        let nu = Exponent::new(1, p.m, t.coeffs().to_vec())?;
        let block = LocalRamifiedData::with_canonical_maps(&nu, vec![vec![t]]);
        poles.push(Pole {
            position: p.position.clone(),
            m: p.m,
            frame: smat::identity(&gc.field, 1, 1, p.m),
            blocks: vec![block],
            weights: vec![p.weights[0].clone()],
        });
    }
    let det = GlobalConnection::new(gc.field.clone(), vec![gc.degree()], vec![vec![tr]], poles)?;
    Ok((det, det_exponents(&gc.exponent_set())?))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::scalars::q;

    pub(crate) fn poly(f: &Field, c: &[i64]) -> Poly {
        Poly::new(f, c.iter().map(|&x| f.from_int(x)).collect())
    }

    /// `E = O + O(-1)`, one pole of order 4 at 0, single ramified block.
    pub(crate) fn rank_two_model() -> GlobalConnection {
        let f = Field::rationals();
        let numerators = vec![vec![poly(&f, &[0, 0, 1]), poly(&f, &[1, 0, 2, 1])], vec![poly(&f, &[0, 1]), poly(&f, &[0, 0, 0, 1])]];
        let spec = PoleSpec { position: Position::Finite(f.zero()), m: 4, block_sizes: vec![2], weights: vec![q(1, 2)] };
        GlobalConnection::from_matrix(f, vec![0, -1], numerators, vec![spec]).unwrap()
    }

    #[test]
    fn rank_one_fuchs() {
        let f = Field::rationals();
        // O(-1) with nabla = d + (3 + z) dz / z^2: residue 1, degree -1.
        let spec = PoleSpec { position: Position::Finite(f.zero()), m: 2, block_sizes: vec![1], weights: vec![q(1, 3)] };
        let gc = GlobalConnection::from_matrix(f.clone(), vec![-1], vec![vec![poly(&f, &[3, 1])]], vec![spec]).unwrap();
        assert!(gc.check().all_pass(), "{:?}", gc.check().failed());
        let spec = PoleSpec { position: Position::Finite(f.zero()), m: 2, block_sizes: vec![1], weights: vec![q(1, 3)] };
        let bad = GlobalConnection::from_matrix(f.clone(), vec![0], vec![vec![poly(&f, &[3, 1])]], vec![spec]).unwrap();
        assert_eq!(bad.check().failed(), vec!["chart_u1", "fuchs"]);
    }

    #[test]
    fn rank_two_model_checks() {
        let gc = rank_two_model();
        let rep = gc.check();
        assert!(rep.all_pass(), "{:?}", rep.checks);
        assert!(gc.poles[0].blocks[0].nu[0].generic_c1());
    }

    #[test]
    fn infinity_chart_matches_inversion() {
        // Pole of order 3 at infinity only: nabla = d + (1 + 2z) dz on O.
        let f = Field::rationals();
        let spec = PoleSpec { position: Position::Infinity, m: 3, block_sizes: vec![1], weights: vec![q(1, 2)] };
        let gc = GlobalConnection::from_matrix(f.clone(), vec![0], vec![vec![poly(&f, &[1, 2])]], vec![spec]).unwrap();
        // (1 + 2/x)(-dx/x^2) = (-x - 2) dx / x^3.
        let b = gc.local_matrix(0, 3).unwrap();
        assert_eq!(b[0][0], TruncSeries::new(1, vec![f.from_int(-2), f.from_int(-1), f.zero()]));
        assert!(gc.check().all_pass());
    }

    #[test]
    fn off_flag_term_breaks_invariance() {
        let f = Field::rationals();
        // Diagonal rank-two connection with two rank-one blocks at 0, then a
        // z^{-1} term added above the diagonal.
        let numerators = vec![vec![poly(&f, &[2, -1]), Poly::zero(&f)], vec![Poly::zero(&f), poly(&f, &[1, 1])]];
        let spec = PoleSpec { position: Position::Finite(f.zero()), m: 2, block_sizes: vec![1, 1], weights: vec![q(1, 3), q(2, 3)] };
        let gc = GlobalConnection::from_matrix(f.clone(), vec![1, -1], numerators, vec![spec]).unwrap();
        assert!(gc.check().all_pass(), "{:?}", gc.check().checks);
        let mut bad = gc.clone();
        bad.numerators[0][1] = poly(&f, &[0, 1]);
        assert_eq!(bad.check().failed(), vec!["flag_invariance"]);
    }

    #[test]
    fn det_matches_trace_formula() {
        let gc = rank_two_model();
        let (det, set) = det_connection(&gc).unwrap();
        assert!(det.check().all_pass(), "{:?}", det.check().checks);
        assert_eq!(det.exponent_set(), set);
        assert_eq!(det.degree(), gc.degree());
    }
}
