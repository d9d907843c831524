//! Truncated formal connections `d + A(z) dz/z^m` over `K[z]/(z^M)`, the
//! pushforward of a rank-1 ramified model, and exponent extraction.
//!
//! Conventions: `A` acts on column vectors and `nabla e_k = sum_j e_j A[j][k]`.
//! A gauge `g` (columns = new frame) changes `A` to
//! `g^{-1} A g + z^m g^{-1} g'`.

mod irreducible;
mod puiseux;

pub use irreducible::{is_formally_irreducible, Irreducibility};
pub use puiseux::{newton_puiseux, PuiseuxOrbit};

use crate::error::{Error, Result};
use crate::scalars::{Field, Scalar, Q};
use crate::series::{Basis, OneForm, TruncSeries};
use crate::smat::{self, SMat};
use num_bigint::BigInt;

/// Environment variable overriding the default truncation buffer `M - m`.
pub const BUFFER_ENV: &str = "RAMIFIED_TRUNC_BUFFER";

/// Default `M - m`, honouring [`BUFFER_ENV`].
pub fn default_buffer() -> usize {
    std::env::var(BUFFER_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(2)
}

/// `d + A dz/z^m` on `K[[z]]^rank`, with `A` known modulo `z^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalConnection {
    pub rank: usize,
    pub m: usize,
    pub big_m: usize,
    pub a: SMat,
}

impl FormalConnection {
    pub fn new(m: usize, big_m: usize, a: SMat) -> Result<FormalConnection> {
        let rank = a.len();
        if rank == 0 || m == 0 || big_m < m {
            return Err(Error::Invalid("need rank >= 1, m >= 1 and M >= m".into()));
        }
        for row in &a {
            if row.len() != rank || row.iter().any(|s| s.ram() != 1) {
                return Err(Error::Invalid("connection matrix must be square with z-series entries".into()));
            }
        }
        let a = smat::resize(&a, big_m);
        Ok(FormalConnection { rank, m, big_m, a })
    }

    pub fn field(&self) -> &Field {
        self.a[0][0].field()
    }

    /// Gauge transform by `g` (invertible at `z = 0`).
    pub fn gauge(&self, g: &SMat) -> Result<FormalConnection> {
        let g = smat::resize(g, self.big_m);
        let gi = smat::inverse(&g)?;
        let conj = smat::mul(&smat::mul(&gi, &self.a), &g);
        let dg = smat::shift(&smat::derivative(&g), self.m);
        let a = smat::add(&conj, &smat::mul(&gi, &dg));
        FormalConnection::new(self.m, self.big_m, a)
    }

    /// `det(T - A)`, coefficients of `T^0..T^rank` as `z`-series.
    pub fn char_poly(&self) -> Vec<TruncSeries> {
        char_poly(&self.a)
    }
}

/// Faddeev–LeVerrier over `K[z]/(z^M)`; only divisions by integers occur.
pub fn char_poly(a: &SMat) -> Vec<TruncSeries> {
    let n = a.len();
    let s = &a[0][0];
    let (field, r, len) = (s.field().clone(), s.ram(), s.n());
    let id = smat::identity(&field, n, r, len);
    let mut c = vec![TruncSeries::zero(&field, r, len); n + 1];
    c[n] = TruncSeries::one(&field, r, len);
    let mut mk = smat::zero(&field, n, r, len);
    for k in 1..=n {
        let am = smat::mul(a, &mk);
        mk = smat::add(&am, &id.iter().map(|row| row.iter().map(|x| x.mul(&c[n - k + 1])).collect()).collect());
        let tr = smat::trace(&smat::mul(a, &mk));
        c[n - k] = tr.scale_q(&Q::new(BigInt::from(-1), BigInt::from(k)));
    }
    c
}

/// Turrittin exponent `nu = sum_{l<N} c_l w^l dz/z^m`, `N = mr - r + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exponent {
    pub r: usize,
    pub m: usize,
    pub c: Vec<Scalar>,
}

impl Exponent {
    pub fn new(r: usize, m: usize, c: Vec<Scalar>) -> Result<Exponent> {
        if r == 0 || m == 0 {
            return Err(Error::Invalid("exponent needs r >= 1 and m >= 1".into()));
        }
        let n = m * r - r + 1;
        if c.len() != n {
            return Err(Error::Invalid(format!("exponent with r={r}, m={m} needs {n} coefficients, got {}", c.len())));
        }
        Ok(Exponent { r, m, c })
    }

    /// `N = mr - r + 1`.
    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn field(&self) -> &Field {
        self.c[0].field()
    }

    pub fn generic_c1(&self) -> bool {
        self.c.len() > 1 && !self.c[1].is_zero()
    }

    /// `nu` in the `dz/z^m` basis.
    pub fn form(&self) -> OneForm {
        OneForm::new(TruncSeries::new(self.r, self.c.clone()), self.m, Basis::Dz)
    }

    /// `nu` in the `dw` basis, pole order `N`.
    pub fn form_dw(&self) -> OneForm {
        self.form().to_dw()
    }

    /// Coefficients as a series in `w` modulo `w^N`.
    pub fn series(&self) -> TruncSeries {
        TruncSeries::new(self.r, self.c.clone())
    }

    /// `nu + k dw/w`: `dw/w = (1/r) w^(N-1) dz/z^m`.
    pub fn shift_dlog(&self, k: i64) -> Exponent {
        let mut c = self.c.clone();
        let last = c.len() - 1;
        c[last] = &c[last] + &self.field().from_q(Q::new(BigInt::from(k), BigInt::from(self.r)));
        Exponent { r: self.r, m: self.m, c }
    }

    /// Coefficient of `dw/w`.
    pub fn residue(&self) -> Scalar {
        self.c[self.n() - 1].scale(&Q::from_integer(BigInt::from(self.r)))
    }

    pub fn galois(&self, k: i64) -> Result<Exponent> {
        Ok(Exponent { r: self.r, m: self.m, c: self.series().galois(k)?.coeffs().to_vec() })
    }

    /// Same class up to the Galois orbit and `Z dw/w`: some conjugate agrees
    /// on `c_0..c_{N-2}` and differs at `c_{N-1}` by an element of `(1/r)Z`.
    pub fn same_orbit(&self, o: &Exponent) -> bool {
        if self.r != o.r || self.m != o.m || self.field() != o.field() {
            return false;
        }
        let conjugates: Vec<Exponent> = match self.field().root_of_unity(self.r as u64) {
            Ok(_) => (0..self.r as i64).filter_map(|k| self.galois(k).ok()).collect(),
            Err(_) => vec![self.clone()],
        };
        let n = self.n();
        conjugates.iter().any(|x| {
            x.c[..n - 1] == o.c[..n - 1] && {
                let d = (&x.c[n - 1] - &o.c[n - 1]).as_rational();
                d.is_some_and(|d| (d * Q::from_integer(BigInt::from(self.r))).is_integer())
            }
        })
    }

    /// `Tr(nu) = r a_0(z) dz/z^m`.
    pub fn trace(&self) -> OneForm {
        self.form().trace_form().expect("dz-basis form")
    }
}

/// `d + J(nu, s)` in the `dw` basis: entries are numerators over a common
/// pole order `pole`, with `nu` on the diagonal and `dw/w` on the
/// superdiagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMatrix {
    pub pole: usize,
    pub entries: Vec<Vec<TruncSeries>>,
}

pub fn normal_form_block(nu: &OneForm, s: usize) -> Result<FormMatrix> {
    if s == 0 {
        return Err(Error::Invalid("block size must be positive".into()));
    }
    let f = nu.to_dw();
    let pole = f.pole.max(1);
    let f = f.with_dw_pole(pole)?;
    let (field, r, n) = (f.numerator.field().clone(), f.numerator.ram(), f.numerator.n());
    let dlog = TruncSeries::monomial(&field.one(), pole - 1, r, n);
    let mut entries = vec![vec![TruncSeries::zero(&field, r, n); s]; s];
    for i in 0..s {
        entries[i][i] = f.numerator.clone();
        if i + 1 < s {
            entries[i][i + 1] = dlog.clone();
        }
    }
    Ok(FormMatrix { pole, entries })
}

/// Matrix of `nabla_nu = d + nu` on `K[[w]] = K[[z]]^r` in the basis
/// `1, w, ..., w^(r-1)`, truncated at `z^(m + buffer)`.
pub fn pushforward_ramified(nu: &Exponent, buffer: usize) -> FormalConnection {
    let (r, m) = (nu.r, nu.m);
    let big_m = m + buffer;
    let field = nu.field().clone();
    let mut a = smat::zero(&field, r, 1, big_m);
    for k in 0..r {
        for (l, c) in nu.c.iter().enumerate() {
            let t = l + k;
            let (j, p) = (t % r, t / r);
            let cur = a[j][k].coeff(p);
            a[j][k].set_coeff(p, &cur + c);
        }
        // d(w^k) = (k/r) (dz/z) w^k = (k/r) z^(m-1) w^k dz/z^m.
        let cur = a[k][k].coeff(m - 1);
        a[k][k].set_coeff(m - 1, &cur + &field.rat(k as i64, r as i64));
    }
    FormalConnection { rank: r, m, big_m, a }
}

/// Exponent of a connection of generic ramified type: the Puiseux
/// eigenvalue of `A` modulo `w^N`, minus the constant `(r-1)/(2r)` at
/// `w^(N-1)` contributed by `d(w^k) = (k/r) w^k dz/z`.
pub fn recover_exponent(conn: &FormalConnection) -> Result<Exponent> {
    let (r, m) = (conn.rank, conn.m);
    let n = m * r - r + 1;
    let field = conn.field().clone();
    if r == 1 {
        let c: Vec<Scalar> = (0..m).map(|l| conn.a[0][0].coeff(l)).collect();
        return Exponent::new(1, m, c);
    }
    let cp = conn.char_poly();
    let p0: Vec<Scalar> = cp.iter().map(|s| s.coeff(0)).collect();
    let c0 = p0[r - 1].scale(&Q::new(BigInt::from(-1), BigInt::from(r)));
    let expect = crate::poly::Poly::linear_root(&c0).pow(r);
    if crate::poly::Poly::new(&field, p0) != expect {
        return Err(Error::NotGenericRamified("leading matrix is not a single Jordan-type eigenvalue".into()));
    }
    let q = puiseux::taylor_shift_series(&cp, &c0);
    let v0 = q[0].ord();
    if v0 >= 2 {
        return Err(Error::C1Zero);
    }
    if v0 == 0 {
        return Err(Error::NotGenericRamified("shifted constant term does not vanish".into()));
    }
    let orbits = newton_puiseux(&cp, n)?;
    let orbit = match orbits.as_slice() {
        [o] if o.e == r => o,
        _ => return Err(Error::NotGenericRamified("eigenvalues do not form one totally ramified orbit".into())),
    };
    let root = &orbit.roots[0];
    let mut c: Vec<Scalar> = (0..n).map(|l| root.coeff(l)).collect();
    c[n - 1] = &c[n - 1] - &field.rat(r as i64 - 1, 2 * r as i64);
    Exponent::new(r, m, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat_exp(r: usize, m: usize, c: &[i64]) -> Exponent {
        let f = Field::cyclotomic(r as u64);
        Exponent::new(r, m, c.iter().map(|&x| f.from_int(x)).collect()).unwrap()
    }

    #[test]
    fn pushforward_rank_two_example() {
        let nu = rat_exp(2, 2, &[3, 5, 7]);
        let a = pushforward_ramified(&nu, 0).a;
        let f = nu.field().clone();
        let s = |c: &[Scalar]| TruncSeries::new(1, c.to_vec());
        assert_eq!(a[0][0], s(&[f.from_int(3), f.from_int(7)]));
        assert_eq!(a[0][1], s(&[f.zero(), f.from_int(5)]));
        assert_eq!(a[1][0], s(&[f.from_int(5), f.zero()]));
        assert_eq!(a[1][1], s(&[f.from_int(3), &f.from_int(7) + &f.rat(1, 2)]));
    }

    #[test]
    fn char_poly_small_cases() {
        let f = Field::rationals();
        let zero = smat::zero(&f, 3, 1, 3);
        let cp = char_poly(&zero);
        assert!(cp[..3].iter().all(TruncSeries::is_zero));
        let a = vec![vec![TruncSeries::new(1, vec![f.from_int(2), f.from_int(1)])]];
        let cp = char_poly(&a);
        assert_eq!(cp[0], TruncSeries::new(1, vec![f.from_int(-2), f.from_int(-1)]));
    }

    #[test]
    fn round_trip_rank_two() {
        let nu = rat_exp(2, 3, &[1, 2, -1, 4, 3]);
        let conn = pushforward_ramified(&nu, 2);
        let got = recover_exponent(&conn).unwrap();
        assert!(got.same_orbit(&nu), "{got:?} vs {nu:?}");
    }

    #[test]
    fn round_trip_rank_three_with_gauge() {
        let nu = rat_exp(3, 3, &[2, 1, -1, 3, 0, 2, 1]);
        let conn = pushforward_ramified(&nu, 2);
        assert!(recover_exponent(&conn).unwrap().same_orbit(&nu));
        let f = nu.field().clone();
        let mut g = smat::identity(&f, 3, 1, conn.big_m);
        g[0][1] = TruncSeries::new(1, vec![f.from_int(2), f.from_int(-1), f.one(), f.zero(), f.zero()]);
        g[2][0] = TruncSeries::new(1, vec![f.from_int(1), f.zero(), f.from_int(3), f.zero(), f.zero()]);
        g[1][2] = TruncSeries::new(1, vec![f.zero(), f.from_int(5), f.zero(), f.zero(), f.zero()]);
        let gauged = conn.gauge(&g).unwrap();
        assert_ne!(gauged.a, conn.a);
        assert!(recover_exponent(&gauged).unwrap().same_orbit(&nu));
    }

    #[test]
    fn c1_zero_detected() {
        let nu = rat_exp(3, 2, &[1, 0, 2, 5]);
        let conn = pushforward_ramified(&nu, 2);
        assert_eq!(recover_exponent(&conn), Err(Error::C1Zero));
    }

    #[test]
    fn normal_form_shapes() {
        let f = Field::rationals();
        let zero_nu = OneForm::new(TruncSeries::zero(&f, 1, 2), 0, Basis::Dw);
        let b = normal_form_block(&zero_nu, 2).unwrap();
        assert_eq!(b.pole, 1);
        assert!(b.entries[0][0].is_zero() && b.entries[1][0].is_zero() && b.entries[1][1].is_zero());
        assert_eq!(b.entries[0][1].coeff(0), f.one());
    }
}
