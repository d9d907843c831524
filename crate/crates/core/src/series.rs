//! Truncated series `K[w]/(w^N)` with ramification `w^r = z`, and 1-forms in
//! the `dw` and `dz` bases.
//!
//! A series with `r = 1` is simply a truncated series in `z`.

use crate::error::{Error, Result};
use crate::scalars::{Field, Scalar, Q};
use num_bigint::BigInt;
use num_traits::One;
use std::fmt;

/// Element of `K[w]/(w^N)`; `N` is the length of the coefficient vector.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    r: usize,
    coeffs: Vec<Scalar>,
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = if self.r == 1 { "z" } else { "w" };
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c}){var}^{i}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0 mod {var}^{}", self.n())
        } else {
            write!(f, "{} mod {var}^{}", terms.join(" + "), self.n())
        }
    }
}

impl TruncSeries {
    pub fn new(r: usize, coeffs: Vec<Scalar>) -> TruncSeries {
        assert!(r >= 1 && !coeffs.is_empty(), "need r >= 1 and N >= 1");
        TruncSeries { r, coeffs }
    }

    pub fn zero(field: &Field, r: usize, n: usize) -> TruncSeries {
        TruncSeries::new(r, vec![field.zero(); n])
    }

    pub fn constant(c: &Scalar, r: usize, n: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(c.field(), r, n);
        s.coeffs[0] = c.clone();
        s
    }

    pub fn one(field: &Field, r: usize, n: usize) -> TruncSeries {
        TruncSeries::constant(&field.one(), r, n)
    }

    /// `c * w^k`, zero when `k >= N`.
    pub fn monomial(c: &Scalar, k: usize, r: usize, n: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(c.field(), r, n);
        if k < n {
            s.coeffs[k] = c.clone();
        }
        s
    }

    /// Builds a series from rational coefficients.
    pub fn from_rationals(field: &Field, r: usize, n: usize, c: &[Q]) -> TruncSeries {
        let mut s = TruncSeries::zero(field, r, n);
        for (i, x) in c.iter().enumerate().take(n) {
            s.coeffs[i] = field.from_q(x.clone());
        }
        s
    }

    pub fn ram(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn field(&self) -> &Field {
        self.coeffs[0].field()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `w^i`; zero beyond the truncation.
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field().zero())
    }

    pub fn set_coeff(&mut self, i: usize, c: Scalar) {
        if i < self.n() {
            self.coeffs[i] = c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Smallest `l` with a nonzero coefficient; `N` for the zero class.
    pub fn ord(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.n())
    }

    /// Same element in `K[w]/(w^n)`: truncates or zero-pads.
    pub fn resize(&self, n: usize) -> TruncSeries {
        let mut c = self.coeffs.clone();
        c.resize(n, self.field().zero());
        TruncSeries::new(self.r, c)
    }

    /// Reinterprets the ramification index without touching coefficients.
    pub fn with_ram(&self, r: usize) -> TruncSeries {
        TruncSeries::new(r, self.coeffs.clone())
    }

    pub fn add(&self, o: &TruncSeries) -> TruncSeries {
        self.check(o);
        TruncSeries::new(self.r, self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &TruncSeries) -> TruncSeries {
        self.check(o);
        TruncSeries::new(self.r, self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries::new(self.r, self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &Scalar) -> TruncSeries {
        TruncSeries::new(self.r, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn scale_q(&self, c: &Q) -> TruncSeries {
        TruncSeries::new(self.r, self.coeffs.iter().map(|a| a.scale(c)).collect())
    }

    /// Product modulo `w^N`; underflow beyond the truncation is dropped.
    pub fn mul(&self, o: &TruncSeries) -> TruncSeries {
        self.check(o);
        let n = self.n();
        let mut out = vec![self.field().zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        TruncSeries::new(self.r, out)
    }

    pub fn pow(&self, e: usize) -> TruncSeries {
        let mut acc = TruncSeries::one(self.field(), self.r, self.n());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplication by `w^k`.
    pub fn shift(&self, k: usize) -> TruncSeries {
        let n = self.n();
        let mut out = vec![self.field().zero(); n];
        if k < n {
            out[k..].clone_from_slice(&self.coeffs[..n - k]);
        }
        TruncSeries::new(self.r, out)
    }

    /// Division by `w^k`, valid when `ord >= k`; the top `k` coefficients
    /// become zero (they are unknown).
    pub fn unshift(&self, k: usize) -> Result<TruncSeries> {
        if self.ord() < k {
            return Err(Error::Invalid(format!("series of order {} is not divisible by w^{k}", self.ord())));
        }
        let n = self.n();
        let mut out = vec![self.field().zero(); n];
        if k < n {
            out[..n - k].clone_from_slice(&self.coeffs[k..]);
        }
        Ok(TruncSeries::new(self.r, out))
    }

    /// Inverse of a unit (nonzero constant term).
    pub fn inverse(&self) -> Result<TruncSeries> {
        let a0 = self.coeffs[0].inv()?;
        let n = self.n();
        let mut out = vec![self.field().zero(); n];
        out[0] = a0.clone();
        for k in 1..n {
            let mut s = self.field().zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() && !out[k - j].is_zero() {
                    s = &s + &(&self.coeffs[j] * &out[k - j]);
                }
            }
            out[k] = -(&s * &a0);
        }
        Ok(TruncSeries::new(self.r, out))
    }

    /// Formal derivative `d/dw`; the top coefficient is lost.
    pub fn derivative(&self) -> TruncSeries {
        let n = self.n();
        let mut out = vec![self.field().zero(); n];
        for i in 1..n {
            out[i - 1] = self.coeffs[i].scale(&Q::from_integer(BigInt::from(i)));
        }
        TruncSeries::new(self.r, out)
    }

    /// Galois twist `w -> zeta_r^k w`.
    pub fn galois(&self, k: i64) -> Result<TruncSeries> {
        let zeta = self.field().root_of_unity(self.r as u64)?;
        let step = zeta.pow(k.rem_euclid(self.r as i64) as u32);
        let mut acc = self.field().one();
        let mut out = Vec::with_capacity(self.n());
        for c in &self.coeffs {
            out.push(c * &acc);
            acc = &acc * &step;
        }
        Ok(TruncSeries::new(self.r, out))
    }

    /// Substitution `w -> c*w` (used for explicit Galois conjugates).
    pub fn rescale_var(&self, c: &Scalar) -> TruncSeries {
        let mut acc = self.field().one();
        let mut out = Vec::with_capacity(self.n());
        for x in &self.coeffs {
            out.push(x * &acc);
            acc = &acc * c;
        }
        TruncSeries::new(self.r, out)
    }

    /// Reads a `z`-series (`r = 1`) as a series in `w` with `w^r = z`,
    /// truncated at `w^n`.
    pub fn z_to_w(&self, r: usize, n: usize) -> TruncSeries {
        assert_eq!(self.r, 1, "z_to_w expects a z-series");
        let mut out = TruncSeries::zero(self.field(), r, n);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * r < n {
                out.coeffs[i * r] = c.clone();
            }
        }
        out
    }

    /// Decomposes `f = sum_k a_k(z) w^k` with `k < r`, returning `a_k` as
    /// `z`-series of length `ceil(N/r)`.
    pub fn z_components(&self) -> Vec<TruncSeries> {
        let r = self.r;
        let nz = self.n().div_ceil(r);
        (0..r)
            .map(|k| {
                let mut a = TruncSeries::zero(self.field(), 1, nz);
                for j in 0..nz {
                    if let Some(c) = self.coeffs.get(k + r * j) {
                        a.coeffs[j] = c.clone();
                    }
                }
                a
            })
            .collect()
    }

    /// True when `self - o` vanishes modulo `w^n`.
    pub fn eq_mod(&self, o: &TruncSeries, n: usize) -> bool {
        (0..n).all(|i| self.coeff(i) == o.coeff(i))
    }

    fn check(&self, o: &TruncSeries) {
        assert!(self.r == o.r && self.n() == o.n(), "series in different rings");
    }
}

/// Basis tag of a 1-form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Dw,
    Dz,
}

/// `numerator * dw/w^pole` or `numerator * dz/z^pole`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    pub numerator: TruncSeries,
    pub pole: usize,
    pub basis: Basis,
}

impl OneForm {
    pub fn new(numerator: TruncSeries, pole: usize, basis: Basis) -> OneForm {
        OneForm { numerator, pole, basis }
    }

    /// `dw/w`, with numerator ring of length `n`.
    pub fn dlog_w(field: &Field, r: usize, n: usize) -> OneForm {
        OneForm::new(TruncSeries::one(field, r, n), 1, Basis::Dw)
    }

    /// Rewrites in the `dw` basis using `dz/z^p = r dw/w^(rp-r+1)`.
    pub fn to_dw(&self) -> OneForm {
        match self.basis {
            Basis::Dw => self.clone(),
            Basis::Dz => {
                let r = self.numerator.ram();
                let rq = Q::from_integer(BigInt::from(r));
                let num = self.numerator.scale_q(&rq);
                if self.pole >= 1 {
                    OneForm::new(num, r * self.pole - r + 1, Basis::Dw)
                } else {
                    // dz = r w^(r-1) dw: numerator grows, nothing is lost.
                    let grown = num.resize(num.n() + r - 1).shift(r - 1);
                    OneForm::new(grown, 0, Basis::Dw)
                }
            }
        }
    }

    /// Rewrites in the `dz` basis with the smallest pole order `m` such that
    /// `dw/w^p = (w^s / r) dz/z^m`; the numerator ring grows by `s`.
    pub fn to_dz(&self) -> Result<OneForm> {
        match self.basis {
            Basis::Dz => Ok(self.clone()),
            Basis::Dw => {
                let r = self.numerator.ram();
                let total = self.pole + r - 1;
                let m = total.div_ceil(r);
                let s = r * m - total;
                if s > 0 && self.numerator.n().checked_add(s).is_none() {
                    return Err(Error::PoleOverflow("numerator length overflow".into()));
                }
                let inv_r = Q::new(BigInt::one(), BigInt::from(r));
                let num = self.numerator.scale_q(&inv_r).resize(self.numerator.n() + s).shift(s);
                Ok(OneForm::new(num, m, Basis::Dz))
            }
        }
    }

    /// Raises the pole order of a `dw`-form to `p` by multiplying the
    /// numerator by `w^(p - pole)`, growing the ring accordingly.
    pub fn with_dw_pole(&self, p: usize) -> Result<OneForm> {
        let f = self.to_dw();
        if p < f.pole {
            return Err(Error::PoleOverflow(format!("cannot lower pole order {} to {p}", f.pole)));
        }
        let d = p - f.pole;
        let num = f.numerator.resize(f.numerator.n() + d).shift(d);
        Ok(OneForm::new(num, p, Basis::Dw))
    }

    /// Equality as forms, comparing in the `dw` basis at a common pole order
    /// on the coefficient range known for both.
    pub fn equivalent(&self, o: &OneForm) -> bool {
        let (a, b) = (self.to_dw(), o.to_dw());
        if a.numerator.ram() != b.numerator.ram() {
            return false;
        }
        let p = a.pole.max(b.pole);
        let (Ok(a), Ok(b)) = (a.with_dw_pole(p), b.with_dw_pole(p)) else {
            return false;
        };
        let n = a.numerator.n().min(b.numerator.n());
        a.numerator.eq_mod(&b.numerator, n)
    }

    /// Coefficient of `dw/w`.
    pub fn residue(&self) -> Result<Scalar> {
        let f = self.to_dw();
        if f.pole == 0 {
            return Err(Error::PoleTooSmall);
        }
        if f.pole > f.numerator.n() {
            return Err(Error::TruncationTooShort(format!(
                "residue needs the coefficient of w^{} but the numerator stops at w^{}",
                f.pole - 1,
                f.numerator.n() - 1
            )));
        }
        Ok(f.numerator.coeff(f.pole - 1))
    }

    /// Galois twist of the form; `dw/w` is invariant so only the `dw/w^p`
    /// normalisation contributes the extra factor `zeta^(k(1-p))`.
    pub fn galois(&self, k: i64) -> Result<OneForm> {
        match self.basis {
            Basis::Dz => Ok(OneForm::new(self.numerator.galois(k)?, self.pole, Basis::Dz)),
            Basis::Dw => {
                let r = self.numerator.ram() as i64;
                let zeta = self.numerator.field().root_of_unity(r as u64)?;
                let e = (k * (1 - self.pole as i64)).rem_euclid(r) as u32;
                let num = self.numerator.galois(k)?.scale(&zeta.pow(e));
                Ok(OneForm::new(num, self.pole, Basis::Dw))
            }
        }
    }

    /// `Tr(nu) = r a_0(z) dz/z^m` for a `dz`-basis form, returned as a form
    /// over the `z`-line (`r = 1`).
    pub fn trace_form(&self) -> Result<OneForm> {
        if self.basis != Basis::Dz {
            return Err(Error::Invalid("trace_form expects a form in the dz basis".into()));
        }
        let r = self.numerator.ram();
        let a0 = self.numerator.z_components().swap_remove(0);
        Ok(OneForm::new(a0.scale_q(&Q::from_integer(BigInt::from(r))), self.pole, Basis::Dz))
    }
}
