//! Exact arithmetic in `Q(zeta_L)(beta_1, beta_2)` where each `beta_i`
//! satisfies an irreducible Kummer relation `beta_i^e = u_i`.
//!
//! Elements are flat rational coordinate vectors in the power basis
//! `zeta^i0 * beta_1^i1 * beta_2^i2`, flat index `i0 + d0*(i1 + e1*i2)`.
//! Level `n` of the tower is a polynomial in `beta_n` over level `n-1`,
//! so multiplication recurses down to reduction modulo the cyclotomic
//! polynomial.

mod roots;

pub use roots::{embeddings, is_kummer_irreducible};

use crate::error::{Error, Result};
use crate::linalg;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// Exact rationals.
pub type Q = BigRational;

/// Convenience constructor for `p/q`.
pub fn q(p: i64, d: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(d))
}

/// Declarative description of a tower: cyclotomic order and an ordered list
/// of radicals `(e, u)` with `u` given by its coordinates over the tower
/// below it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub cyclotomic_order: u64,
    pub radicals: Vec<(u32, Vec<Q>)>,
}

#[derive(Debug, PartialEq, Eq)]
struct Radical {
    e: usize,
    u: Vec<Q>,
}

#[derive(Debug, PartialEq, Eq)]
struct FieldInner {
    l: u64,
    phi: Vec<Q>,
    radicals: Vec<Radical>,
    dims: Vec<usize>,
}

/// Handle to a verified field tower. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for Field {}

/// Element of a field tower in canonical coordinates.
#[derive(Clone)]
pub struct Scalar {
    field: Field,
    c: Vec<Q>,
}

fn cyclotomic_poly(l: u64) -> Vec<i64> {
    // Phi_L = (x^L - 1) / prod_{d | L, d < L} Phi_d, integer division.
    let mut num = vec![0i64; l as usize + 1];
    num[0] = -1;
    num[l as usize] = 1;
    for d in 1..l {
        if l.is_multiple_of(d) {
            let den = cyclotomic_poly(d);
            num = poly_div_exact(&num, &den);
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    let mut quo = vec![0i64; nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd] / den[dd];
        quo[k] = c;
        for i in 0..=dd {
            rem[k + i] -= c * den[i];
        }
    }
    quo
}

impl Field {
    /// Builds and verifies a tower. Each radical must be irreducible over
    /// the tower below it (Kummer criterion) and the depth is at most 2.
    pub fn make(spec: &FieldSpec) -> Result<Field> {
        if spec.cyclotomic_order == 0 {
            return Err(Error::Invalid("cyclotomic order must be at least 1".into()));
        }
        let mut f = Field::cyclotomic(spec.cyclotomic_order);
        for (e, u) in &spec.radicals {
            let u = f.from_coeffs(u.clone())?;
            f = f.extend(*e, &u)?;
        }
        Ok(f)
    }

    /// `Q(zeta_L)` with no radicals.
    pub fn cyclotomic(l: u64) -> Field {
        assert!(l >= 1, "cyclotomic order must be at least 1");
        let phi: Vec<Q> = cyclotomic_poly(l).into_iter().map(|c| Q::from_integer(BigInt::from(c))).collect();
        let d0 = phi.len() - 1;
        Field(Arc::new(FieldInner { l, phi, radicals: Vec::new(), dims: vec![d0] }))
    }

    /// The rationals.
    pub fn rationals() -> Field {
        Field::cyclotomic(1)
    }

    /// Adjoins `beta` with `beta^e = u` after checking irreducibility.
    pub fn extend(&self, e: u32, u: &Scalar) -> Result<Field> {
        self.check(u);
        if self.0.radicals.len() >= 2 {
            return Err(Error::TowerTooDeep);
        }
        if e < 2 {
            return Err(Error::Invalid("radical exponent must be at least 2".into()));
        }
        if let Err(reason) = is_kummer_irreducible(e, u) {
            return Err(Error::RadicalReducible { e, reason });
        }
        let mut radicals: Vec<Radical> =
            self.0.radicals.iter().map(|r| Radical { e: r.e, u: r.u.clone() }).collect();
        radicals.push(Radical { e: e as usize, u: u.c.clone() });
        let mut dims = self.0.dims.clone();
        dims.push(self.degree() * e as usize);
        Ok(Field(Arc::new(FieldInner { l: self.0.l, phi: self.0.phi.clone(), radicals, dims })))
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            cyclotomic_order: self.0.l,
            radicals: self.0.radicals.iter().map(|r| (r.e as u32, r.u.clone())).collect(),
        }
    }

    pub fn cyclotomic_order(&self) -> u64 {
        self.0.l
    }

    /// Degree over `Q`.
    /// Index of the top tower level in `dims`.
    fn top_level(&self) -> usize {
        self.0.dims.len() - 1
    }

    pub fn degree(&self) -> usize {
        *self.0.dims.last().unwrap()
    }

    /// Degree of `Q(zeta_L)` over `Q`.
    pub fn base_degree(&self) -> usize {
        self.0.dims[0]
    }

    pub fn radical_count(&self) -> usize {
        self.0.radicals.len()
    }

    /// Exponent of the `i`-th radical.
    pub fn radical_exponent(&self, i: usize) -> usize {
        self.0.radicals[i].e
    }

    /// Field obtained by dropping radicals beyond the first `n`.
    pub fn truncate_tower(&self, n: usize) -> Field {
        let n = n.min(self.radical_count());
        if n == self.radical_count() {
            return self.clone();
        }
        let radicals = self.0.radicals[..n].iter().map(|r| Radical { e: r.e, u: r.u.clone() }).collect();
        Field(Arc::new(FieldInner {
            l: self.0.l,
            phi: self.0.phi.clone(),
            radicals,
            dims: self.0.dims[..=n].to_vec(),
        }))
    }

    /// Embeds an element of a sub-tower (same cyclotomic order, prefix of
    /// the radical list) into this field.
    pub fn lift(&self, x: &Scalar) -> Result<Scalar> {
        let sub = &x.field;
        if sub == self {
            return Ok(x.clone());
        }
        let n = sub.radical_count();
        if sub.0.l != self.0.l || n > self.radical_count() || self.truncate_tower(n) != *sub {
            return Err(Error::FieldMismatch);
        }
        let mut c = x.c.clone();
        c.resize(self.degree(), Q::zero());
        Ok(Scalar { field: self.clone(), c })
    }

    pub fn zero(&self) -> Scalar {
        Scalar { field: self.clone(), c: vec![Q::zero(); self.degree()] }
    }

    pub fn one(&self) -> Scalar {
        self.from_q(Q::one())
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        self.from_q(Q::from_integer(BigInt::from(n)))
    }

    pub fn rat(&self, p: i64, d: i64) -> Scalar {
        self.from_q(q(p, d))
    }

    pub fn from_q(&self, v: Q) -> Scalar {
        let mut x = self.zero();
        x.c[0] = v;
        x
    }

    /// Builds an element from coordinates; shorter vectors are zero padded.
    pub fn from_coeffs(&self, mut c: Vec<Q>) -> Result<Scalar> {
        if c.len() > self.degree() {
            return Err(Error::Invalid(format!(
                "{} coordinates given for a field of degree {}",
                c.len(),
                self.degree()
            )));
        }
        c.resize(self.degree(), Q::zero());
        Ok(Scalar { field: self.clone(), c })
    }

    /// The generator `zeta_L`.
    pub fn zeta(&self) -> Scalar {
        let mut x = self.zero();
        if self.base_degree() == 1 {
            // zeta_1 = 1, zeta_2 = -1.
            x.c[0] = if self.0.l == 2 { -Q::one() } else { Q::one() };
        } else {
            x.c[1] = Q::one();
        }
        x
    }

    /// `zeta_L^k` for any integer `k`.
    pub fn zeta_pow(&self, k: i64) -> Scalar {
        let l = self.0.l as i64;
        self.zeta().pow(k.rem_euclid(l) as u32)
    }

    /// The radical `beta_{i+1}`.
    pub fn radical(&self, i: usize) -> Scalar {
        let mut x = self.zero();
        x.c[self.0.dims[i]] = Q::one();
        x
    }

    /// A primitive `r`-th root of unity, when the field contains one.
    pub fn root_of_unity(&self, r: u64) -> Result<Scalar> {
        let l = self.0.l;
        if r == 0 {
            return Err(Error::MissingRoot(0));
        }
        if l.is_multiple_of(r) {
            return Ok(self.zeta_pow((l / r) as i64));
        }
        if l % 2 == 1 && (2 * l).is_multiple_of(r) {
            // -zeta_L is a primitive 2L-th root of unity.
            return Ok((-self.zeta()).pow((2 * l / r) as u32));
        }
        Err(Error::MissingRoot(r))
    }

    fn check(&self, x: &Scalar) {
        assert!(x.field == *self, "scalar from a different field");
    }

    fn mul_level(&self, level: usize, a: &[Q], b: &[Q]) -> Vec<Q> {
        if level == 0 {
            return self.mul_cyclotomic(a, b);
        }
        let rad = &self.0.radicals[level - 1];
        let low = self.0.dims[level - 1];
        let e = rad.e;
        let mut prod: Vec<Option<Vec<Q>>> = vec![None; 2 * e - 1];
        for i in 0..e {
            let ai = &a[i * low..(i + 1) * low];
            if ai.iter().all(Zero::is_zero) {
                continue;
            }
            for j in 0..e {
                let bj = &b[j * low..(j + 1) * low];
                if bj.iter().all(Zero::is_zero) {
                    continue;
                }
                let p = self.mul_level(level - 1, ai, bj);
                match &mut prod[i + j] {
                    Some(acc) => acc.iter_mut().zip(p).for_each(|(x, y)| *x += y),
                    slot => *slot = Some(p),
                }
            }
        }
        for k in (e..2 * e - 1).rev() {
            if let Some(top) = prod[k].take() {
                let t = self.mul_level(level - 1, &top, &rad.u);
                match &mut prod[k - e] {
                    Some(acc) => acc.iter_mut().zip(t).for_each(|(x, y)| *x += y),
                    slot => *slot = Some(t),
                }
            }
        }
        let mut out = Vec::with_capacity(e * low);
        for p in prod.into_iter().take(e) {
            match p {
                Some(v) => out.extend(v),
                None => out.extend(std::iter::repeat_n(Q::zero(), low)),
            }
        }
        out
    }

    fn mul_cyclotomic(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let d = a.len();
        if d == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut p = vec![Q::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    p[i + j] += x * y;
                }
            }
        }
        let phi = &self.0.phi;
        for k in (d..2 * d - 1).rev() {
            if p[k].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut p[k]);
            for (i, f) in phi.iter().enumerate().take(d) {
                if !f.is_zero() {
                    p[k - d + i] -= &c * f;
                }
            }
        }
        p.truncate(d);
        p
    }
}

impl Scalar {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(Zero::is_zero)
    }

    /// The rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Q> {
        if self.c[1..].iter().all(Zero::is_zero) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, s: &Q) -> Scalar {
        Scalar { field: self.field.clone(), c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn pow(&self, mut n: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse via the multiplication-matrix linear system.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.field.degree();
        if d == 1 {
            return Ok(Scalar { field: self.field.clone(), c: vec![self.c[0].recip()] });
        }
        // Column j of the matrix is self * basis_j.
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            let mut e = vec![Q::zero(); d];
            e[j] = Q::one();
            cols.push(self.field.mul_level(self.field.0.dims.len() - 1, &self.c, &e));
        }
        let rows: Vec<Vec<Q>> = (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
        let mut rhs = vec![Q::zero(); d];
        rhs[0] = Q::one();
        let (x, _) = linalg::solve(&rows, &rhs, d, &Q::zero()).ok_or(Error::DivisionByZero)?;
        Ok(Scalar { field: self.field.clone(), c: x })
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar> {
        Ok(self * &o.inv()?)
    }

    /// Deterministic total order on coordinates, used only to canonicalise
    /// lists of roots.
    pub fn cmp_coords(&self, o: &Scalar) -> Ordering {
        for (a, b) in self.c.iter().zip(&o.c) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// Value under the principal complex embedding (`zeta_L -> e^{2 pi i/L}`,
    /// radicals to principal roots). Evaluated in double precision, so the
    /// achievable relative accuracy is capped near `2^-52` whatever
    /// `precision` asks for. Reporting only.
    pub fn embed_complex(&self, precision: u32) -> num_complex::Complex64 {
        let _ = precision.min(52);
        let images = roots::principal_basis_images(&self.field);
        self.c
            .iter()
            .zip(images)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, b)| b * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }

    /// All `n`-th roots of `self` lying in the field, canonically ordered.
    pub fn nth_roots(&self, n: u32) -> Vec<Scalar> {
        roots::nth_roots(self, n)
    }

    /// One `n`-th root in the field, if any (the first canonical one).
    pub fn nth_root(&self, n: u32) -> Option<Scalar> {
        self.nth_roots(n).into_iter().next()
    }

    /// Human-readable rendering: rationals print plainly, other elements as
    /// a sum over the power basis with `z` for `zeta_L` and `b1`, `b2` for
    /// the radicals.
    pub fn render(&self) -> String {
        if let Some(r) = self.as_rational() {
            return r.to_string();
        }
        let f = &self.field;
        let d0 = f.base_degree();
        let mut terms = Vec::new();
        for (idx, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let i0 = idx % d0;
            let mut rest = idx / d0;
            let mut mono = Vec::new();
            if i0 > 0 {
                mono.push(if i0 == 1 { "z".to_string() } else { format!("z^{i0}") });
            }
            for k in 0..f.radical_count() {
                let e = f.radical_exponent(k);
                let p = rest % e;
                rest /= e;
                if p > 0 {
                    mono.push(if p == 1 { format!("b{}", k + 1) } else { format!("b{}^{p}", k + 1) });
                }
            }
            let coef = c.to_string();
            let term = if mono.is_empty() {
                coef
            } else if c.is_one() {
                mono.join("*")
            } else if (-c).is_one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", paren(&coef), mono.join("*"))
            };
            terms.push(term);
        }
        terms.join(" + ").replace("+ -", "- ")
    }

    /// Height used when choosing small test data: max over numerators and
    /// denominators of the coordinates.
    pub fn height(&self) -> BigInt {
        self.c
            .iter()
            .map(|x| x.numer().abs().max(x.denom().clone()))
            .max()
            .unwrap_or_else(BigInt::one)
    }

    pub(crate) fn raw(field: &Field, c: Vec<Q>) -> Scalar {
        debug_assert_eq!(c.len(), field.degree());
        Scalar { field: field.clone(), c }
    }
}

fn paren(s: &str) -> String {
    if s.contains('/') || s.starts_with('-') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.c == o.c
    }
}
impl Eq for Scalar {}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.field.check(o);
        Scalar { field: self.field.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self.field.check(o);
        Scalar { field: self.field.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.field.check(o);
        if let Some(r) = self.as_rational() {
            return o.scale(&r);
        }
        if let Some(r) = o.as_rational() {
            return self.scale(&r);
        }
        let level = self.field.top_level();
        Scalar { field: self.field.clone(), c: self.field.mul_level(level, &self.c, &o.c) }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { field: self.field.clone(), c: self.c.iter().map(|a| -a).collect() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl linalg::FieldElem for Scalar {
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.one()
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
        self.inv().ok()
    }
}

/// Greatest common divisor helper for small integers.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn gaussian_integers() {
        let f = Field::cyclotomic(4);
        let i = f.zeta();
        assert_eq!(&i * &i, f.from_int(-1));
        assert_eq!(i.pow(4), f.one());
    }

    #[test]
    fn zeta3_sum() {
        let f = Field::cyclotomic(3);
        let z = f.zeta();
        assert_eq!(&z + &z.pow(2), f.from_int(-1));
    }

    #[test]
    fn roots_of_unity() {
        let f = Field::cyclotomic(3);
        let m = f.root_of_unity(6).unwrap();
        assert_eq!(m.pow(6), f.one());
        assert_ne!(m.pow(3), f.one());
        assert_ne!(m.pow(2), f.one());
        assert!(f.root_of_unity(4).is_err());
        assert_eq!(Field::rationals().root_of_unity(2).unwrap(), Field::rationals().from_int(-1));
    }

    #[test]
    fn radical_arithmetic() {
        let f = Field::cyclotomic(4).extend(2, &Field::cyclotomic(4).from_int(2)).unwrap();
        let b = f.radical(0);
        assert_eq!(&b * &b, f.from_int(2));
        let x = &b + &f.zeta();
        let inv = x.inv().unwrap();
        assert_eq!(&x * &inv, f.one());
    }

    #[test]
    fn depth_two_tower() {
        let base = Field::rationals();
        let f1 = base.extend(2, &base.from_int(2)).unwrap();
        let f2 = f1.extend(2, &f1.from_int(3)).unwrap();
        assert_eq!(f2.degree(), 4);
        let s6 = &f2.radical(0) * &f2.radical(1);
        assert_eq!(&s6 * &s6, f2.from_int(6));
        let x = &f2.radical(1) + &f2.one();
        assert_eq!(&x * &x.inv().unwrap(), f2.one());
        assert!(matches!(f2.extend(2, &f2.from_int(5)), Err(Error::TowerTooDeep)));
    }

    #[test]
    fn lift_from_subtower() {
        let base = Field::cyclotomic(3);
        let f = base.extend(2, &base.from_int(2)).unwrap();
        let z = f.lift(&base.zeta()).unwrap();
        assert_eq!(z, f.zeta());
        assert!(Field::cyclotomic(4).lift(&base.zeta()).is_err());
    }
}
