//! Dense univariate polynomials over a field tower.

use crate::error::{Error, Result};
use crate::scalars::{Field, Scalar, Q};
use num_bigint::BigInt;
use std::fmt;

/// Coefficients low to high; the representation is kept trimmed so the last
/// coefficient is nonzero (the zero polynomial has no coefficients).
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    c: Vec<Scalar>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let t: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| format!("({x})X^{i}"))
            .collect();
        write!(f, "{}", t.join(" + "))
    }
}

impl Poly {
    pub fn new(field: &Field, c: Vec<Scalar>) -> Poly {
        let mut p = Poly { field: field.clone(), c };
        p.trim();
        p
    }

    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), c: Vec::new() }
    }

    pub fn constant(c: &Scalar) -> Poly {
        Poly::new(c.field(), vec![c.clone()])
    }

    /// `X - a`.
    pub fn linear_root(a: &Scalar) -> Poly {
        Poly::new(a.field(), vec![-a, a.field().one()])
    }

    pub fn monomial(c: &Scalar, k: usize) -> Poly {
        let mut v = vec![c.field().zero(); k + 1];
        v[k] = c.clone();
        Poly::new(c.field(), v)
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(Scalar::is_zero) {
            self.c.pop();
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.c.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.c
    }

    pub fn lead(&self) -> Scalar {
        self.c.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new(&self.field, (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new(&self.field, (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|x| x * s).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Poly::new(&self.field, out)
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::constant(&self.field.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for c in self.c.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            &self.field,
            self.c.iter().enumerate().skip(1).map(|(i, c)| c.scale(&Q::from_integer(BigInt::from(i)))).collect(),
        )
    }

    /// Euclidean division.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let inv = d.lead().inv()?;
        let mut rem = self.c.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(&self.field), self.clone()));
        }
        let mut quo = vec![self.field.zero(); rem.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = &rem[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (i, x) in d.c.iter().enumerate() {
                rem[k + i] = &rem[k + i] - &(&c * x);
            }
            quo[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(&self.field, quo), Poly::new(&self.field, rem)))
    }

    pub fn monic(&self) -> Result<Poly> {
        let l = self.lead().inv()?;
        Ok(self.scale(&l))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic().unwrap_or(a)
    }

    /// `p(X + a)`.
    pub fn taylor_shift(&self, a: &Scalar) -> Poly {
        let mut acc = Poly::zero(&self.field);
        let lin = Poly::new(&self.field, vec![a.clone(), self.field.one()]);
        for c in self.c.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c));
        }
        acc
    }

    /// Multiplicity of `a` as a root (0 if not a root). Panics on zero.
    pub fn root_multiplicity(&self, a: &Scalar) -> usize {
        assert!(!self.is_zero());
        let s = self.taylor_shift(a);
        s.c.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Distinct roots in the field with multiplicities, when the squarefree
    /// part has degree at most 2 or splits into rational linear factors
    /// found by the rational root test. Otherwise `Unsupported`.
    pub fn roots(&self) -> Result<Vec<(Scalar, usize)>> {
        let deg = self.degree().ok_or_else(|| Error::Invalid("roots of the zero polynomial".into()))?;
        if deg == 0 {
            return Ok(Vec::new());
        }
        let g = self.gcd(&self.derivative());
        let sqf = self.div_rem(&g)?.0.monic()?;
        let cands: Vec<Scalar> = match sqf.degree() {
            Some(1) => vec![-sqf.coeff(0)],
            Some(2) => {
                let (b, c) = (sqf.coeff(1), sqf.coeff(0));
                let disc = &(&b * &b) - &c.scale(&Q::from_integer(BigInt::from(4)));
                match disc.nth_root(2) {
                    Some(s) => {
                        let half = Q::new(BigInt::from(1), BigInt::from(2));
                        vec![(&s - &b).scale(&half), (-(&s + &b)).scale(&half)]
                    }
                    None => Vec::new(),
                }
            }
            _ => rational_roots(&sqf),
        };
        let mut out: Vec<(Scalar, usize)> = Vec::new();
        for c in cands {
            if out.iter().any(|(x, _)| *x == c) {
                continue;
            }
            let mu = self.root_multiplicity(&c);
            if mu > 0 {
                out.push((c, mu));
            }
        }
        let found: usize = out.iter().map(|(_, m)| m).sum();
        if found != deg {
            return Err(Error::Unsupported(format!(
                "only {found} of {deg} roots could be located in the field"
            )));
        }
        out.sort_by(|a, b| a.0.cmp_coords(&b.0));
        Ok(out)
    }
}

/// Rational roots of a monic polynomial with rational coefficients.
fn rational_roots(p: &Poly) -> Vec<Scalar> {
    use num_integer::Integer;
    use num_traits::{One, Signed, Zero};
    let Some(qs) = p.c.iter().map(Scalar::as_rational).collect::<Option<Vec<Q>>>() else {
        return Vec::new();
    };
    let lcm = qs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = qs.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let Some(k) = ints.iter().position(|x| !x.is_zero()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    if k > 0 {
        out.push(p.field.zero());
    }
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.abs();
        let mut d = Vec::new();
        let mut i = BigInt::one();
        // Small coefficient polynomials only; cap the search.
        let cap = BigInt::from(100_000);
        while &i * &i <= n && i <= cap {
            if (&n % &i).is_zero() {
                d.push(i.clone());
                d.push(&n / &i);
            }
            i += 1;
        }
        d
    };
    let a0 = &ints[k];
    let an = ints.last().unwrap();
    for num in divisors(a0) {
        for den in divisors(an) {
            for sign in [1, -1] {
                let x = p.field.from_q(Q::new(&num * sign, den.clone()));
                if p.eval(&x).is_zero() && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
    }
    out
}
