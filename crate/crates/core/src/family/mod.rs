//! The two-parameter deformation of one ramified block over `(t, h)`.
//!
//! The pole `z = 0` of order `m` splits into the points `a_q = h kappa_q`,
//! and the ramified coordinate is deformed to `W` with `W^r = t^r + z`.
//! The fibre over `(0, 0)` is the ramified block itself, over `(t != 0, 0)`
//! it becomes unramified irregular, and over `h != 0` regular singular.

use crate::error::{Error, Result};
use crate::formal::Exponent;
use crate::linalg;
use crate::poly::Poly;
use crate::scalars::{Field, Scalar, Q};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// One block of the family: exponent coefficients `c_0..c_{N-1}` with
/// `N = mr - r + 1` and collision parameters `kappa_0 = 0, kappa_1, ...`,
/// pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyBlock {
    pub r: usize,
    pub m: usize,
    pub c: Vec<Scalar>,
    pub kappa: Vec<Scalar>,
}

impl FamilyBlock {
    pub fn new(r: usize, m: usize, c: Vec<Scalar>, kappa: Vec<Scalar>) -> Result<FamilyBlock> {
        if r == 0 || m == 0 {
            return Err(Error::Invalid("family block needs r >= 1 and m >= 1".into()));
        }
        let n = m * r - r + 1;
        if c.len() != n || kappa.len() != m {
            return Err(Error::Invalid(format!("need {n} coefficients and {m} collision parameters")));
        }
        let field = c[0].field().clone();
        if c.iter().chain(&kappa).any(|x| *x.field() != field) {
            return Err(Error::FieldMismatch);
        }
        field.root_of_unity(r as u64)?;
        if !kappa[0].is_zero() {
            return Err(Error::Invalid("kappa_0 must be 0".into()));
        }
        for q in 0..m {
            for p in 0..q {
                if kappa[p] == kappa[q] {
                    return Err(Error::DegenerateParameters(format!("kappa_{p} = kappa_{q} = {}", kappa[q])));
                }
            }
        }
        Ok(FamilyBlock { r, m, c, kappa })
    }

    pub fn field(&self) -> &Field {
        self.c[0].field()
    }

    fn zeta(&self) -> Scalar {
        self.field().root_of_unity(self.r as u64).expect("checked in new")
    }
}

/// Polynomial in two variables, keyed by exponent pairs.
pub type Bivariate = BTreeMap<(usize, usize), Scalar>;

fn bi_add_term(p: &mut Bivariate, key: (usize, usize), c: &Scalar) {
    let s = p.get(&key).map_or_else(|| c.clone(), |x| x + c);
    if s.is_zero() {
        p.remove(&key);
    } else {
        p.insert(key, s);
    }
}

fn bi_mul(a: &Bivariate, b: &Bivariate) -> Bivariate {
    let mut out = Bivariate::new();
    for (&(i, j), x) in a {
        for (&(k, l), y) in b {
            bi_add_term(&mut out, (i + k, j + l), &(x * y));
        }
    }
    out
}

/// `nu~_k = (sum_l c_l W^l) dz / (z_0 ... z_{m-1}) + (k/r) dz_0/z_0` with
/// `z_q = z - h kappa_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyExponent {
    pub r: usize,
    pub m: usize,
    pub k: usize,
    /// Coefficient of `W^l`.
    pub numerator: Vec<Scalar>,
    pub kappa: Vec<Scalar>,
    /// Coefficient of `dz_0/z_0`.
    pub log_coeff: Scalar,
}

pub fn build_family_exponent(fb: &FamilyBlock, k: usize) -> Result<FamilyExponent> {
    if k >= fb.r {
        return Err(Error::Invalid(format!("k = {k} must be below r = {}", fb.r)));
    }
    Ok(FamilyExponent {
        r: fb.r,
        m: fb.m,
        k,
        numerator: fb.c.clone(),
        kappa: fb.kappa.clone(),
        log_coeff: fb.field().from_q(Q::new(BigInt::from(k), BigInt::from(fb.r))),
    })
}

impl FamilyExponent {
    /// The numerator reduced by `W^r = t^r + z`: entry `l < r` is the
    /// coefficient of `W^l` as a polynomial in `(t, z)`.
    pub fn reduced_numerator(&self) -> Vec<Bivariate> {
        let r = self.r;
        let mut base = Bivariate::new();
        let one = self.numerator[0].field().one();
        base.insert((r, 0), one.clone());
        base.insert((0, 1), one.clone());
        let mut out = vec![Bivariate::new(); r];
        let mut power = Bivariate::from([((0, 0), one)]);
        for (l, c) in self.numerator.iter().enumerate() {
            if l > 0 && l % r == 0 {
                power = bi_mul(&power, &base);
            }
            for (key, x) in &power {
                bi_add_term(&mut out[l % r], *key, &(x * c));
            }
        }
        out
    }

    /// `prod_q (z - h kappa_q)` as a polynomial in `(z, h)`.
    pub fn denominator(&self) -> Bivariate {
        let field = self.numerator[0].field();
        let mut out = Bivariate::from([((0, 0), field.one())]);
        for kq in &self.kappa {
            let mut lin = Bivariate::from([((1, 0), field.one())]);
            bi_add_term(&mut lin, (0, 1), &-kq);
            out = bi_mul(&out, &lin);
        }
        out
    }

    /// Fibre over `t = h = 0`: `W = w`, every `z_q = z`, and
    /// `dz/z = w^{r(m-1)} dz/z^m`.
    pub fn at_origin(&self) -> Result<Exponent> {
        let mut c = self.numerator.clone();
        let top = self.r * (self.m - 1);
        c[top] = &c[top] + &self.log_coeff;
        Exponent::new(self.r, self.m, c)
    }
}

/// `lambda = sum_k (sum_{l'} c_{r l'} (z + t^r)^{l'} dz/(z_0...z_{m-1})
/// + (k/r) dz_0/z_0)`: numerator polynomial in `z` at the given `t`, and
/// the `dz_0/z_0` coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaForm {
    pub numerator: Poly,
    pub log_coeff: Scalar,
}

pub fn lambda(fb: &FamilyBlock, t: &Scalar) -> LambdaForm {
    let field = fb.field();
    let shift = Poly::new(field, vec![t.pow(fb.r as u32), field.one()]);
    let mut acc = Poly::zero(field);
    for lp in 0..fb.m {
        acc = acc.add(&shift.pow(lp).scale(&fb.c[fb.r * lp]));
    }
    let r = fb.r as i64;
    LambdaForm {
        numerator: acc.scale(&field.from_int(r)),
        log_coeff: field.from_q(Q::new(BigInt::from(r * (r - 1) / 2), BigInt::from(r))),
    }
}

impl LambdaForm {
    /// At `t = h = 0` as a rank-one exponent with pole order `m`.
    pub fn to_exponent(&self, m: usize) -> Result<Exponent> {
        let mut c: Vec<Scalar> = (0..m).map(|i| self.numerator.coeff(i)).collect();
        c[m - 1] = &c[m - 1] + &self.log_coeff;
        Exponent::new(1, m, c)
    }
}

/// Outcome of the genericity test at one sample point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaggerVerdict {
    pub pass: bool,
    /// First `(q, k, k')` where the sum vanishes.
    pub violation: Option<(usize, usize, usize)>,
    /// `b_q` with `b_q^r = t^r + h kappa_q`.
    pub roots: Vec<Scalar>,
}

fn roots_b(fb: &FamilyBlock, t: &Scalar, h: &Scalar) -> Result<Vec<Scalar>> {
    let tr = t.pow(fb.r as u32);
    fb.kappa
        .iter()
        .map(|kq| {
            let target = &tr + &(h * kq);
            target.nth_root(fb.r as u32).ok_or(Error::RootNotInField { n: fb.r as u32 })
        })
        .collect()
}

/// `sum_{l >= 1} c_l (zeta^{lk} - zeta^{lk'}) b_q^{l-1} != 0` for every
/// `q` and `k < k'`.
pub fn check_dagger(fb: &FamilyBlock, t: &Scalar, h: &Scalar) -> Result<DaggerVerdict> {
    check_point(fb, t, h)?;
    let roots = roots_b(fb, t, h)?;
    let z = fb.zeta();
    for (q, b) in roots.iter().enumerate() {
        for k in 0..fb.r {
            for kp in k + 1..fb.r {
                let mut s = fb.field().zero();
                let mut bp = fb.field().one();
                for l in 1..fb.c.len() {
                    let d = &z.pow((l * k) as u32) - &z.pow((l * kp) as u32);
                    s = &s + &(&(&fb.c[l] * &d) * &bp);
                    bp = &bp * b;
                }
                if s.is_zero() {
                    return Ok(DaggerVerdict { pass: false, violation: Some((q, k, kp)), roots });
                }
            }
        }
    }
    Ok(DaggerVerdict { pass: true, violation: None, roots })
}

fn check_point(fb: &FamilyBlock, t: &Scalar, h: &Scalar) -> Result<()> {
    if t.field() != fb.field() || h.field() != fb.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// Residue structure at one point `a_q` of a regular singular fibre.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidueKind {
    /// `q = 0`: the residues of `nu~_k mod (W - zeta^k t)`.
    Parabolic { eigenvalues: Vec<Scalar> },
    /// `q != 0`, `b_q != 0`: eigenvalues of `nu~_0 mod (W - zeta^k b_q)`.
    Semisimple { eigenvalues: Vec<Scalar>, distinct: bool },
    /// `q != 0`, `b_q = 0`: multiplication by `sum c_l W^l` on
    /// `K[W]/(W^r)`, one eigenvalue `beta`.
    Nilpotent { beta: Scalar, minimal_polynomial: Poly, full_degree: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduePoint {
    pub q: usize,
    pub position: Scalar,
    pub b: Scalar,
    pub kind: ResidueKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fiber {
    Ramified { chain: Vec<Exponent> },
    Unramified { leading: Vec<Scalar>, distinct: bool },
    RegularSingular { points: Vec<ResiduePoint> },
}

impl Fiber {
    pub fn label(&self) -> &'static str {
        match self {
            Fiber::Ramified { .. } => "ramified",
            Fiber::Unramified { .. } => "unramified",
            Fiber::RegularSingular { .. } => "regular_singular",
        }
    }
}

fn pairwise_distinct(v: &[Scalar]) -> bool {
    (0..v.len()).all(|i| (0..i).all(|j| v[i] != v[j]))
}

/// Classifies the fibre over `(t, h)` and computes its local invariants.
pub fn specialize(fb: &FamilyBlock, t: &Scalar, h: &Scalar) -> Result<Fiber> {
    check_point(fb, t, h)?;
    let field = fb.field();
    let z = fb.zeta();
    let eval = |x: &Scalar| -> Scalar {
        let mut s = field.zero();
        let mut p = field.one();
        for c in &fb.c {
            s = &s + &(c * &p);
            p = &p * x;
        }
        s
    };
    if h.is_zero() && t.is_zero() {
        let chain = (0..fb.r).map(|k| build_family_exponent(fb, k)?.at_origin()).collect::<Result<_>>()?;
        return Ok(Fiber::Ramified { chain });
    }
    if h.is_zero() {
        let leading: Vec<Scalar> = (0..fb.r).map(|k| eval(&(&z.pow(k as u32) * t))).collect();
        let distinct = pairwise_distinct(&leading);
        return Ok(Fiber::Unramified { leading, distinct });
    }
    let roots = roots_b(fb, t, h)?;
    let pos: Vec<Scalar> = fb.kappa.iter().map(|kq| h * kq).collect();
    let mut points = Vec::with_capacity(fb.m);
    for q in 0..fb.m {
        // Residue of dz / prod z_q' at a_q.
        let mut p = field.one();
        for (qp, a) in pos.iter().enumerate() {
            if qp != q {
                p = &p * &(&pos[q] - a);
            }
        }
        let scale = p.inv()?;
        let kind = if q == 0 {
            let eigenvalues = (0..fb.r)
                .map(|k| {
                    let lc = field.from_q(Q::new(BigInt::from(k), BigInt::from(fb.r)));
                    &(&eval(&(&z.pow(k as u32) * t)) * &scale) + &lc
                })
                .collect();
            ResidueKind::Parabolic { eigenvalues }
        } else if !roots[q].is_zero() {
            let eigenvalues: Vec<Scalar> = (0..fb.r).map(|k| &eval(&(&z.pow(k as u32) * &roots[q])) * &scale).collect();
            let distinct = pairwise_distinct(&eigenvalues);
            ResidueKind::Semisimple { eigenvalues, distinct }
        } else {
            let mat = nilpotent_residue(fb, &scale);
            let beta = &fb.c[0] * &scale;
            let minimal_polynomial = minimal_polynomial(&mat, field);
            let full_degree = minimal_polynomial == Poly::linear_root(&beta).pow(fb.r);
            ResidueKind::Nilpotent { beta, minimal_polynomial, full_degree }
        };
        points.push(ResiduePoint { q, position: pos[q].clone(), b: roots[q].clone(), kind });
    }
    Ok(Fiber::RegularSingular { points })
}

/// Matrix of `s * sum_l c_l W^l` on `K[W]/(W^r)` in the basis `W^j`.
fn nilpotent_residue(fb: &FamilyBlock, s: &Scalar) -> Vec<Vec<Scalar>> {
    let r = fb.r;
    let mut mat = vec![vec![fb.field().zero(); r]; r];
    for j in 0..r {
        for (l, c) in fb.c.iter().enumerate().take(r) {
            if j + l < r {
                mat[j + l][j] = c * s;
            }
        }
    }
    mat
}

/// Minimal polynomial from the first linear dependence among
/// `I, M, M^2, ...`, monic.
pub fn minimal_polynomial(mat: &[Vec<Scalar>], field: &Field) -> Poly {
    let n = mat.len();
    let flat = |x: &Vec<Vec<Scalar>>| -> Vec<Scalar> { x.iter().flatten().cloned().collect() };
    let mut powers = vec![(0..n).map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect::<Vec<Vec<Scalar>>>()];
    loop {
        let next = linalg::matmul(powers.last().expect("nonempty"), mat);
        let d = powers.len();
        // Columns are vec(M^i), i < d; solve for vec(M^d).
        let target = flat(&next);
        let cols: Vec<Vec<Scalar>> = powers.iter().map(flat).collect();
        let rows: Vec<Vec<Scalar>> = (0..n * n).map(|e| cols.iter().map(|c| c[e].clone()).collect()).collect();
        if let Some((x, _)) = linalg::solve(&rows, &target, d, &field.zero()) {
            let mut coeffs: Vec<Scalar> = x.iter().map(|v| -v).collect();
            coeffs.push(field.one());
            return Poly::new(field, coeffs);
        }
        powers.push(next);
    }
}

/// Twelve fixed sample points for the `r = 2`, `m = 2` block with
/// `c = (1, 2, -1)`, `kappa = (0, -1)` over `Q(i)`: one ramified point, four
/// unramified, seven regular singular (two of them with `b_1 = 0`).
pub fn standard_grid() -> (FamilyBlock, Vec<(Scalar, Scalar)>) {
    let f = Field::cyclotomic(4);
    let i = f.zeta();
    let n = |x: i64| f.from_int(x);
    let fb = FamilyBlock::new(2, 2, vec![n(1), n(2), n(-1)], vec![n(0), n(-1)]).expect("valid block");
    let pts = vec![
        (n(0), n(0)),
        (n(1), n(0)),
        (n(2), n(0)),
        (n(-1), n(0)),
        (i.clone(), n(0)),
        (n(0), n(-1)),
        (n(0), n(1)),
        (n(1), n(1)),
        (n(2), n(4)),
        (n(2), n(3)),
        (n(3), n(5)),
        (n(1), n(-3)),
    ];
    (fb, pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::global::{det_exponents, ExponentSet, PoleExponents};

    fn q2() -> Field {
        Field::rationals()
    }

    #[test]
    fn origin_is_the_exponent_chain() {
        let f = Field::cyclotomic(3);
        let c: Vec<Scalar> = [2, 1, -1, 3].iter().map(|&x| f.from_int(x)).collect();
        let fb = FamilyBlock::new(3, 2, c.clone(), vec![f.zero(), f.one()]).unwrap();
        let base = Exponent::new(3, 2, c).unwrap();
        for k in 0..3 {
            let e = build_family_exponent(&fb, k).unwrap();
            assert_eq!(e.at_origin().unwrap(), base.shift_dlog(k as i64));
        }
        let e0 = build_family_exponent(&fb, 0).unwrap();
        let e1 = build_family_exponent(&fb, 1).unwrap();
        assert_eq!(e0.numerator, e1.numerator);
        assert_eq!(&e1.log_coeff - &e0.log_coeff, f.rat(1, 3));
    }

    #[test]
    fn hand_expansion_r2_m2() {
        // c0 + c1 W + c2 W^2 with W^2 = t^2 + z: (c0 + c2 t^2 + c2 z) + c1 W.
        let f = q2();
        let fb = FamilyBlock::new(2, 2, vec![f.from_int(5), f.from_int(7), f.from_int(11)], vec![f.zero(), f.from_int(3)]).unwrap();
        let e = build_family_exponent(&fb, 1).unwrap();
        let red = e.reduced_numerator();
        let w0 = Bivariate::from([((0, 0), f.from_int(5)), ((2, 0), f.from_int(11)), ((0, 1), f.from_int(11))]);
        assert_eq!(red, vec![w0, Bivariate::from([((0, 0), f.from_int(7))])]);
        // z (z - 3h).
        assert_eq!(e.denominator(), Bivariate::from([((2, 0), f.one()), ((1, 1), f.from_int(-3))]));
        assert_eq!(e.log_coeff, f.rat(1, 2));
    }

    #[test]
    fn dagger_at_origin_tracks_c1() {
        let f = Field::cyclotomic(3);
        let mk = |c1: i64| FamilyBlock::new(3, 2, [1, c1, 2, 1].iter().map(|&x| f.from_int(x)).collect(), vec![f.zero(), f.one()]).unwrap();
        assert!(check_dagger(&mk(1), &f.zero(), &f.zero()).unwrap().pass);
        let v = check_dagger(&mk(0), &f.zero(), &f.zero()).unwrap();
        assert!(!v.pass);
        assert_eq!(v.violation, Some((0, 0, 1)));
    }

    #[test]
    fn unramified_leading_coefficients_r2() {
        let f = q2();
        let (c0, c1, c2) = (f.from_int(3), f.from_int(-2), f.from_int(5));
        let fb = FamilyBlock::new(2, 2, vec![c0.clone(), c1.clone(), c2.clone()], vec![f.zero(), f.one()]).unwrap();
        match specialize(&fb, &f.one(), &f.zero()).unwrap() {
            Fiber::Unramified { leading, distinct } => {
                assert_eq!(leading, vec![&(&c0 + &c1) + &c2, &(&c0 - &c1) + &c2]);
                assert!(distinct);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn collision_parameters_must_differ() {
        let f = q2();
        let err = FamilyBlock::new(2, 3, vec![f.one(); 5], vec![f.zero(), f.one(), f.one()]).unwrap_err();
        assert!(matches!(err, Error::DegenerateParameters(_)));
    }

    #[test]
    fn nilpotent_point_has_full_minimal_polynomial() {
        // r = 3 over Q(zeta_3), kappa_1 = -1: b_1 = 0 at t = h = 1.
        let f = Field::cyclotomic(3);
        let fb = FamilyBlock::new(3, 2, [4, 1, 2, 1].iter().map(|&x| f.from_int(x)).collect(), vec![f.zero(), f.from_int(-1)]).unwrap();
        let Fiber::RegularSingular { points } = specialize(&fb, &f.one(), &f.one()).unwrap() else { panic!() };
        match &points[1].kind {
            ResidueKind::Nilpotent { beta, minimal_polynomial, full_degree } => {
                // Residue of dz/(z (z + 1)) at z = -1 is -1.
                assert_eq!(*beta, f.from_int(-4));
                assert_eq!(minimal_polynomial.degree(), Some(3));
                assert!(full_degree);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lambda_matches_determinant_at_origin() {
        let f = Field::cyclotomic(3);
        let c: Vec<Scalar> = [2, 1, -1, 3, 5, 7, 1].iter().map(|&x| f.from_int(x)).collect();
        let fb = FamilyBlock::new(3, 3, c.clone(), vec![f.zero(), f.one(), f.from_int(2)]).unwrap();
        let nu = Exponent::new(3, 3, c).unwrap();
        let set = ExponentSet { a: 0, poles: vec![PoleExponents { m: 3, blocks: vec![(0..3).map(|k| nu.shift_dlog(k)).collect()] }] };
        let det = det_exponents(&set).unwrap();
        assert_eq!(lambda(&fb, &f.zero()).to_exponent(3).unwrap(), det.poles[0].blocks[0][0]);
    }

    #[test]
    fn standard_grid_trichotomy() {
        let (fb, pts) = standard_grid();
        let labels: Vec<&str> = pts.iter().map(|(t, h)| specialize(&fb, t, h).unwrap().label()).collect();
        assert_eq!(labels.iter().filter(|l| **l == "ramified").count(), 1);
        assert_eq!(labels.iter().filter(|l| **l == "unramified").count(), 4);
        assert_eq!(labels.iter().filter(|l| **l == "regular_singular").count(), 7);
    }
}
