//! Root extraction and the Kummer irreducibility test.
//!
//! Candidate `n`-th roots are generated numerically: an element is fixed by
//! its images under all complex embeddings, so choosing one `n`-th root of
//! `sigma(x)` per embedding and inverting the embedding matrix gives
//! approximate coordinates. Rational reconstruction turns those into exact
//! candidates and every candidate is verified exactly before it is returned.
//! Floats only ever propose; they never decide.

use super::{Field, Scalar, Q};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;

/// Complex images of the power basis under every embedding of the tower.
/// Row `j` lists `sigma_j(basis_b)` for all basis indices `b`.
pub fn embeddings(f: &Field) -> Vec<Vec<Complex64>> {
    let l = f.0.l;
    let d0 = f.base_degree();
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for k in 1..=l.max(1) {
        if l > 1 && k.gcd(&l) != 1 {
            continue;
        }
        if l == 1 && k > 1 {
            break;
        }
        let z = if l <= 2 {
            Complex64::new(if l == 2 { -1.0 } else { 1.0 }, 0.0)
        } else {
            Complex64::from_polar(1.0, 2.0 * PI * k as f64 / l as f64)
        };
        let imgs: Vec<Complex64> = if d0 == 1 { vec![Complex64::new(1.0, 0.0)] } else { (0..d0).map(|i| z.powu(i as u32)).collect() };
        rows.push(imgs);
        if l == 2 {
            break;
        }
    }
    for rad in &f.0.radicals {
        let mut next = Vec::new();
        for imgs in &rows {
            let u: Complex64 = rad.u.iter().zip(imgs).map(|(c, b)| b * c.to_f64().unwrap_or(f64::NAN)).sum();
            let (rho, theta) = u.to_polar();
            for j in 0..rad.e {
                let beta = Complex64::from_polar(rho.powf(1.0 / rad.e as f64), (theta + 2.0 * PI * j as f64) / rad.e as f64);
                let mut row = Vec::with_capacity(imgs.len() * rad.e);
                for p in 0..rad.e {
                    let bp = beta.powu(p as u32);
                    row.extend(imgs.iter().map(|b| b * bp));
                }
                next.push(row);
            }
        }
        rows = next;
    }
    rows
}

/// Basis images under the principal embedding.
pub(super) fn principal_basis_images(f: &Field) -> Vec<Complex64> {
    embeddings(f).into_iter().next().unwrap()
}

fn eval(row: &[Complex64], x: &Scalar) -> Complex64 {
    x.c.iter().zip(row).filter(|(c, _)| !c.is_zero()).map(|(c, b)| b * c.to_f64().unwrap_or(f64::NAN)).sum()
}

/// Gaussian elimination with partial pivoting; returns `A^{-1}`.
fn complex_inverse(a: &[Vec<Complex64>]) -> Option<Vec<Vec<Complex64>>> {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap())?;
        if m[p][col].norm() < 1e-12 {
            return None;
        }
        m.swap(col, p);
        let inv = Complex64::new(1.0, 0.0) / m[col][col];
        for v in m[col].iter_mut() {
            *v *= inv;
        }
        let pr = m[col].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i != col {
                let f = r[col];
                if f.norm() > 0.0 {
                    for (x, y) in r.iter_mut().zip(&pr) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Best rational approximation with denominator at most `max_den`.
fn rational_approx(x: f64, max_den: i64) -> Option<Q> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-12 || ((h1 as f64) / (k1 as f64) - x).abs() < 1e-12 * x.abs().max(1.0) {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(Q::new(BigInt::from(h1), BigInt::from(k1)))
}

fn rational_nth_roots(r: &Q, n: u32) -> Vec<Q> {
    if r.is_zero() {
        return vec![Q::zero()];
    }
    let neg = r.is_negative();
    if neg && n.is_multiple_of(2) {
        return vec![];
    }
    let num = r.numer().abs();
    let den = r.denom().clone();
    let a = num.nth_root(n);
    let b = den.nth_root(n);
    if num_traits::pow::pow(a.clone(), n as usize) != num || num_traits::pow::pow(b.clone(), n as usize) != den {
        return vec![];
    }
    let root = Q::new(a, b);
    if neg {
        vec![-root]
    } else if n.is_multiple_of(2) {
        vec![root.clone(), -root]
    } else {
        vec![root]
    }
}

/// All `n`-th roots of `x` in its field, ordered by the argument of their
/// principal embedding (then by coordinates).
pub(super) fn nth_roots(x: &Scalar, n: u32) -> Vec<Scalar> {
    let f = x.field().clone();
    if x.is_zero() || n == 0 {
        return if x.is_zero() { vec![f.zero()] } else { vec![] };
    }
    if n == 1 {
        return vec![x.clone()];
    }
    let mut found: Vec<Scalar> = Vec::new();
    let push = |y: Scalar, found: &mut Vec<Scalar>| {
        if !found.contains(&y) {
            found.push(y);
        }
    };
    if let Some(r) = x.as_rational() {
        for root in rational_nth_roots(&r, n) {
            push(f.from_q(root), &mut found);
        }
    }
    let emb = embeddings(&f);
    let d = f.degree();
    if let Some(inv) = complex_inverse(&emb) {
        // Pair embeddings with their complex conjugates; real coordinates
        // force conjugate choices, which prunes the search.
        let probe: Vec<Complex64> = emb.iter().map(|row| row.iter().enumerate().map(|(i, b)| b * (1.0 + i as f64 * 0.37)).sum()).collect();
        let mut partner = vec![usize::MAX; d];
        for i in 0..d {
            for j in 0..d {
                if (probe[i].conj() - probe[j]).norm() < 1e-7 * (1.0 + probe[i].norm()) {
                    partner[i] = j;
                    break;
                }
            }
        }
        let values: Vec<Complex64> = emb.iter().map(|row| eval(row, x)).collect();
        let mut free: Vec<usize> = Vec::new();
        for i in 0..d {
            if partner[i] == usize::MAX || partner[i] >= i {
                free.push(i);
            }
        }
        let total = (n as u64).checked_pow(free.len() as u32).unwrap_or(u64::MAX);
        if total <= 1 << 16 {
            for code in 0..total {
                let mut choice = vec![Complex64::new(0.0, 0.0); d];
                let mut c = code;
                for &i in &free {
                    let j = (c % n as u64) as f64;
                    c /= n as u64;
                    let (rho, th) = values[i].to_polar();
                    choice[i] = Complex64::from_polar(rho.powf(1.0 / n as f64), (th + 2.0 * PI * j) / n as f64);
                }
                for i in 0..d {
                    let p = partner[i];
                    if p != usize::MAX && p < i {
                        choice[i] = choice[p].conj();
                    }
                }
                let mut coords = Vec::with_capacity(d);
                let mut ok = true;
                for row in &inv {
                    let v: Complex64 = row.iter().zip(&choice).map(|(a, b)| a * b).sum();
                    if v.im.abs() > 1e-6 * (1.0 + v.re.abs()) {
                        ok = false;
                        break;
                    }
                    match rational_approx(v.re, 1_000_000) {
                        Some(qv) => coords.push(qv),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let y = Scalar::raw(&f, coords);
                if y.pow(n) == *x {
                    push(y, &mut found);
                }
            }
        }
    }
    let principal = principal_basis_images(&f);
    found.sort_by(|a, b| {
        let aa = arg_key(eval(&principal, a));
        let bb = arg_key(eval(&principal, b));
        aa.partial_cmp(&bb).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.cmp_coords(b))
    });
    found
}

fn arg_key(z: Complex64) -> f64 {
    let a = z.arg();
    let a = if a < -1e-12 { a + 2.0 * PI } else { a.max(0.0) };
    (a * 1e9).round() / 1e9
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Kummer criterion: `X^e - u` is irreducible iff `u` is not a `p`-th power
/// for every prime `p | e`, and `u` is not in `-4 K^4` when `4 | e`.
pub fn is_kummer_irreducible(e: u32, u: &Scalar) -> Result<(), String> {
    if u.is_zero() {
        return Err("radicand is zero".into());
    }
    for p in prime_factors(e) {
        if let Some(y) = u.nth_root(p) {
            return Err(format!("radicand is a {p}-th power: ({})^{p}", y.render()));
        }
    }
    if e.is_multiple_of(4) {
        let f = u.field();
        let t = u.scale(&-Q::new(BigInt::one(), BigInt::from(4)));
        if let Some(y) = t.nth_root(4) {
            let _ = f;
            return Err(format!("radicand equals -4*({})^4", y.render()));
        }
    }
    Ok(())
}
