//! Formal irreducibility: the generic ramified criterion for any rank, and
//! an exhaustive invariant-line search for rank 2.

use super::{recover_exponent, Exponent, FormalConnection};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalars::Scalar;
use crate::series::TruncSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    /// Generic ramified: a single totally ramified orbit with `c1 != 0`.
    Irreducible { exponent: Exponent },
    /// Rank 2 only: no invariant line exists, proved order by order.
    NoInvariantLine,
    /// An invariant line, as a column vector modulo `z^M`.
    Reducible { line: Vec<TruncSeries> },
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        !matches!(self, Irreducibility::Reducible { .. })
    }
}

pub fn is_formally_irreducible(conn: &FormalConnection) -> Result<Irreducibility> {
    match recover_exponent(conn) {
        Ok(exponent) => return Ok(Irreducibility::Irreducible { exponent }),
        Err(e) if conn.rank == 1 => return Err(e),
        Err(_) => {}
    }
    if conn.rank != 2 {
        return Err(Error::Inconclusive(format!("rank {} outside the generic criterion", conn.rank)));
    }
    rank_two_search(conn)
}

enum Branch {
    Found(TruncSeries),
    Contradiction,
    Free,
}

/// Searches for invariant lines spanned by `(1, y)` and `(x, 1)` with
/// `x(0) = 0`, solving the Riccati equation order by order in `z`.
fn rank_two_search(conn: &FormalConnection) -> Result<Irreducibility> {
    let a = &conn.a;
    let field = conn.field().clone();
    let mm = conn.big_m;
    let one = TruncSeries::one(&field, 1, mm);
    // Chart (1, y): a01 y^2 + (a00 - a11) y - a10 - z^m y' = 0.
    // Chart (x, 1): a10 x^2 + (a11 - a00) x - a01 - z^m x' = 0 with x(0) = 0.
    let charts = [
        (a[0][1].clone(), a[0][0].sub(&a[1][1]), a[1][0].clone(), false),
        (a[1][0].clone(), a[1][1].sub(&a[0][0]), a[0][1].clone(), true),
    ];
    let mut undecided = false;
    for (quad, lin, cst, second) in charts {
        let starts: Vec<Scalar> = if second {
            if cst.coeff(0).is_zero() {
                vec![field.zero()]
            } else {
                Vec::new()
            }
        } else {
            let p = Poly::new(&field, vec![-cst.coeff(0), lin.coeff(0), quad.coeff(0)]);
            match p.degree() {
                None => {
                    undecided = true;
                    Vec::new()
                }
                Some(0) => Vec::new(),
                _ => match p.roots() {
                    Ok(r) => r.into_iter().map(|x| x.0).collect(),
                    Err(_) => {
                        undecided = true;
                        Vec::new()
                    }
                },
            }
        };
        for y0 in starts {
            match riccati(&quad, &lin, &cst, &y0, conn.m, mm) {
                Branch::Found(y) => {
                    let line = if second { vec![y, one.clone()] } else { vec![one.clone(), y] };
                    return Ok(Irreducibility::Reducible { line });
                }
                Branch::Free => undecided = true,
                Branch::Contradiction => {}
            }
        }
    }
    if undecided {
        Err(Error::Inconclusive("invariant-line search hit a free parameter or an eigenvalue outside the field".into()))
    } else {
        Ok(Irreducibility::NoInvariantLine)
    }
}

fn riccati(quad: &TruncSeries, lin: &TruncSeries, cst: &TruncSeries, y0: &Scalar, m: usize, mm: usize) -> Branch {
    let field = y0.field().clone();
    let mut y = TruncSeries::constant(y0, 1, mm);
    // Linear coefficient of y_k at order k: 2 q0 y0 + l0 (+ k when m = 1).
    let base = &(&quad.coeff(0) * y0).scale(&crate::scalars::q(2, 1)) + &lin.coeff(0);
    let residual = |y: &TruncSeries| -> TruncSeries {
        let yp = y.derivative().shift(m);
        quad.mul(y).mul(y).add(&lin.mul(y)).sub(cst).sub(&yp)
    };
    for k in 1..mm {
        let res = residual(&y).coeff(k);
        let l = if m == 1 { &base - &field.from_int(k as i64) } else { base.clone() };
        if l.is_zero() {
            if res.is_zero() {
                return Branch::Free;
            }
            return Branch::Contradiction;
        }
        y.set_coeff(k, -(res.div(&l).expect("nonzero")));
    }
    Branch::Found(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::pushforward_ramified;
    use crate::scalars::Field;
    use crate::smat;

    #[test]
    fn diagonal_sum_is_reducible() {
        let f = Field::rationals();
        let mut a = smat::zero(&f, 2, 1, 4);
        a[0][0] = TruncSeries::new(1, vec![f.from_int(1), f.from_int(2), f.zero(), f.zero()]);
        a[1][1] = TruncSeries::new(1, vec![f.from_int(3), f.zero(), f.from_int(1), f.zero()]);
        let conn = FormalConnection::new(2, 4, a).unwrap();
        let v = is_formally_irreducible(&conn).unwrap();
        assert!(!v.is_irreducible());
    }

    #[test]
    fn pushforward_is_irreducible() {
        let f = Field::cyclotomic(2);
        let nu = Exponent::new(2, 2, vec![f.from_int(1), f.from_int(1), f.from_int(0)]).unwrap();
        let conn = pushforward_ramified(&nu, 2);
        assert!(matches!(is_formally_irreducible(&conn).unwrap(), Irreducibility::Irreducible { .. }));
    }
}
