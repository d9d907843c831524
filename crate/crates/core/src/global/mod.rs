//! Connections on P¹ with parabolic structure: exponent sets and the Fuchs
//! relation, global connections in two charts, stability, the determinant
//! and the dimension count.

mod connection;
mod stability;

pub use connection::{det_connection, GlobalConnection, Pole, PoleSpec, Position};
#[cfg(test)]
pub(crate) use connection::tests as connection_tests;
pub use stability::{is_stable, parabolic_degree, SlopeWitness, StabilityVerdict, Subbundle};

use crate::error::{Error, Result};
use crate::formal::Exponent;
use crate::localdata::{CheckResult, Status, VerifyReport};
use crate::scalars::{Field, Scalar, Q};
use num_bigint::BigInt;

/// Exponents at one pole: `blocks[j][k] = nu_{j,k}`, block size `r_j` is
/// `blocks[j].len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleExponents {
    pub m: usize,
    pub blocks: Vec<Vec<Exponent>>,
}

impl PoleExponents {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

/// Candidate member of the exponent set for degree `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentSet {
    pub a: i64,
    pub poles: Vec<PoleExponents>,
}

impl ExponentSet {
    pub fn field(&self) -> Option<&Field> {
        self.poles.iter().flat_map(|p| p.blocks.iter().flatten()).next().map(Exponent::field)
    }

    /// `a + sum_{i,j,k} res(nu_{i,j,k}) / r_j`, with `res` the `dw/w`
    /// coefficient.
    pub fn fuchs_sum(&self, field: &Field) -> Scalar {
        let mut s = field.from_int(self.a);
        for pole in &self.poles {
            for block in &pole.blocks {
                let inv = Q::new(BigInt::from(1), BigInt::from(block.len()));
                for nu in block {
                    s = &s + &nu.residue().scale(&inv);
                }
            }
        }
        s
    }
}

fn check(name: &str, witness: Option<String>) -> CheckResult {
    let status = if witness.is_none() { Status::Pass } else { Status::Fail };
    CheckResult { check_name: name.to_string(), pass: witness.is_none(), status, witness }
}

/// Checks block shapes, the `dw/w` chain inside every block and the Fuchs
/// relation, naming the first violation of each.
pub fn validate_exponent_set(set: &ExponentSet) -> VerifyReport {
    let field = set.field().cloned();
    let mut shape = None;
    let rank: Option<usize> = set.poles.first().map(|p| p.block_sizes().iter().sum());
    'outer: for (i, pole) in set.poles.iter().enumerate() {
        if pole.blocks.iter().any(Vec::is_empty) {
            shape = Some(format!("pole {i} has an empty block"));
            break;
        }
        if Some(pole.block_sizes().iter().sum()) != rank {
            shape = Some(format!("block sizes at pole {i} do not sum to the rank"));
            break;
        }
        for (j, block) in pole.blocks.iter().enumerate() {
            for (k, nu) in block.iter().enumerate() {
                if nu.r != block.len() || nu.m != pole.m {
                    shape = Some(format!("nu[{i}][{j}][{k}] has r={}, m={}, expected r={}, m={}", nu.r, nu.m, block.len(), pole.m));
                    break 'outer;
                }
                if Some(nu.field()) != field.as_ref() {
                    shape = Some(format!("nu[{i}][{j}][{k}] lives in another field"));
                    break 'outer;
                }
            }
        }
    }
    let mut checks = vec![check("shapes", shape.clone())];
    if shape.is_some() {
        for name in ["exponent_chain", "fuchs"] {
            checks.push(CheckResult {
                check_name: name.into(),
                pass: false,
                status: Status::Skipped,
                witness: Some("prerequisite shapes did not pass".into()),
            });
        }
        return VerifyReport { checks };
    }
    let mut chain = None;
    'chain: for (i, pole) in set.poles.iter().enumerate() {
        for (j, block) in pole.blocks.iter().enumerate() {
            for k in 1..block.len() {
                if block[k] != block[k - 1].shift_dlog(1) {
                    chain = Some(format!("nu[{i}][{j}][{k}] - nu[{i}][{j}][{}] is not dw/w", k - 1));
                    break 'chain;
                }
            }
        }
    }
    checks.push(check("exponent_chain", chain));
    let fuchs = match &field {
        Some(f) => {
            let s = set.fuchs_sum(f);
            (!s.is_zero()).then(|| format!("a + sum res/r_j = {s}"))
        }
        None => (set.a != 0).then(|| format!("no poles and a = {}", set.a)),
    };
    checks.push(check("fuchs", fuchs));
    VerifyReport { checks }
}

/// Image under the determinant: degree `a` and at each pole the rank-one
/// exponent `sum_{j,k} Tr(nu_{j,k}) / r_j`.
pub fn det_exponents(set: &ExponentSet) -> Result<ExponentSet> {
    let field = set.field().ok_or_else(|| Error::Invalid("exponent set has no exponents".into()))?.clone();
    let mut poles = Vec::with_capacity(set.poles.len());
    for pole in &set.poles {
        let mut c = vec![field.zero(); pole.m];
        for block in &pole.blocks {
            let inv = Q::new(BigInt::from(1), BigInt::from(block.len()));
            for nu in block {
                let tr = nu.trace();
                for (l, cl) in c.iter_mut().enumerate() {
                    *cl = &*cl + &tr.numerator.coeff(l).scale(&inv);
                }
            }
        }
        poles.push(PoleExponents { m: pole.m, blocks: vec![vec![Exponent::new(1, pole.m, c)?]] });
    }
    Ok(ExponentSet { a: set.a, poles })
}

/// `2 r^2 (g-1) + 2 + sum_i (r^2 - r) m_i`.
pub fn dimension(g: i64, r: i64, ms: &[i64]) -> i64 {
    2 * r * r * (g - 1) + 2 + ms.iter().map(|m| (r * r - r) * m).sum::<i64>()
}

/// Euler characteristics of the two terms of the deformation complex and
/// the resulting `dim H^1 = chi(F^1) - chi(F^0) + 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct EulerChars {
    pub chi_f0: i64,
    pub chi_f1: i64,
    pub dim_h1: i64,
}

/// Evaluates the two Euler characteristics term by term. `blocks[i]` lists
/// the block sizes at pole `i`; they must sum to `r`. For `F^0` the
/// simplified closed form is used (see the crate README on the variant).
pub fn euler_chars(g: i64, r: i64, ms: &[i64], blocks: &[Vec<i64>]) -> Result<EulerChars> {
    if ms.len() != blocks.len() {
        return Err(Error::Invalid("one block list per pole is required".into()));
    }
    if r < 1 || ms.iter().any(|&m| m < 1) {
        return Err(Error::Invalid("need r >= 1 and every m_i >= 1".into()));
    }
    if blocks.iter().any(|b| b.iter().sum::<i64>() != r || b.iter().any(|&x| x < 1)) {
        return Err(Error::Invalid("block sizes at each pole must be positive and sum to r".into()));
    }
    let tail = |b: &[i64]| -> i64 { b.iter().map(|&rj| (0..rj).map(|k| rj - 1 - k).sum::<i64>()).sum() };
    let mut chi1 = r * r * (1 - g) + r * r * (2 * g - 2);
    let mut chi0 = r * r * (1 - g);
    for (&m, b) in ms.iter().zip(blocks) {
        for (j, &rj) in b.iter().enumerate() {
            for &rjp in &b[..j] {
                chi1 += m * rjp * rj;
            }
            for &rjp in &b[..=j] {
                chi0 -= m * rjp * rj;
            }
            chi0 += m * rj;
        }
        chi1 += tail(b);
        chi0 += tail(b);
    }
    Ok(EulerChars { chi_f0: chi0, chi_f1: chi1, dim_h1: chi1 - chi0 + 2 })
}

/// The intermediate line of the `chi(F^0)` evaluation, which keeps a `+1`
/// per block; it differs from the closed form by the number of blocks.
pub fn chi_f0_unsimplified(g: i64, r: i64, ms: &[i64], blocks: &[Vec<i64>]) -> i64 {
    let mut chi0 = r * r * (1 - g);
    for (&m, b) in ms.iter().zip(blocks) {
        for (j, &rj) in b.iter().enumerate() {
            for &rjp in &b[..=j] {
                chi0 -= m * rjp * rj;
            }
            chi0 += m * rj - rj + 1 + rj + (0..rj).map(|k| rj - 1 - k).sum::<i64>();
        }
    }
    chi0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_values() {
        assert_eq!(dimension(0, 2, &[4]), 2);
        assert_eq!(dimension(1, 2, &[1]), 4);
        assert_eq!(dimension(0, 1, &[3, 2]), 0);
    }

    #[test]
    fn euler_single_ramified_block() {
        let e = euler_chars(0, 2, &[4], &[vec![2]]).unwrap();
        assert_eq!((e.chi_f1, e.chi_f0, e.dim_h1), (-3, -3, 2));
        assert_eq!(chi_f0_unsimplified(0, 2, &[4], &[vec![2]]), -2);
    }

    #[test]
    fn rank_one_gives_2g() {
        for g in 0..4 {
            assert_eq!(euler_chars(g, 1, &[2, 3], &[vec![1], vec![1]]).unwrap().dim_h1, 2 * g);
        }
    }

    fn rank_one_set(a: i64, res: &[i64]) -> ExponentSet {
        let f = Field::rationals();
        let poles = res
            .iter()
            .map(|&x| PoleExponents { m: 1, blocks: vec![vec![Exponent::new(1, 1, vec![f.from_int(x)]).unwrap()]] })
            .collect();
        ExponentSet { a, poles }
    }

    #[test]
    fn classical_fuchs() {
        assert!(validate_exponent_set(&rank_one_set(0, &[3, -3])).all_pass());
        assert_eq!(validate_exponent_set(&rank_one_set(1, &[3, -3])).failed(), vec!["fuchs"]);
    }

    #[test]
    fn rank_two_fuchs_literal() {
        // r = 2 block: residues 1/2 and 3/2 (c_{N-1} = 1/4), sum/2 = 1.
        let f = Field::rationals();
        let nu = Exponent::new(2, 1, vec![f.rat(1, 4)]).unwrap();
        let set = ExponentSet { a: -1, poles: vec![PoleExponents { m: 1, blocks: vec![vec![nu.clone(), nu.shift_dlog(1)]] }] };
        assert!(validate_exponent_set(&set).all_pass());
        let broken = ExponentSet { a: -1, poles: vec![PoleExponents { m: 1, blocks: vec![vec![nu.clone(), nu]] }] };
        assert_eq!(validate_exponent_set(&broken).failed(), vec!["exponent_chain", "fuchs"]);
    }
}
