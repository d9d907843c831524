//! Reconstruction of a connection compatible with given local data, and
//! the normalisation claim for its canonical frame.

use super::build::{eigen_quotient, frame_columns, frame_from_quotient};
use super::{unflatten, LocalRamifiedData};
use crate::error::{Error, Result};
use crate::formal::{recover_exponent, Exponent, FormalConnection};
use crate::linalg;
use crate::scalars::{Field, Scalar};
use crate::series::TruncSeries;
use crate::smat::{self, SMat};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct ReconstructReport {
    /// Nonempty solution set, every sampled solution recovers `mu_0`, and
    /// the claim congruences hold.
    pub verdict: bool,
    /// `K`-dimension of the affine space of compatible connections.
    pub solution_dim: usize,
    pub recovered: Vec<Exponent>,
    pub exponent_match: bool,
    pub claim_holds: bool,
    pub claim_witness: Option<String>,
}

/// Solves for every `B in Mat_r(K[z]/z^m)` that preserves the filtration and
/// satisfies `pi_k nabla = nu_k pi_k`, then checks that sampled solutions
/// have exponent `mu_0 = nu_0` (up to Galois and `Z dw/w`) and that their
/// canonical frames satisfy the normalisation claim.
pub fn reconstruct_check(data: &LocalRamifiedData, rng: &mut ChaCha8Rng, samples: usize) -> Result<ReconstructReport> {
    let (r, m, n) = (data.r, data.m, data.n());
    if r >= 2 && !data.nu[0].generic_c1() {
        return Err(Error::C1Zero);
    }
    let field = data.field().clone();
    let nvars = r * r * m;
    let var = |j: usize, l: usize, i: usize| (j * r + l) * m + i;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    for k in 0..r {
        for l in 0..r {
            for j in 0..r {
                let (el, ej) = (data.filt[k][l], data.filt[k][j]);
                for i in 0..ej.saturating_sub(el).min(m) {
                    let mut row = vec![field.zero(); nvars];
                    row[var(j, l, i)] = field.one();
                    rows.push(row);
                    rhs.push(field.zero());
                }
            }
        }
    }
    for k in 0..r {
        let nuk = data.nu[k].series();
        for l in 0..r {
            let target = nuk.mul(&data.pi[k][l]);
            let mut block = vec![vec![field.zero(); nvars]; n];
            for j in 0..r {
                let (el, ej) = (data.filt[k][l], data.filt[k][j]);
                for i in 0..m {
                    let Some(p) = (i + el).checked_sub(ej) else { continue };
                    let img = data.pi[k][j].shift(r * p);
                    for (s, row) in block.iter_mut().enumerate() {
                        let c = img.coeff(s);
                        if !c.is_zero() {
                            row[var(j, l, i)] = &row[var(j, l, i)] + &c;
                        }
                    }
                }
            }
            for (s, row) in block.into_iter().enumerate() {
                rows.push(row);
                rhs.push(target.coeff(s));
            }
        }
    }
    let (x0, null) = linalg::solve(&rows, &rhs, nvars, &field.zero()).ok_or(Error::EmptySolutionSet)?;
    let to_matrix = |x: &[Scalar]| -> SMat {
        (0..r).map(|j| (0..r).map(|l| TruncSeries::new(1, x[var(j, l, 0)..var(j, l, 0) + m].to_vec())).collect()).collect()
    };
    let mut recovered = Vec::new();
    let mut exponent_match = true;
    let mut claim_witness = None;
    for sample in 0..samples.max(1) {
        let mut x = x0.clone();
        if sample > 0 {
            for v in &null {
                let c = field.from_int(rng.gen_range(-3..=3));
                if !c.is_zero() {
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi = &*xi + &(&c * vi);
                    }
                }
            }
        }
        let b = to_matrix(&x);
        let conn = FormalConnection::new(m, 2 * m + 2, b)?;
        let nu = recover_exponent(&conn)?;
        if !nu.same_orbit(&data.nu[0]) {
            exponent_match = false;
        }
        if claim_witness.is_none() {
            if let Err(w) = claim(data, &conn, &nu) {
                claim_witness = Some(format!("sample {sample}: {w}"));
            }
        }
        recovered.push(nu);
    }
    let claim_holds = claim_witness.is_none();
    Ok(ReconstructReport {
        verdict: exponent_match && claim_holds,
        solution_dim: null.len(),
        recovered,
        exponent_match,
        claim_holds,
        claim_witness,
    })
}

/// For the canonical frame `e_k = (pi|_W)^{-1}(w^k)` of a solution: each
/// `e_k` lies in `V_k`, and with `U_0 = 1/varpi_0(e_0)`,
/// `U_k = U_{k-1} v_k` where `phi_k = w v_k`, one has
/// `U_k varpi_k(e_k) = 1` modulo `w^{N-2}`, i.e. `varpi_k(e_k) = w^k`
/// modulo `w^{mr - r - 1 + k}` in `L_k = (w^k)/(w^{k+N})`.
fn claim(data: &LocalRamifiedData, conn: &FormalConnection, nu: &Exponent) -> std::result::Result<(), String> {
    let (r, m, n) = (data.r, data.m, data.n());
    // The frame is normalised against nu_0 itself, not a Galois conjugate:
    // a conjugate quotient rescales e_k by zeta^{jk}.
    let top = n - 1;
    let aligned = (0..r as i64)
        .filter_map(|j| nu.galois(j).ok())
        .find(|g| g.c[..top] == data.nu[0].c[..top])
        .ok_or_else(|| "recovered exponent is not a conjugate of nu_0".to_string())?;
    let p = eigen_quotient(conn, &aligned).map_err(|e| e.to_string())?;
    let frame = frame_from_quotient(&p, m).map_err(|e| e.to_string())?;
    let cols = frame_columns(&frame, m);
    let mut u = TruncSeries::one(data.field(), r, n);
    for (k, col) in cols.iter().enumerate() {
        let x = unflatten(col, r, m);
        for (l, xl) in x.iter().enumerate() {
            if xl.ord() < data.filt[k][l] {
                return Err(format!("e_{k} is not in V_{k}"));
            }
        }
        let img = data.apply_pi(k, &x).map_err(|e| e.to_string())?;
        if k == 0 {
            u = img.inverse().map_err(|_| "varpi_0(e_0) is not a unit".to_string())?;
        } else {
            let v = data.phi[k - 1].unshift(1).map_err(|e| e.to_string())?;
            u = u.mul(&v);
        }
        let prod = u.mul(&img);
        let one = TruncSeries::one(data.field(), r, n);
        if !prod.eq_mod(&one, n.saturating_sub(2)) {
            return Err(format!("U_{k} varpi_{k}(e_{k}) is not 1 modulo w^{}", n.saturating_sub(2)));
        }
    }
    Ok(())
}

/// Moves valid data to a random equivalent presentation: a gauge `g` that
/// is lower triangular at `z = 0` (so it preserves every `V_k`), followed by
/// random unit changes `u_k` of the generators of the `L_k`.
pub fn gauge_randomize(data: &LocalRamifiedData, rng: &mut ChaCha8Rng) -> Result<LocalRamifiedData> {
    let (r, m, n) = (data.r, data.m, data.n());
    let field = data.field().clone();
    let small = |rng: &mut ChaCha8Rng, f: &Field| f.from_int(rng.gen_range(-2..=2));
    let mut g = smat::zero(&field, r, 1, m);
    for j in 0..r {
        for l in 0..r {
            let mut c = Vec::with_capacity(m);
            for i in 0..m {
                let v = if i == 0 && j < l {
                    field.zero()
                } else if i == 0 && j == l {
                    field.from_int(if rng.gen_bool(0.5) { 1 } else { -2 })
                } else {
                    small(rng, &field)
                };
                c.push(v);
            }
            g[j][l] = TruncSeries::new(1, c);
        }
    }
    let gi = smat::inverse(&g)?;
    let nabla = smat::mul(&smat::mul(&gi, &data.nabla), &g);
    let mut pi = vec![Vec::with_capacity(r); r];
    for (k, row) in pi.iter_mut().enumerate() {
        for l in 0..r {
            let e = data.filt[k][l];
            let x: Vec<TruncSeries> = (0..r).map(|j| g[j][l].resize(m + e).shift(e).resize(m)).collect();
            row.push(data.apply_pi(k, &x)?);
        }
    }
    let units: Vec<TruncSeries> = (0..r)
        .map(|_| {
            let mut c: Vec<Scalar> = (0..n).map(|_| small(rng, &field)).collect();
            c[0] = field.from_int(rng.gen_range(1..=3));
            TruncSeries::new(r, c)
        })
        .collect();
    for (k, row) in pi.iter_mut().enumerate() {
        for s in row.iter_mut() {
            *s = units[k].mul(s);
        }
    }
    let mut phi = Vec::with_capacity(r);
    for k in 1..=r {
        let src = if k < r { k } else { 0 };
        phi.push(units[k - 1].mul(&data.phi[k - 1]).mul(&units[src].inverse()?));
    }
    LocalRamifiedData::new(m, data.nu.clone(), data.filt.clone(), nabla, pi, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn exp(r: usize, m: usize, c: &[i64]) -> Exponent {
        let f = Field::cyclotomic(r as u64);
        Exponent::new(r, m, c.iter().map(|&x| f.from_int(x)).collect()).unwrap()
    }

    #[test]
    fn canonical_and_gauged_data_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for nu in [exp(2, 2, &[1, 2, 3]), exp(3, 2, &[0, 1, 1, 2]), exp(2, 3, &[1, 1, 0, 2, 5])] {
            let d = LocalRamifiedData::canonical(&nu);
            let rep = reconstruct_check(&d, &mut rng, 3).unwrap();
            assert!(rep.verdict, "{:?}", rep.claim_witness);
            let g = gauge_randomize(&d, &mut rng).unwrap();
            assert!(g.verify().all_pass(), "{:?}", g.verify().failed());
            let rep = reconstruct_check(&g, &mut rng, 3).unwrap();
            assert!(rep.verdict, "{:?}", rep.claim_witness);
        }
    }
}
