use super::LocalRamifiedData;
use crate::error::Result;
use crate::linalg;
use crate::scalars::Scalar;
use crate::series::TruncSeries;

/// Kernel of `Pi = (varpi_0, sigma^{-1} varpi_0 sigma, ...)` on
/// `V_0 (x) K[w]/(w^N) = (K[w]/(w^N))^r`.
#[derive(Clone, Debug)]
pub struct KernelPi {
    /// Spanning set; each element lists `b_0..b_{r-1}`.
    pub basis: Vec<Vec<TruncSeries>>,
    /// Length as a module, equal to the `K`-dimension.
    pub length: usize,
}

/// `Pi_j(b) = sum_l g_{0,l}(zeta^{-j} w) b_l(w)` modulo `w^N`; the twisted
/// components of `varpi_0` are explicit substitutions.
pub fn kernel_pi(data: &LocalRamifiedData) -> Result<KernelPi> {
    let (r, n) = (data.r, data.n());
    let field = data.field().clone();
    let zeta = field.root_of_unity(r as u64)?;
    let zeta_inv = zeta.pow(r as u32 - 1);
    let nvars = r * n;
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(r * n);
    for j in 0..r {
        let twist = zeta_inv.pow(j as u32);
        let g: Vec<TruncSeries> = (0..r).map(|l| data.pi[0][l].rescale_var(&twist)).collect();
        for s in 0..n {
            let mut row = vec![field.zero(); nvars];
            for (l, gl) in g.iter().enumerate() {
                for t in 0..=s {
                    let c = gl.coeff(s - t);
                    if !c.is_zero() {
                        row[l * n + t] = c;
                    }
                }
            }
            rows.push(row);
        }
    }
    let ns = linalg::nullspace(&rows, nvars, &field.zero());
    let basis = ns
        .iter()
        .map(|v| (0..r).map(|l| TruncSeries::new(r, v[l * n..(l + 1) * n].to_vec())).collect())
        .collect();
    Ok(KernelPi { basis, length: ns.len() })
}
