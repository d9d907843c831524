//! Pointwise conditions cutting `F^0` and `F^1` out of `End(E)` and
//! `End(E) (x) Omega^1(D)` at a pole, as linear functionals on the local
//! matrix in the adapted frame modulo `x^m`.

use crate::global::Pole;
use crate::linalg;
use crate::localdata::LocalRamifiedData;
use crate::scalars::Scalar;
use crate::series::TruncSeries;
use crate::smat::SMat;

/// Precomputed data for one pole.
pub(crate) struct PoleConditions {
    m: usize,
    owner: Vec<usize>,
    starts: Vec<usize>,
    blocks: Vec<LocalRamifiedData>,
    /// `kernels[j][k]`: K-basis of `ker(bar pi_k)` for block `j`, each
    /// element listing `b_l` in `K[w]/(w^N)`.
    kernels: Vec<Vec<Vec<Vec<TruncSeries>>>>,
}

impl PoleConditions {
    pub(crate) fn new(pole: &Pole) -> PoleConditions {
        let mut owner = Vec::new();
        let mut starts = Vec::new();
        for (j, b) in pole.blocks.iter().enumerate() {
            starts.push(owner.len());
            owner.extend(std::iter::repeat_n(j, b.r));
        }
        let kernels = pole.blocks.iter().map(|d| (0..d.r).map(|k| kernel_bar_pi(d, k)).collect()).collect();
        PoleConditions { m: pole.m, owner, starts, blocks: pole.blocks.clone(), kernels }
    }

    /// Values whose vanishing means `X` preserves the flag and, on every
    /// diagonal block, the filtration.
    fn flag_and_filtration(&self, x: &SMat, out: &mut Vec<Scalar>) {
        let r = self.owner.len();
        for a in 0..r {
            for b in 0..r {
                if self.owner[a] < self.owner[b] {
                    out.extend((0..self.m).map(|i| x[a][b].coeff(i)));
                }
            }
        }
        for (j, d) in self.blocks.iter().enumerate() {
            let s = self.starts[j];
            for k in 0..d.r {
                for l in 0..d.r {
                    for jp in 0..d.r {
                        let (el, ejp) = (d.filt[k][l], d.filt[k][jp]);
                        for i in 0..ejp.saturating_sub(el).min(self.m) {
                            out.push(x[s + jp][s + l].coeff(i));
                        }
                    }
                }
            }
        }
    }

    /// `Gamma_l = sum_j' (Y_{j'l} z^{e_kl - e_kj'})(w^r) g_{kj'}` for the
    /// diagonal block `j`, dropping the coefficients constrained to vanish
    /// by the filtration condition.
    fn gamma(&self, x: &SMat, j: usize, k: usize) -> Vec<TruncSeries> {
        let d = &self.blocks[j];
        let (r, m, n) = (d.r, d.m, d.n());
        let s = self.starts[j];
        (0..r)
            .map(|l| {
                let mut acc = TruncSeries::zero(d.field(), r, n);
                for jp in 0..r {
                    let (el, ejp) = (d.filt[k][l], d.filt[k][jp]);
                    let y = x[s + jp][s + l].resize(m + el).shift(el);
                    let c: Vec<Scalar> = (0..m).map(|i| y.coeff(i + ejp)).collect();
                    acc = acc.add(&TruncSeries::new(1, c).z_to_w(r, n).mul(&d.pi[k][jp]));
                }
                acc
            })
            .collect()
    }

    /// `F^0`: flag, filtration, and `bar pi_k (u (ker bar pi_k)) = 0`.
    pub(crate) fn f0(&self, x: &SMat) -> Vec<Scalar> {
        let mut out = Vec::new();
        self.flag_and_filtration(x, &mut out);
        for (j, d) in self.blocks.iter().enumerate() {
            for k in 0..d.r {
                let g = self.gamma(x, j, k);
                for b in &self.kernels[j][k] {
                    let mut acc = TruncSeries::zero(d.field(), d.r, d.n());
                    for (bl, gl) in b.iter().zip(&g) {
                        acc = acc.add(&bl.mul(gl));
                    }
                    out.extend(acc.coeffs().iter().cloned());
                }
            }
        }
        out
    }

    /// `F^1`: flag, filtration, and `bar pi_k (v (V_k)) = 0`.
    pub(crate) fn f1(&self, x: &SMat) -> Vec<Scalar> {
        let mut out = Vec::new();
        self.flag_and_filtration(x, &mut out);
        for (j, d) in self.blocks.iter().enumerate() {
            for k in 0..d.r {
                for g in self.gamma(x, j, k) {
                    out.extend(g.coeffs().iter().cloned());
                }
            }
        }
        out
    }
}

/// `ker(bar pi_k)` on `V_k (x) K[w]/(w^N) = sum_l K[w]/(w^{n_kl})` with
/// `n_kl = min(N, r (m - e_kl))`.
fn kernel_bar_pi(d: &LocalRamifiedData, k: usize) -> Vec<Vec<TruncSeries>> {
    let (r, m, n) = (d.r, d.m, d.n());
    let lens: Vec<usize> = (0..r).map(|l| n.min(r * (m - d.filt[k][l]))).collect();
    let offs: Vec<usize> = lens.iter().scan(0, |acc, &x| Some(std::mem::replace(acc, *acc + x))).collect();
    let nvars: usize = lens.iter().sum();
    let field = d.field();
    let mut rows = vec![vec![field.zero(); nvars]; n];
    for l in 0..r {
        for t in 0..lens[l] {
            let img = d.pi[k][l].shift(t);
            for (s, row) in rows.iter_mut().enumerate() {
                row[offs[l] + t] = img.coeff(s);
            }
        }
    }
    linalg::nullspace(&rows, nvars, &field.zero())
        .into_iter()
        .map(|v| {
            (0..r)
                .map(|l| {
                    let mut c = vec![field.zero(); n];
                    c[..lens[l]].clone_from_slice(&v[offs[l]..offs[l] + lens[l]]);
                    TruncSeries::new(r, c)
                })
                .collect()
        })
        .collect()
}
