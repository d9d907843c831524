//! Generic ramified local data at one pole block and its verification.
//!
//! Storage conventions, with `N = mr - r + 1`:
//!
//! * `V_0 = (K[z]/z^m)^r` with adapted basis `f_0..f_{r-1}`; `V_k` is spanned
//!   by `z^{filt[k][l]} f_l` and `filt` has rows `k = 0..=r`, row `r` being
//!   `z V_0`.
//! * `L_k = (w^k)/(w^{k+N})` is identified with `K[w]/(w^N)` through the
//!   generator; `pi[k][l]` is the coordinate of `pi_k(z^{filt[k][l]} f_l)`.
//!   `pi_r` is `z (x) pi_0` and is not stored.
//! * `phi[k-1]` is the coordinate of `phi_k: L_k -> L_{k-1}`, so that
//!   `phi_k(a) = phi[k-1] * a`; for `k = r` the source is `z (x) L_0`.
//! * `nabla` is the block connection matrix over `K[z]/(z^m)`, in units of
//!   `dz/z^m`.

mod build;
mod kernel;
mod mutate;
mod reconstruct;

pub use build::{build_from_formal, eigen_quotient, frame_from_quotient, Built};
pub use kernel::{kernel_pi, KernelPi};
pub use mutate::{mutate, mutation_suite, Mutation, MutationKind};
pub use reconstruct::{gauge_randomize, reconstruct_check, ReconstructReport};

use crate::error::{Error, Result};
use crate::formal::{pushforward_ramified, Exponent};
use crate::linalg;
use crate::scalars::{Field, Scalar};
use crate::series::TruncSeries;
use crate::smat::{self, SMat};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRamifiedData {
    pub r: usize,
    pub m: usize,
    pub nu: Vec<Exponent>,
    pub filt: Vec<Vec<usize>>,
    pub nabla: SMat,
    pub pi: Vec<Vec<TruncSeries>>,
    pub phi: Vec<TruncSeries>,
}

/// Names of the verification checks, in report order.
pub const CHECKS: [&str; 9] = [
    "exponent_chain",
    "filtration_lengths",
    "phi_image",
    "phi_composite",
    "nabla_preserves_filtration",
    "pi_well_defined",
    "pi_surjective",
    "diagram_nu",
    "diagram_phi",
];

/// Prerequisites of each check; a check whose prerequisite did not pass is
/// reported as skipped rather than evaluated on meaningless input.
fn prerequisites(name: &str) -> &'static [&'static str] {
    match name {
        "phi_composite" => &["phi_image"],
        "nabla_preserves_filtration" | "pi_well_defined" => &["filtration_lengths"],
        "pi_surjective" => &["pi_well_defined"],
        "diagram_nu" => &["nabla_preserves_filtration", "pi_well_defined", "exponent_chain"],
        "diagram_phi" => &["pi_well_defined", "phi_image", "phi_composite"],
        _ => &[],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check_name: String,
    pub pass: bool,
    pub status: Status,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.check_name.as_str()).collect()
    }

    pub fn status(&self, name: &str) -> Option<Status> {
        self.checks.iter().find(|c| c.check_name == name).map(|c| c.status)
    }
}

impl LocalRamifiedData {
    /// Validates shapes only; mathematical conditions are left to
    /// [`LocalRamifiedData::verify`].
    pub fn new(
        m: usize,
        nu: Vec<Exponent>,
        filt: Vec<Vec<usize>>,
        nabla: SMat,
        pi: Vec<Vec<TruncSeries>>,
        phi: Vec<TruncSeries>,
    ) -> Result<LocalRamifiedData> {
        let r = nu.len();
        if r == 0 || m == 0 {
            return Err(Error::Invalid("local data needs r >= 1 and m >= 1".into()));
        }
        if m == 1 && r > 1 {
            return Err(Error::Invalid("a block of size r > 1 needs pole order m >= 2".into()));
        }
        let n = m * r - r + 1;
        let bad = |what: &str| Err(Error::Invalid(format!("local data: {what}")));
        if nu.iter().any(|e| e.r != r || e.m != m) {
            return bad("every exponent must have the block's r and m");
        }
        if filt.len() != r + 1 || filt.iter().any(|row| row.len() != r || row.iter().any(|&e| e > m)) {
            return bad("filtration must be (r+1) x r with exponents at most m");
        }
        if nabla.len() != r || nabla.iter().any(|row| row.len() != r || row.iter().any(|s| s.ram() != 1)) {
            return bad("nabla must be r x r with z-series entries");
        }
        if pi.len() != r || pi.iter().any(|row| row.len() != r || row.iter().any(|s| s.ram() != r || s.n() != n)) {
            return bad("pi must be r x r with entries in K[w]/(w^N)");
        }
        if phi.len() != r || phi.iter().any(|s| s.ram() != r || s.n() != n) {
            return bad("phi must list r elements of K[w]/(w^N)");
        }
        let field = nu[0].field().clone();
        let nabla = smat::resize(&nabla, m);
        let same = nabla.iter().flatten().chain(pi.iter().flatten()).chain(phi.iter()).all(|s| *s.field() == field);
        if !same {
            return Err(Error::FieldMismatch);
        }
        Ok(LocalRamifiedData { r, m, nu, filt, nabla, pi, phi })
    }

    pub fn n(&self) -> usize {
        self.m * self.r - self.r + 1
    }

    pub fn field(&self) -> &Field {
        self.nu[0].field()
    }

    /// `filt[k][l] = 1` for `l < k`, else 0.
    pub fn canonical_filtration(r: usize) -> Vec<Vec<usize>> {
        (0..=r).map(|k| (0..r).map(|l| usize::from(l < k)).collect()).collect()
    }

    /// The data of the pushforward model in the basis `w^l`:
    /// `pi_k(z^e f_l) = w^{re + l}` and `phi_k = w`.
    pub fn canonical(nu: &Exponent) -> LocalRamifiedData {
        let conn = pushforward_ramified(nu, 0);
        LocalRamifiedData::with_canonical_maps(nu, conn.a)
    }

    /// Canonical filtration, quotient maps and link maps around a given
    /// block connection matrix.
    pub fn with_canonical_maps(nu: &Exponent, nabla: SMat) -> LocalRamifiedData {
        let (r, m) = (nu.r, nu.m);
        let n = m * r - r + 1;
        let field = nu.field().clone();
        let filt = Self::canonical_filtration(r);
        let pi = (0..r)
            .map(|k| {
                (0..r)
                    .map(|l| TruncSeries::monomial(&field.one(), r * filt[k][l] + l - k, r, n))
                    .collect()
            })
            .collect();
        let phi = vec![TruncSeries::monomial(&field.one(), 1, r, n); r];
        let nu = (0..r).map(|k| nu.shift_dlog(k as i64)).collect();
        LocalRamifiedData { r, m, nu, filt, nabla: smat::resize(&nabla, m), pi, phi }
    }

    /// `pi_k` applied to `x = sum_l x_l(z) f_l`, assuming `x` lies in `V_k`:
    /// `sum_l (x_l / z^{filt[k][l]})(w^r) pi[k][l]` modulo `w^N`.
    pub fn apply_pi(&self, k: usize, x: &[TruncSeries]) -> Result<TruncSeries> {
        let (r, n) = (self.r, self.n());
        let mut acc = TruncSeries::zero(self.field(), r, n);
        for (l, xl) in x.iter().enumerate() {
            let e = self.filt[k][l];
            let q = xl.unshift(e).map_err(|_| Error::Invalid(format!("vector is not in V_{k}")))?;
            let q = q.resize(self.m - e.min(self.m)).resize(self.m);
            acc = acc.add(&q.z_to_w(r, n).mul(&self.pi[k][l]));
        }
        Ok(acc)
    }

    /// Runs every check of the definition; failed prerequisites mark their
    /// dependants as skipped.
    pub fn verify(&self) -> VerifyReport {
        let mut checks: Vec<CheckResult> = Vec::new();
        for name in CHECKS {
            let blocked = prerequisites(name)
                .iter()
                .find(|p| checks.iter().any(|c| c.check_name == **p && c.status != Status::Pass));
            let (status, witness) = match blocked {
                Some(p) => (Status::Skipped, Some(format!("prerequisite {p} did not pass"))),
                None => match self.run_check(name) {
                    None => (Status::Pass, None),
                    Some(w) => (Status::Fail, Some(w)),
                },
            };
            checks.push(CheckResult { check_name: name.to_string(), pass: status == Status::Pass, status, witness });
        }
        VerifyReport { checks }
    }

    fn run_check(&self, name: &str) -> Option<String> {
        match name {
            "exponent_chain" => self.check_exponent_chain(),
            "filtration_lengths" => self.check_filtration(),
            "phi_image" => self.check_phi_image(),
            "phi_composite" => self.check_phi_composite(),
            "nabla_preserves_filtration" => self.check_nabla_filtration(),
            "pi_well_defined" => self.check_pi_well_defined(),
            "pi_surjective" => self.check_pi_surjective(),
            "diagram_nu" => self.check_diagram_nu(),
            "diagram_phi" => self.check_diagram_phi(),
            _ => Some(format!("unknown check {name}")),
        }
    }

    fn check_exponent_chain(&self) -> Option<String> {
        (1..self.r)
            .find(|&k| self.nu[k] != self.nu[k - 1].shift_dlog(1))
            .map(|k| format!("nu_{k} - nu_{} is not dw/w", k - 1))
    }

    fn check_filtration(&self) -> Option<String> {
        let r = self.r;
        if self.filt[0].iter().any(|&e| e != 0) {
            return Some("V_0 is not the whole module".into());
        }
        if self.filt[r].iter().any(|&e| e != 1) {
            return Some("V_r is not z V_0".into());
        }
        for k in 0..r {
            let (a, b) = (&self.filt[k], &self.filt[k + 1]);
            if a.iter().zip(b).any(|(x, y)| y < x) {
                return Some(format!("V_{} is not contained in V_{k}", k + 1));
            }
            let len: usize = a.iter().zip(b).map(|(x, y)| y - x).sum();
            if len != 1 {
                return Some(format!("length of V_{k}/V_{} is {len}", k + 1));
            }
        }
        None
    }

    fn check_phi_image(&self) -> Option<String> {
        self.phi.iter().position(|p| p.ord() != 1).map(|k| format!("phi_{} has order {}", k + 1, self.phi[k].ord()))
    }

    fn check_phi_composite(&self) -> Option<String> {
        let (r, n) = (self.r, self.n());
        let mut prod = TruncSeries::one(self.field(), r, n);
        for p in &self.phi {
            prod = prod.mul(p);
        }
        let canonical = TruncSeries::monomial(&self.field().one(), r, r, n);
        (prod != canonical).then(|| format!("composite of the phi_k is {prod:?}, expected w^{r}"))
    }

    fn check_nabla_filtration(&self) -> Option<String> {
        let m = self.m;
        for k in 0..self.r {
            for l in 0..self.r {
                for j in 0..self.r {
                    let (el, ej) = (self.filt[k][l], self.filt[k][j]);
                    let ord = (self.nabla[j][l].ord() + el).min(m);
                    if ord < ej {
                        return Some(format!("nabla(z^{el} f_{l}) has f_{j}-component outside V_{k}"));
                    }
                }
            }
        }
        None
    }

    fn check_pi_well_defined(&self) -> Option<String> {
        let r = self.r;
        for k in 0..r {
            for l in 0..r {
                let need = (r * self.filt[k][l] + 1).saturating_sub(r);
                if self.pi[k][l].ord() < need {
                    return Some(format!("pi_{k}(z^m f_{l}) is nonzero in L_{k}"));
                }
            }
        }
        None
    }

    fn check_pi_surjective(&self) -> Option<String> {
        let (r, n) = (self.r, self.n());
        for k in 0..r {
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for l in 0..r {
                for i in 0..self.m.saturating_sub(self.filt[k][l]) {
                    if r * i < n {
                        rows.push(self.pi[k][l].shift(r * i).coeffs().to_vec());
                    }
                }
            }
            let rank = linalg::rank(&rows, n);
            if rank != n {
                return Some(format!("pi_{k} has image of K-dimension {rank} < {n}"));
            }
        }
        None
    }

    fn check_diagram_nu(&self) -> Option<String> {
        let (r, n, m) = (self.r, self.n(), self.m);
        for k in 0..r {
            let nuk = self.nu[k].series();
            for l in 0..r {
                let mut lhs = TruncSeries::zero(self.field(), r, n);
                for j in 0..r {
                    let (el, ej) = (self.filt[k][l], self.filt[k][j]);
                    let b = self.nabla[j][l].resize(m + el).shift(el);
                    let Ok(b) = b.unshift(ej) else {
                        return Some(format!("nabla entry ({j},{l}) leaves V_{k}"));
                    };
                    lhs = lhs.add(&b.resize(m).z_to_w(r, n).mul(&self.pi[k][j]));
                }
                let rhs = nuk.mul(&self.pi[k][l]);
                if lhs != rhs {
                    return Some(format!("pi_{k} nabla(z^e f_{l}) differs from nu_{k} pi_{k}(z^e f_{l})"));
                }
            }
        }
        None
    }

    fn check_diagram_phi(&self) -> Option<String> {
        let r = self.r;
        for k in 1..=r {
            for l in 0..r {
                let (src, tgt) = if k < r { (k, self.filt[k][l]) } else { (0, 1) };
                let delta = tgt - self.filt[k - 1][l];
                let lhs = self.pi[k - 1][l].shift(r * delta);
                let rhs = self.phi[k - 1].mul(&self.pi[src][l]);
                if lhs != rhs {
                    return Some(format!("square for phi_{k} fails on generator {l}"));
                }
            }
        }
        None
    }
}

/// `x` as `K`-coordinates: `x_l` coefficient `i` at position `l*m + i`.
pub(crate) fn flatten(x: &[TruncSeries], m: usize) -> Vec<Scalar> {
    x.iter().flat_map(|s| (0..m).map(move |i| s.coeff(i))).collect()
}

/// Inverse of [`flatten`].
pub(crate) fn unflatten(v: &[Scalar], r: usize, m: usize) -> Vec<TruncSeries> {
    (0..r).map(|l| TruncSeries::new(1, v[l * m..(l + 1) * m].to_vec())).collect()
}
