//! Single-defect mutations of valid local data. Each kind breaks exactly
//! one check when applied to canonical data; the others pass or are skipped.

use super::LocalRamifiedData;
use crate::error::{Error, Result};
use crate::formal::Exponent;
use crate::scalars::Field;
use crate::series::TruncSeries;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationKind {
    DropDlog,
    CollapseFiltration,
    ConstantOffDiagonal,
    PiLowOrder,
    PiTimesW,
    NablaTopTerm,
    PhiSquare,
    PhiDouble,
    PiScaled,
}

impl MutationKind {
    pub const ALL: [MutationKind; 9] = [
        MutationKind::DropDlog,
        MutationKind::CollapseFiltration,
        MutationKind::ConstantOffDiagonal,
        MutationKind::PiLowOrder,
        MutationKind::PiTimesW,
        MutationKind::NablaTopTerm,
        MutationKind::PhiSquare,
        MutationKind::PhiDouble,
        MutationKind::PiScaled,
    ];

    /// The check this mutation is designed to break.
    pub fn target(self) -> &'static str {
        match self {
            MutationKind::DropDlog => "exponent_chain",
            MutationKind::CollapseFiltration => "filtration_lengths",
            MutationKind::ConstantOffDiagonal => "nabla_preserves_filtration",
            MutationKind::PiLowOrder => "pi_well_defined",
            MutationKind::PiTimesW => "pi_surjective",
            MutationKind::NablaTopTerm => "diagram_nu",
            MutationKind::PhiSquare => "phi_image",
            MutationKind::PhiDouble => "phi_composite",
            MutationKind::PiScaled => "diagram_phi",
        }
    }

    fn needs_rank_two(self) -> bool {
        matches!(
            self,
            MutationKind::DropDlog
                | MutationKind::CollapseFiltration
                | MutationKind::ConstantOffDiagonal
                | MutationKind::PiLowOrder
                | MutationKind::PiScaled
        )
    }
}

#[derive(Clone, Debug)]
pub struct Mutation {
    pub kind: MutationKind,
    pub expected_check: &'static str,
    pub data: LocalRamifiedData,
}

/// Applies `kind` to `data`; `k` selects which index the defect touches,
/// reduced into range.
pub fn mutate(data: &LocalRamifiedData, kind: MutationKind, k: usize) -> Result<Mutation> {
    let (r, m, n) = (data.r, data.m, data.n());
    if kind.needs_rank_two() && r < 2 {
        return Err(Error::Invalid(format!("mutation {kind:?} needs r >= 2")));
    }
    let field = data.field().clone();
    let mut d = data.clone();
    match kind {
        MutationKind::DropDlog => {
            let i = 1 + k % (r - 1);
            d.nu[i] = d.nu[i].shift_dlog(-1);
        }
        MutationKind::CollapseFiltration => d.filt[1] = d.filt[0].clone(),
        MutationKind::ConstantOffDiagonal => {
            let b = &mut d.nabla[0][1];
            b.set_coeff(0, &b.coeff(0) + &field.one());
        }
        MutationKind::PiLowOrder => {
            let g = &mut d.pi[1][0];
            g.set_coeff(0, &g.coeff(0) + &field.one());
        }
        MutationKind::PiTimesW => {
            for row in d.pi.iter_mut() {
                for g in row.iter_mut() {
                    *g = g.shift(1);
                }
            }
        }
        MutationKind::NablaTopTerm => {
            let l = (0..r).find(|&l| !data.pi[0][l].coeff(0).is_zero()).unwrap_or(0);
            let b = &mut d.nabla[l][l];
            b.set_coeff(m - 1, &b.coeff(m - 1) + &field.one());
        }
        MutationKind::PhiSquare => d.phi[k % r] = TruncSeries::monomial(&field.one(), 2, r, n),
        MutationKind::PhiDouble => {
            let i = k % r;
            d.phi[i] = d.phi[i].scale(&field.from_int(2));
        }
        MutationKind::PiScaled => {
            let i = k % r;
            for g in d.pi[i].iter_mut() {
                *g = g.scale(&field.from_int(2));
            }
        }
    }
    Ok(Mutation { kind, expected_check: kind.target(), data: d })
}

/// Twenty mutations of canonical data, cycling through the kinds and the
/// block shapes `(r, m) = (2, 2), (3, 2), (2, 3)`.
pub fn mutation_suite() -> Vec<Mutation> {
    let shapes = [(2usize, 2usize), (3, 2), (2, 3)];
    let mut out = Vec::with_capacity(20);
    for i in 0..20 {
        let kind = MutationKind::ALL[i % 9];
        let (r, m) = shapes[i % 3];
        let f = Field::cyclotomic(r as u64);
        let n = m * r - r + 1;
        let mut c: Vec<_> = (0..n).map(|j| f.from_int(((i + 2 * j) % 5) as i64 - 1)).collect();
        c[1 % n] = f.from_int(1 + (i % 3) as i64);
        let nu = Exponent::new(r, m, c).expect("valid exponent");
        let base = LocalRamifiedData::canonical(&nu);
        out.push(mutate(&base, kind, i).expect("shapes have r >= 2"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn each_mutation_breaks_exactly_its_check() {
        let suite = mutation_suite();
        assert_eq!(suite.len(), 20);
        for mu in &suite {
            let rep = mu.data.verify();
            assert_eq!(rep.failed(), vec![mu.expected_check], "{:?} r={} m={}", mu.kind, mu.data.r, mu.data.m);
        }
    }
}
