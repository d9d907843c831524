//! The two-parameter degeneration on its built-in grid: which fibres are
//! ramified, unramified or regular singular, and the residue types.

use ramified::family::{check_dagger, specialize, standard_grid, Fiber, ResidueKind};

fn main() -> ramified::Result<()> {
    let (fb, points) = standard_grid();
    for (t, h) in &points {
        let fiber = specialize(&fb, t, h)?;
        let detail = match &fiber {
            Fiber::Ramified { chain } => format!("{} exponents", chain.len()),
            Fiber::Unramified { distinct, .. } => format!("leading terms distinct: {distinct}"),
            Fiber::RegularSingular { points } => points
                .iter()
                .map(|p| match &p.kind {
                    ResidueKind::Parabolic { .. } => "parabolic".to_string(),
                    ResidueKind::Semisimple { distinct, .. } => format!("semisimple(distinct={distinct})"),
                    ResidueKind::Nilpotent { beta, .. } => format!("nilpotent(beta={})", beta.render()),
                })
                .collect::<Vec<_>>()
                .join(", "),
        };
        let dagger = check_dagger(&fb, t, h)?.pass;
        println!("t = {:>3}, h = {:>3}: {:<16} dagger {dagger:<5} {detail}", t.render(), h.render(), fiber.label());
    }
    Ok(())
}
