//! Canonical generic ramified local data: verification, a single-defect
//! mutation, and the kernel of the twisted quotient map.

use ramified::formal::Exponent;
use ramified::localdata::{gauge_randomize, kernel_pi, mutate, LocalRamifiedData, MutationKind};
use ramified::scalars::Field;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ramified::Result<()> {
    let f = Field::cyclotomic(3);
    let nu = Exponent::new(3, 2, [1, 2, 0, -1].iter().map(|&x| f.from_int(x)).collect())?;
    let data = LocalRamifiedData::canonical(&nu);
    let gauged = gauge_randomize(&data, &mut ChaCha8Rng::seed_from_u64(11))?;
    for (name, d) in [("canonical", &data), ("gauged", &gauged)] {
        let rep = d.verify();
        println!("{name}: {} checks, all pass: {}", rep.checks.len(), rep.all_pass());
    }
    let broken = mutate(&data, MutationKind::PhiDouble, 0)?;
    println!("after {:?}: failed {:?} (expected {})", broken.kind, broken.data.verify().failed(), broken.expected_check);
    let k = kernel_pi(&gauged)?;
    println!("kernel length {} for r = 3, expected r(r-1)/2 = 3", k.length);
    Ok(())
}
