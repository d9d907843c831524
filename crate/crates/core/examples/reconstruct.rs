//! Solve for every connection compatible with given local data and check
//! that the exponent and the frame normalisation come back.

use ramified::formal::Exponent;
use ramified::localdata::{gauge_randomize, reconstruct_check, LocalRamifiedData};
use ramified::scalars::Field;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ramified::Result<()> {
    let f = Field::cyclotomic(2);
    let nu = Exponent::new(2, 3, [1, 3, 0, -2, 1].iter().map(|&x| f.from_int(x)).collect())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let data = gauge_randomize(&LocalRamifiedData::canonical(&nu), &mut rng)?;
    let rep = reconstruct_check(&data, &mut rng, 4)?;
    println!("solution space dimension {}", rep.solution_dim);
    println!("exponents recovered: {}, claim holds: {}", rep.exponent_match, rep.claim_holds);
    for e in &rep.recovered {
        println!("  [{}]", e.c.iter().map(|x| x.render()).collect::<Vec<_>>().join(", "));
    }
    Ok(())
}
