//! Exponent sets: the Fuchs relation, the determinant map and the dimension
//! count with its Euler characteristics.

use ramified::formal::Exponent;
use ramified::global::{det_exponents, dimension, euler_chars, validate_exponent_set, ExponentSet, PoleExponents};
use ramified::scalars::Field;

fn main() -> ramified::Result<()> {
    let f = Field::rationals();
    // Rank two, degree -1, one pole of order 2: -1 + 2 c_2 + 1/2 = 0.
    let nu = Exponent::new(2, 2, vec![f.from_int(3), f.one(), f.rat(1, 4)])?;
    let set = ExponentSet { a: -1, poles: vec![PoleExponents { m: 2, blocks: vec![vec![nu.clone(), nu.shift_dlog(1)]] }] };
    println!("valid: {}", validate_exponent_set(&set).all_pass());
    let det = det_exponents(&set)?;
    println!("det exponent {:?}, valid: {}", det.poles[0].blocks[0][0].c.iter().map(|x| x.render()).collect::<Vec<_>>(), validate_exponent_set(&det).all_pass());
    let chars = euler_chars(0, 2, &[2, 3], &[vec![2], vec![1, 1]])?;
    println!("chi(F0) = {}, chi(F1) = {}, dim = {} = {}", chars.chi_f0, chars.chi_f1, chars.dim_h1, dimension(0, 2, &[2, 3]));
    Ok(())
}
