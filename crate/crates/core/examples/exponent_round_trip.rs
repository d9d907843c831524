//! Push a rank-one ramified exponent forward to a rank-r formal connection,
//! then recover it by Newton-Puiseux.

use ramified::formal::{default_buffer, pushforward_ramified, recover_exponent, Exponent};
use ramified::scalars::Field;

fn main() -> ramified::Result<()> {
    let f = Field::cyclotomic(3);
    let c = [2, 1, -1, 4, 0, 5, 1].iter().map(|&x| f.from_int(x)).collect();
    let nu = Exponent::new(3, 3, c)?;
    let conn = pushforward_ramified(&nu, default_buffer());
    println!("formal connection: rank {}, pole order {}, {} coefficients per entry", conn.rank, conn.m, conn.big_m);
    let back = recover_exponent(&conn)?;
    let show = |e: &Exponent| e.c.iter().map(|x| x.render()).collect::<Vec<_>>().join(", ");
    println!("input     [{}]", show(&nu));
    println!("recovered [{}]", show(&back));
    println!("same class up to Galois and Z dw/w: {}", back.same_orbit(&nu));
    Ok(())
}
