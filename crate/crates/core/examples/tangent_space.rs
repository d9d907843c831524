//! Tangent space of the rank-two model as Cech hypercohomology, with its
//! stabilisation certificate and the symplectic pairing.

use ramified::cohomology::{pairing_matrix, tangent_space};
use ramified::global::{GlobalConnection, PoleSpec, Position};
use ramified::linalg;
use ramified::poly::Poly;
use ramified::scalars::{q, Field};

fn main() -> ramified::Result<()> {
    let f = Field::rationals();
    let p = |c: &[i64]| Poly::new(&f, c.iter().map(|&x| f.from_int(x)).collect());
    let gc = GlobalConnection::from_matrix(
        f.clone(),
        vec![0, -1],
        vec![vec![p(&[0, 0, 1]), p(&[1, 0, 2, 1])], vec![p(&[0, 1]), p(&[0, 0, 0, 1])]],
        vec![PoleSpec { position: Position::Finite(f.zero()), m: 4, block_sizes: vec![2], weights: vec![q(1, 2)] }],
    )?;
    let ts = tangent_space(&gc, None)?;
    println!("dim H^1 = {} (certificate {:?})", ts.dimension, ts.certificate);
    let pm = pairing_matrix(&ts.basis)?;
    for row in &pm {
        println!("  [{}]", row.iter().map(|x| x.render()).collect::<Vec<_>>().join(", "));
    }
    println!("rank {}", linalg::rank(&pm, pm.len()));
    Ok(())
}
