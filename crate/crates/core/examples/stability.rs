//! Stability of global connections on P^1: automatic for a single generic
//! ramified block, and a destabilising invariant line for a split example.

use ramified::global::{is_stable, GlobalConnection, PoleSpec, Position};
use ramified::poly::Poly;
use ramified::scalars::{q, Field};

fn main() -> ramified::Result<()> {
    let f = Field::rationals();
    let p = |c: &[i64]| Poly::new(&f, c.iter().map(|&x| f.from_int(x)).collect());
    let model = GlobalConnection::from_matrix(
        f.clone(),
        vec![0, -1],
        vec![vec![p(&[0, 0, 1]), p(&[1, 0, 2, 1])], vec![p(&[0, 1]), p(&[0, 0, 0, 1])]],
        vec![PoleSpec { position: Position::Finite(f.zero()), m: 4, block_sizes: vec![2], weights: vec![q(1, 2)] }],
    )?;
    println!("model: {}", serde_json::to_string(&is_stable(&model)?).unwrap());
    let split = GlobalConnection::from_matrix(
        f.clone(),
        vec![0, -2],
        vec![vec![Poly::constant(&f.rat(1, 3)), p(&[0, 1])], vec![Poly::zero(&f), Poly::constant(&f.rat(-1, 4))]],
        vec![
            PoleSpec { position: Position::Finite(f.zero()), m: 1, block_sizes: vec![1, 1], weights: vec![q(1, 5), q(3, 5)] },
            PoleSpec { position: Position::Infinity, m: 1, block_sizes: vec![1, 1], weights: vec![q(1, 10), q(7, 10)] },
        ],
    )?;
    println!("split: {}", serde_json::to_string(&is_stable(&split)?).unwrap());
    Ok(())
}
