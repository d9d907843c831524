//! Arithmetic in Q(zeta_8)(cbrt 3): inverses, roots of unity, r-th roots and
//! complex embeddings, all exact.

use ramified::scalars::Field;

fn main() -> ramified::Result<()> {
    let base = Field::cyclotomic(8);
    let f = base.extend(3, &base.from_int(3))?;
    println!("field of degree {}", f.degree());
    let zeta = f.zeta();
    let cbrt3 = f.radical(0);
    let x = &(&zeta + &cbrt3) + &f.rat(1, 2);
    let y = x.inv()?;
    println!("x = {}", x.render());
    println!("x * x^-1 = {}", (&x * &y).render());
    println!("i = {}", f.root_of_unity(4)?.render());
    let cube = x.pow(3);
    let root = cube.nth_root(3).expect("a cube has a cube root");
    println!("a cube root of x^3 is {}, its cube matches: {}", root.render(), root.pow(3) == cube);
    let z = x.embed_complex(64);
    println!("x ~ {:.6} + {:.6} i", z.re, z.im);
    Ok(())
}
