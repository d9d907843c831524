use num_bigint::BigInt;
use proptest::prelude::*;
use ramified::cohomology::{symplectic_pair, tangent_space, TangentCocycle};
use ramified::formal::{default_buffer, pushforward_ramified, recover_exponent, Exponent};
use ramified::global::{det_exponents, dimension, euler_chars, validate_exponent_set, ExponentSet, GlobalConnection, PoleExponents, PoleSpec, Position};
use ramified::localdata::{gauge_randomize, kernel_pi, LocalRamifiedData};
use ramified::poly::Poly;
use ramified::scalars::{q, Field, Scalar, Q};
use ramified::series::TruncSeries;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn tower() -> Field {
    // Q(zeta_3)(sqrt 2), degree 4.
    let f = Field::cyclotomic(3);
    f.extend(2, &f.from_int(2)).unwrap()
}

fn scalar(f: &Field, coords: &[i64]) -> Scalar {
    f.from_coeffs(coords.iter().take(f.degree()).map(|&x| Q::from_integer(BigInt::from(x))).collect()).unwrap()
}

fn coords() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, 4)
}

fn exponent(r: usize, m: usize, c: &[i64]) -> Exponent {
    let f = Field::cyclotomic(r as u64);
    let n = m * r - r + 1;
    let mut v: Vec<Scalar> = (0..n).map(|l| f.from_int(c[l % c.len()])).collect();
    if n > 1 && v[1].is_zero() {
        v[1] = f.one();
    }
    Exponent::new(r, m, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_ring_axioms(a in coords(), b in coords(), c in coords()) {
        let f = tower();
        let (a, b, c) = (scalar(&f, &a), scalar(&f, &b), scalar(&f, &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn square_roots_square_back(a in coords()) {
        let f = tower();
        let a = scalar(&f, &a);
        let sq = &a * &a;
        let root = sq.nth_root(2).expect("squares have roots");
        prop_assert_eq!(&root * &root, sq);
    }

    #[test]
    fn poly_division_identity(a in prop::collection::vec(-5i64..=5, 1..7), d in prop::collection::vec(-5i64..=5, 1..4)) {
        let f = Field::cyclotomic(4);
        let a = Poly::new(&f, a.iter().map(|&x| f.from_int(x)).collect());
        let d = Poly::new(&f, d.iter().map(|&x| f.from_int(x)).collect());
        prop_assume!(!d.is_zero());
        let (qu, rem) = a.div_rem(&d).unwrap();
        prop_assert_eq!(qu.mul(&d).add(&rem), a);
        prop_assert!(rem.is_zero() || rem.degree() < d.degree());
    }

    #[test]
    fn series_product_is_associative(x in coords(), y in coords(), z in coords()) {
        let f = Field::cyclotomic(3);
        let s = |c: &[i64]| TruncSeries::new(3, c.iter().map(|&v| f.from_int(v)).collect());
        let (x, y, z) = (s(&x), s(&y), s(&z));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }

    #[test]
    fn orbit_is_closed_under_galois_and_dlog(r in 2usize..=4, m in 1usize..=3, c in coords(), j in 0i64..4, k in -3i64..=3) {
        let nu = exponent(r, m, &c);
        let other = nu.galois(j).unwrap().shift_dlog(k);
        prop_assert!(nu.same_orbit(&other));
        prop_assert!(other.same_orbit(&nu));
        // Residues differ by an integer.
        let gap = (&other.residue() - &nu.residue()).as_rational().unwrap();
        prop_assert!(gap.is_integer());
    }

    #[test]
    fn dimension_matches_euler_characteristics(g in 0i64..4, r in 1i64..=6, ms in prop::collection::vec(1i64..=5, 1..=4)) {
        let blocks: Vec<Vec<i64>> = ms.iter().map(|_| vec![r]).collect();
        let chars = euler_chars(g, r, &ms, &blocks).unwrap();
        prop_assert_eq!(chars.dim_h1, dimension(g, r, &ms));
        prop_assert_eq!(chars.dim_h1.rem_euclid(2), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pushforward_recovers_exponent(r in 2usize..=3, m in 2usize..=4, c in coords()) {
        let nu = exponent(r, m, &c);
        let back = recover_exponent(&pushforward_ramified(&nu, default_buffer())).unwrap();
        prop_assert!(back.same_orbit(&nu), "{:?} vs {:?}", nu.c, back.c);
    }

    #[test]
    fn canonical_data_verifies_and_gauge_keeps_kernel(r in 2usize..=3, m in 2usize..=3, c in coords(), seed in 0u64..1000) {
        let d = LocalRamifiedData::canonical(&exponent(r, m, &c));
        prop_assert!(d.verify().all_pass());
        let g = gauge_randomize(&d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(g.verify().all_pass(), "{:?}", g.verify().failed());
        prop_assert_eq!(kernel_pi(&g).unwrap().length, r * (r - 1) / 2);
    }

    #[test]
    fn determinant_preserves_fuchs(m in 1usize..=3, c in coords(), a in -3i64..=3) {
        // Rank two, one pole: a + 2 c_top + 1/2 = 0 fixes c_top.
        let f = Field::cyclotomic(2);
        let n = 2 * m - 1;
        let mut v: Vec<Scalar> = (0..n).map(|l| f.from_int(c[l % c.len()])).collect();
        v[n - 1] = f.from_q(q(-2 * a - 1, 4));
        let nu = Exponent::new(2, m, v).unwrap();
        let set = ExponentSet { a, poles: vec![PoleExponents { m, blocks: vec![vec![nu.clone(), nu.shift_dlog(1)]] }] };
        prop_assert!(validate_exponent_set(&set).all_pass());
        let det = det_exponents(&set).unwrap();
        prop_assert!(validate_exponent_set(&det).all_pass());
        prop_assert_eq!(det.a, a);
    }
}

fn model_basis() -> &'static Vec<TangentCocycle> {
    static BASIS: OnceLock<Vec<TangentCocycle>> = OnceLock::new();
    BASIS.get_or_init(|| {
        let f = Field::rationals();
        let p = |c: &[i64]| Poly::new(&f, c.iter().map(|&x| f.from_int(x)).collect());
        let numerators = vec![vec![p(&[0, 0, 1]), p(&[1, 0, 2, 1])], vec![p(&[0, 1]), p(&[0, 0, 0, 1])]];
        let spec = PoleSpec { position: Position::Finite(f.zero()), m: 4, block_sizes: vec![2], weights: vec![q(1, 2)] };
        let gc = GlobalConnection::from_matrix(f, vec![0, -1], numerators, vec![spec]).unwrap();
        tangent_space(&gc, None).unwrap().basis
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pairing_is_bilinear_and_alternating(a in -4i64..=4, b in -4i64..=4, c in -4i64..=4, d in -4i64..=4) {
        let basis = model_basis();
        let f = Field::rationals();
        let comb = |s: i64, t: i64| basis[0].scale(&f.from_int(s)).add(&basis[1].scale(&f.from_int(t))).unwrap();
        let (x, y) = (comb(a, b), comb(c, d));
        let w01 = symplectic_pair(&basis[0], &basis[1]).unwrap();
        // omega(x, y) = (ad - bc) omega(e_0, e_1) for an alternating form.
        prop_assert_eq!(symplectic_pair(&x, &y).unwrap(), &f.from_int(a * d - b * c) * &w01);
        prop_assert!(symplectic_pair(&x, &x).unwrap().is_zero());
    }
}
