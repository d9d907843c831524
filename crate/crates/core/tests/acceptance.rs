//! Acceptance suite: one PASS/FAIL line per criterion, seeds fixed, every
//! comparison exact. A criterion also fails if it takes 60 s or longer.

use num_bigint::BigInt;
use ramified::cohomology::{pairing_matrix, symplectic_pair, tangent_space};
use ramified::family::{specialize, standard_grid, Fiber, ResidueKind};
use ramified::formal::{default_buffer, pushforward_ramified, recover_exponent, Exponent};
use ramified::global::{
    det_connection, det_exponents, dimension, euler_chars, is_stable, validate_exponent_set, ExponentSet, GlobalConnection,
    PoleExponents, PoleSpec, Position, StabilityVerdict,
};
use ramified::linalg;
use ramified::localdata::{gauge_randomize, kernel_pi, mutation_suite, reconstruct_check, LocalRamifiedData};
use ramified::poly::Poly;
use ramified::scalars::{q, Field, Scalar, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

const LIMIT: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ints(f: &Field, xs: &[i64]) -> Vec<Scalar> {
    xs.iter().map(|&x| f.from_int(x)).collect()
}

fn poly(f: &Field, xs: &[i64]) -> Poly {
    Poly::new(f, ints(f, xs))
}

/// Uniform coordinates in `[-bound, bound]` over the power basis.
fn random_scalar(f: &Field, rng: &mut ChaCha8Rng, bound: i64) -> Scalar {
    let c = (0..f.degree()).map(|_| Q::from_integer(BigInt::from(rng.gen_range(-bound..=bound)))).collect();
    f.from_coeffs(c).expect("degree-many coordinates")
}

/// Exponent over `Q(zeta_r)` with random coordinates and `c_1 != 0`.
fn random_exponent(r: usize, m: usize, rng: &mut ChaCha8Rng) -> Exponent {
    let f = Field::cyclotomic(r as u64);
    let n = m * r - r + 1;
    let mut c: Vec<Scalar> = (0..n).map(|_| random_scalar(&f, rng, 5)).collect();
    while n > 1 && c[1].is_zero() {
        c[1] = random_scalar(&f, rng, 5);
    }
    Exponent::new(r, m, c).expect("shape")
}

/// Orbit test written out: some `zeta^j` rescales `c_l` by `zeta^{jl}` below
/// the top coefficient, and the top coefficients differ by `Z / r`.
fn same_up_to_galois_and_dlog(a: &Exponent, b: &Exponent) -> bool {
    if a.r != b.r || a.m != b.m || a.c.len() != b.c.len() {
        return false;
    }
    let f = a.field();
    let zeta = f.root_of_unity(a.r as u64).expect("Q(zeta_r)");
    let top = a.c.len() - 1;
    let gap = (&b.c[top] - &a.c[top]).scale(&Q::from_integer(BigInt::from(a.r)));
    let integral = gap.as_rational().is_some_and(|x| x.is_integer());
    integral
        && (0..a.r).any(|j| {
            let zj = zeta.pow(j as u32);
            let mut s = f.one();
            (0..top).all(|l| {
                let ok = b.c[l] == &s * &a.c[l];
                s = &s * &zj;
                ok
            })
        })
}

fn criterion_1() -> Outcome {
    let mut seen = Vec::new();
    for r in 2..=5usize {
        for m in 2..=4usize {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + 10 * r as u64 + m as u64);
            let d = LocalRamifiedData::canonical(&random_exponent(r, m, &mut rng));
            let k = kernel_pi(&d).map_err(|e| format!("(r,m)=({r},{m}): {e}"))?;
            if k.length != r * (r - 1) / 2 {
                return Err(format!("(r,m)=({r},{m}): length {} != {}", k.length, r * (r - 1) / 2));
            }
            seen.push(k.length);
        }
    }
    Ok(format!("12 shapes, lengths {seen:?}"))
}

fn criterion_2() -> Outcome {
    let mut count = 0;
    for r in [2usize, 3] {
        for m in [2usize, 3, 4] {
            let mut rng = ChaCha8Rng::seed_from_u64(2000 + 10 * r as u64 + m as u64);
            for i in 0..100 {
                let nu = random_exponent(r, m, &mut rng);
                let back = recover_exponent(&pushforward_ramified(&nu, default_buffer()))
                    .map_err(|e| format!("(r,m)=({r},{m}) sample {i}: {e}"))?;
                if !same_up_to_galois_and_dlog(&nu, &back) {
                    return Err(format!("(r,m)=({r},{m}) sample {i}: {:?} vs {:?}", nu.c, back.c));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} round trips"))
}

fn criterion_3() -> Outcome {
    let mut count = 0;
    for (r, m) in [(2usize, 2usize), (2, 3), (3, 2)] {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + 10 * r as u64 + m as u64);
        for i in 0..50 {
            let base = LocalRamifiedData::canonical(&random_exponent(r, m, &mut rng));
            let d = gauge_randomize(&base, &mut rng).map_err(|e| format!("gauge: {e}"))?;
            let rep = reconstruct_check(&d, &mut rng, 2).map_err(|e| format!("(r,m)=({r},{m}) sample {i}: {e}"))?;
            if !(rep.verdict && rep.exponent_match && rep.claim_holds) {
                return Err(format!("(r,m)=({r},{m}) sample {i}: {:?}", rep.claim_witness));
            }
            count += 1;
        }
    }
    Ok(format!("{count} gauged instances"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4000);
    for i in 0..1000 {
        let g = rng.gen_range(0..=4i64);
        let r = rng.gen_range(1..=6i64);
        let n = rng.gen_range(1..=4usize);
        let ms: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
        let blocks: Vec<Vec<i64>> = (0..n)
            .map(|_| {
                let mut left = r;
                let mut b = Vec::new();
                while left > 0 {
                    let s = rng.gen_range(1..=left);
                    b.push(s);
                    left -= s;
                }
                b
            })
            .collect();
        let expected = 2 * r * r * (g - 1) + 2 + ms.iter().map(|m| (r * r - r) * m).sum::<i64>();
        let chars = euler_chars(g, r, &ms, &blocks).map_err(|e| format!("tuple {i}: {e}"))?;
        let dim = dimension(g, r, &ms);
        if chars.dim_h1 != expected || dim != expected || expected % 2 != 0 {
            return Err(format!("tuple {i} (g={g}, r={r}, m={ms:?}, blocks={blocks:?}): chi {} dim {dim} formula {expected}", chars.dim_h1));
        }
    }
    Ok("1000 tuples, all even".into())
}

fn rank_two_model() -> GlobalConnection {
    let f = Field::rationals();
    let numerators = vec![vec![poly(&f, &[0, 0, 1]), poly(&f, &[1, 0, 2, 1])], vec![poly(&f, &[0, 1]), poly(&f, &[0, 0, 0, 1])]];
    let spec = PoleSpec { position: Position::Finite(f.zero()), m: 4, block_sizes: vec![2], weights: vec![q(1, 2)] };
    GlobalConnection::from_matrix(f, vec![0, -1], numerators, vec![spec]).expect("model")
}

fn criterion_5() -> Outcome {
    let gc = rank_two_model();
    let ts = tangent_space(&gc, None).map_err(|e| e.to_string())?;
    if ts.dimension != 2 {
        return Err(format!("dimension {}", ts.dimension));
    }
    if ts.certificate.len() != 3 || ts.certificate.iter().any(|&(_, d)| d != 2) {
        return Err(format!("certificate {:?}", ts.certificate));
    }
    for x in &ts.basis {
        if !x.is_cocycle(&gc).map_err(|e| e.to_string())? {
            return Err("basis element is not a cocycle".into());
        }
    }
    let b = &ts.basis;
    for i in 0..b.len() {
        for j in 0..b.len() {
            let xy = symplectic_pair(&b[i], &b[j]).map_err(|e| e.to_string())?;
            let yx = symplectic_pair(&b[j], &b[i]).map_err(|e| e.to_string())?;
            if !(&xy + &yx).is_zero() || (i == j && !xy.is_zero()) {
                return Err(format!("not skew at ({i},{j})"));
            }
        }
    }
    let pm = pairing_matrix(b).map_err(|e| e.to_string())?;
    let rank = linalg::rank(&pm, pm.len());
    if rank != 2 {
        return Err(format!("pairing rank {rank}"));
    }
    Ok(format!("dim 2, certificate {:?}, skew, rank 2", ts.certificate))
}

fn criterion_6() -> Outcome {
    let suite = mutation_suite();
    if suite.len() != 20 {
        return Err(format!("suite has {} mutations", suite.len()));
    }
    for (i, mu) in suite.iter().enumerate() {
        let failed = mu.data.verify().failed().into_iter().map(str::to_string).collect::<Vec<_>>();
        if failed != [mu.expected_check.to_string()] {
            return Err(format!("mutation {i} ({:?}) flagged {failed:?}, expected [{}]", mu.kind, mu.expected_check));
        }
    }
    Ok("20 mutations, each flagged alone".into())
}

fn criterion_7() -> Outcome {
    let (fb, points) = standard_grid();
    let f = fb.field().clone();
    let zeta = f.root_of_unity(fb.r as u64).expect("Q(i)");
    let series = |x: &Scalar| -> Scalar {
        let mut s = f.zero();
        for (l, c) in fb.c.iter().enumerate() {
            s = &s + &(c * &x.pow(l as u32));
        }
        s
    };
    let mut counts = [0usize; 3];
    let mut nilpotent = 0;
    if points.len() != 12 {
        return Err(format!("{} grid points", points.len()));
    }
    for (t, h) in &points {
        let fiber = specialize(&fb, t, h).map_err(|e| format!("({t}, {h}): {e}"))?;
        let here = format!("({}, {})", t.render(), h.render());
        match (&fiber, t.is_zero(), h.is_zero()) {
            (Fiber::Ramified { chain }, true, true) => {
                if chain.len() != fb.r || chain[0].c != fb.c {
                    return Err(format!("{here}: wrong chain"));
                }
                counts[0] += 1;
            }
            (Fiber::Unramified { leading, distinct }, false, true) => {
                let oracle: Vec<Scalar> = (0..fb.r).map(|k| series(&(&zeta.pow(k as u32) * t))).collect();
                let pairwise = (0..oracle.len()).all(|i| (0..i).all(|j| oracle[i] != oracle[j]));
                if *leading != oracle || !distinct || !pairwise {
                    return Err(format!("{here}: leading coefficients"));
                }
                counts[1] += 1;
            }
            (Fiber::RegularSingular { points: rs }, _, false) => {
                for p in rs {
                    let target = &t.pow(fb.r as u32) + &(h * &fb.kappa[p.q]);
                    if p.b.pow(fb.r as u32) != target {
                        return Err(format!("{here}: b_{} is not an r-th root", p.q));
                    }
                    if let ResidueKind::Nilpotent { beta, minimal_polynomial, full_degree } = &p.kind {
                        // Residue of dz / z_0 z_1 at a_1 = h kappa_1 is 1 / (h kappa_1).
                        let a1 = h * &fb.kappa[p.q];
                        let oracle_beta = &fb.c[0] * &a1.inv().map_err(|e| e.to_string())?;
                        let oracle_min = Poly::new(&f, vec![-&oracle_beta, f.one()]).pow(fb.r);
                        if !target.is_zero() || *beta != oracle_beta || *minimal_polynomial != oracle_min || !full_degree {
                            return Err(format!("{here}: nilpotent residue"));
                        }
                        nilpotent += 1;
                    } else if p.q > 0 && target.is_zero() {
                        return Err(format!("{here}: b = 0 without nilpotent residue"));
                    }
                }
                counts[2] += 1;
            }
            _ => return Err(format!("{here}: classified as {}", fiber.label())),
        }
    }
    if counts != [1, 4, 7] || nilpotent != 2 {
        return Err(format!("counts {counts:?}, nilpotent points {nilpotent}"));
    }
    Ok(format!("12 points: 1 ramified, 4 unramified, 7 regular singular ({nilpotent} nilpotent)"))
}

/// Rank two on `O + O(-1)`, one pole of order 4 at 0, leading term
/// nilpotent with `z` in the lower-left entry so that `c_1 != 0`.
fn random_rank_two(rng: &mut ChaCha8Rng) -> GlobalConnection {
    let f = Field::rationals();
    let mut c = |lo: i64, hi: i64| rng.gen_range(lo..=hi);
    let nz = |x: i64| if x == 0 { 1 } else { x };
    // c_1^2 is a01(0) a10'(0); keep it a square so the exponent stays over Q.
    let (s, t) = (nz(c(-3, 3)), nz(c(-2, 2)));
    let a00 = vec![0, c(-3, 3), c(-3, 3)];
    let a01 = vec![s, c(-3, 3), c(-3, 3), c(-3, 3)];
    let a10 = vec![0, s * t * t];
    // The z^3 coefficient of a11 cancels the residue of the O(-1) frame at infinity.
    let a11 = vec![0, c(-3, 3), c(-3, 3), 1];
    let numerators = vec![vec![poly(&f, &a00), poly(&f, &a01)], vec![poly(&f, &a10), poly(&f, &a11)]];
    let spec = PoleSpec { position: Position::Finite(f.zero()), m: 4, block_sizes: vec![2], weights: vec![q(1, 2)] };
    GlobalConnection::from_matrix(f, vec![0, -1], numerators, vec![spec]).expect("single ramified block")
}

fn split_example() -> GlobalConnection {
    let f = Field::rationals();
    let a = vec![vec![Poly::constant(&f.rat(1, 3)), poly(&f, &[0, 1])], vec![Poly::zero(&f), Poly::constant(&f.rat(-1, 4))]];
    let specs = vec![
        PoleSpec { position: Position::Finite(f.zero()), m: 1, block_sizes: vec![1, 1], weights: vec![q(1, 5), q(3, 5)] },
        PoleSpec { position: Position::Infinity, m: 1, block_sizes: vec![1, 1], weights: vec![q(1, 10), q(7, 10)] },
    ];
    GlobalConnection::from_matrix(f, vec![0, -2], a, specs).expect("split example")
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8000);
    let mut instances = vec![rank_two_model()];
    instances.extend((0..20).map(|_| random_rank_two(&mut rng)));
    for (i, gc) in instances.iter().enumerate() {
        let rep = gc.check();
        if !rep.all_pass() {
            return Err(format!("instance {i} is not valid: {:?}", rep.failed()));
        }
        if gc.poles.len() != 1 || gc.poles[0].blocks.len() != 1 || !gc.poles[0].blocks[0].nu[0].generic_c1() {
            return Err(format!("instance {i} is not a single generic ramified block"));
        }
        match is_stable(gc).map_err(|e| e.to_string())? {
            StabilityVerdict::AutoStable { .. } => {}
            v => return Err(format!("instance {i}: {v:?}")),
        }
    }
    let split = split_example();
    if !split.check().all_pass() {
        return Err("split example is not valid".into());
    }
    match is_stable(&split).map_err(|e| e.to_string())? {
        StabilityVerdict::Unstable { witness } if witness.degree == 0 && witness.sub_slope == "3/10" => {}
        v => return Err(format!("split example: {v:?}")),
    }
    Ok(format!("{} auto-stable instances, split example unstable", instances.len()))
}

/// Exponent set with random blocks whose first block is shifted so that the
/// Fuchs relation holds.
fn random_valid_set(rng: &mut ChaCha8Rng) -> ExponentSet {
    let r = rng.gen_range(1..=4usize);
    let f = Field::cyclotomic([1u64, 3, 4][rng.gen_range(0..3)]);
    let npoles = rng.gen_range(1..=3);
    let a = rng.gen_range(-4..=4i64);
    let mut poles = Vec::new();
    for _ in 0..npoles {
        let m = rng.gen_range(1..=4usize);
        let mut left = r;
        let mut blocks = Vec::new();
        while left > 0 {
            let rj = rng.gen_range(1..=left);
            left -= rj;
            let n = m * rj - rj + 1;
            let c = (0..n).map(|_| random_scalar(&f, rng, 4)).collect();
            let nu = Exponent::new(rj, m, c).expect("shape");
            blocks.push((0..rj as i64).map(|k| nu.shift_dlog(k)).collect::<Vec<_>>());
        }
        poles.push(PoleExponents { m, blocks });
    }
    // Block of size r_j contributes r_j c_top + (r_j - 1)/2.
    let mut s = f.from_int(a);
    for p in &poles {
        for b in &p.blocks {
            let rj = b.len() as i64;
            s = &s + &(&b[0].c[b[0].c.len() - 1] * &f.from_int(rj));
            s = &s + &f.rat(rj - 1, 2);
        }
    }
    let block = &mut poles[0].blocks[0];
    let rj = block.len() as i64;
    let delta = s.scale(&q(-1, rj));
    for nu in block.iter_mut() {
        let top = nu.c.len() - 1;
        nu.c[top] = &nu.c[top] + &delta;
    }
    ExponentSet { a, poles }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9000);
    for i in 0..100 {
        let set = random_valid_set(&mut rng);
        let rep = validate_exponent_set(&set);
        if !rep.all_pass() {
            return Err(format!("input {i} does not validate: {:?}", rep.failed()));
        }
        let det = det_exponents(&set).map_err(|e| format!("input {i}: {e}"))?;
        let rep = validate_exponent_set(&det);
        if !rep.all_pass() {
            return Err(format!("det of input {i} rejected: {:?}", rep.failed()));
        }
        // Rank one: a + r * c_top over all poles vanishes.
        let f = det.field().expect("nonempty").clone();
        let mut s = f.from_int(det.a);
        for p in &det.poles {
            s = &s + &p.blocks[0][0].c[p.m - 1];
        }
        if !s.is_zero() {
            return Err(format!("det of input {i}: Fuchs sum {s}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9001);
    let mut conns = vec![rank_two_model(), split_example()];
    conns.extend((0..5).map(|_| random_rank_two(&mut rng)));
    for (i, gc) in conns.iter().enumerate() {
        let (det, set) = det_connection(gc).map_err(|e| format!("connection {i}: {e}"))?;
        if !validate_exponent_set(&set).all_pass() || !det.check().all_pass() {
            return Err(format!("connection {i}: determinant rejected"));
        }
        // Trace of the matrix against the trace of the exponents.
        if det_exponents(&gc.exponent_set()).map_err(|e| e.to_string())? != set {
            return Err(format!("connection {i}: the two determinant routes disagree"));
        }
    }
    Ok(format!("100 exponent sets and {} connections", conns.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("kernel length r(r-1)/2", criterion_1),
        ("exponent round trip", criterion_2),
        ("reconstruction", criterion_3),
        ("dimension identity", criterion_4),
        ("tangent space of the rank-two model", criterion_5),
        ("mutation suite", criterion_6),
        ("degeneration trichotomy", criterion_7),
        ("auto-stability", criterion_8),
        ("determinant exponent sets", criterion_9),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (tag, detail) = match outcome {
            Ok(d) if elapsed < LIMIT => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {elapsed:.1?}, limit {LIMIT:?}")),
            Err(d) => ("FAIL", d),
        };
        if tag == "FAIL" {
            failures += 1;
        }
        println!("criterion {}: {tag} {name} [{:.2}s] {detail}", i + 1, elapsed.as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
