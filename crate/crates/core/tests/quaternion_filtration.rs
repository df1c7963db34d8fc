use nilnike_core::group::{commutator, pow};
use nilnike_core::quaternion::{
    conj, level, pow_layer_formula, quat_mul, sample_s_element, MulTable, QuatParams, Quaternion, QuaternionPlatform,
};
use nilnike_core::verify::{commutator_levels, layer_exponent, p_power_shift};
use num_bigint::{BigInt, RandBigInt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn random(q: &QuatParams, rng: &mut ChaCha20Rng) -> Quaternion {
    Quaternion {
        coords: core::array::from_fn(|_| rng.gen_biguint_below(q.modulus())),
    }
}

#[test]
fn algebra_laws_on_random_triples() {
    let q = QuatParams::new(7u32.into(), 2, 2).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let (x, y, z) = (random(&q, &mut rng), random(&q, &mut rng), random(&q, &mut rng));
        assert_eq!(
            quat_mul(&q, &quat_mul(&q, &x, &y), &z),
            quat_mul(&q, &x, &quat_mul(&q, &y, &z))
        );
        assert_eq!(
            conj(&q, &quat_mul(&q, &x, &y)),
            quat_mul(&q, &conj(&q, &y), &conj(&q, &x))
        );
    }
}

#[test]
fn commutators_respect_the_filtration() {
    let q = QuatParams::custom(5u32.into(), 2u32.into(), 10, 1, 1, MulTable::standard()).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    for k in 1..=4 {
        for l in 1..=4 {
            let s = commutator_levels(&q, k, l, 200, &mut rng).unwrap();
            assert_eq!(s.bound_held, s.trials, "k={k} l={l}");
            if k % 2 == 1 {
                assert!(2 * s.generic >= s.trials, "k={k} l={l}: {}/{}", s.generic, s.trials);
            }
        }
    }
}

#[test]
fn p_th_powers_shift_by_two() {
    let q = QuatParams::custom(7u32.into(), 3u32.into(), 10, 1, 1, MulTable::standard()).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for k in 1..=6 {
        let s = p_power_shift(&q, k, 200, &mut rng).unwrap();
        assert_eq!(s.bound_held, s.trials);
        assert!(2 * s.generic >= s.trials, "k={k}");
    }
}

#[test]
fn layer_factors_have_exponent_p_alpha() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for (p, alpha, n) in [(5u32, 2u32, 3usize), (7, 3, 2), (11, 1, 4)] {
        let q = QuatParams::new(p.into(), alpha, n).unwrap();
        for k in 1..=n as u64 {
            let s = layer_exponent(&q, k, 200, &mut rng).unwrap();
            assert_eq!(s.bound_held, s.trials);
            assert!(2 * s.generic >= s.trials, "p={p} alpha={alpha} k={k}");
        }
    }
}

#[test]
fn layer_formula_matches_exponentiation() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    for (p, alpha) in [(5u32, 1u32), (7, 2), (13, 3)] {
        let q = QuatParams::new(p.into(), alpha, 3).unwrap();
        let g = QuaternionPlatform::new(q.clone()).unwrap();
        let i0 = q.base_layer();
        for k in 1..=3u64 {
            for _ in 0..1000 {
                let x = sample_s_element(&q, k * i0, &mut rng).unwrap();
                let m = BigInt::from(rng.gen_range(-(1i64 << 40)..(1i64 << 40)));
                let exact = q.reduce_to_layer(&pow(&g, &x.q, &m), (k + 1) * i0);
                assert_eq!(
                    pow_layer_formula(&q, &x, &m, k).unwrap(),
                    exact,
                    "p={p} alpha={alpha} k={k}"
                );
            }
        }
    }
}

#[test]
fn commutator_of_level_one_elements_is_level_two() {
    let q = QuatParams::new(5u32.into(), 1, 1).unwrap();
    let g = QuaternionPlatform::new(q.clone()).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let x = sample_s_element(&q, 1, &mut rng).unwrap().q;
    let y = sample_s_element(&q, 1, &mut rng).unwrap().q;
    assert!(level(&q, &commutator(&g, &x, &y)).at_least(2));
}
