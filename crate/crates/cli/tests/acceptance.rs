//! One PASS/FAIL line per acceptance criterion. Criteria listed in
//! `KNOWN_UNMET` are reported but do not fail the run.

use std::time::{Duration, Instant};

use nilnike::commands::{bench_rows, BenchRow};
use nilnike::config::{rng_for, RunConfig, Settings};
use nilnike_core::attacks::{
    attack_heisenberg_linear, attack_quaternion_linear, cdh_from_eavesdropper, eavesdrop_generic, pohlig_hellman,
    DEFAULT_BUDGET,
};
use nilnike_core::cyclic::CyclicTripleGroup;
use nilnike_core::group::{brute_force_slot_kernel, order_p_power, pow, pow_nat, prime_power};
use nilnike_core::heisenberg::HeisenbergGroup;
use nilnike_core::numtheory::ceil_sqrt;
use nilnike_core::protocol::{derive_key, run_exchange, setup, ProtocolParams};
use nilnike_core::quaternion::{pow_layer_formula, sample_s_element, QuatParams, QuaternionPlatform};
use nilnike_core::verify::{commutator_levels, layer_exponent, p_power_shift};
use nilnike_core::{Group, Platform};
use num_bigint::{BigInt, BigUint, RandBigInt};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

const KNOWN_UNMET: &[u32] = &[7];

type Check = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Check);

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn heis(p: u64, m: usize) -> HeisenbergGroup {
    HeisenbergGroup::new(big(p), m).unwrap()
}

fn cyc(p: u64, alpha: u32) -> CyclicTripleGroup {
    CyclicTripleGroup::new(big(p), alpha).unwrap()
}

fn quat(p: u64, alpha: u32, n: usize) -> QuaternionPlatform {
    QuaternionPlatform::new(QuatParams::new(big(p), alpha, n).unwrap()).unwrap()
}

fn agree<P: Platform>(platform: P, n: usize, rng: &mut ChaCha20Rng, label: &str) -> Result<(), String> {
    let params = setup(platform, n, rng, 64).map_err(|e| format!("{label}: {e}"))?;
    let (keys, t) = run_exchange(&params, rng);
    let first = derive_key(&params, &keys[0], &t).map_err(|e| e.to_string())?;
    for k in &keys[1..] {
        let other = derive_key(&params, k, &t).map_err(|e| e.to_string())?;
        ensure(params.platform.same(&first, &other), || {
            format!("{label}: user {} disagrees", k.j)
        })?;
    }
    Ok(())
}

fn protocol_correctness() -> Check {
    let start = Instant::now();
    let mut rng = rng_for(1, 0);
    let heis_points = [
        (5, 1),
        (5, 3),
        (101, 1),
        (101, 3),
        (2_147_483_647, 1),
        (2_147_483_647, 3),
    ];
    let quat_points: Vec<(u64, u32, usize)> = [5, 7]
        .into_iter()
        .flat_map(|p| (1..=3).flat_map(move |a| (1..=5).map(move |n| (p, a, n))))
        .collect();
    for i in 0..100 {
        let (p, m) = heis_points[i % heis_points.len()];
        agree(heis(p, m), 2, &mut rng, &format!("heisenberg p={p} m={m}"))?;
        let alpha = 1 + (i % 4) as u32;
        agree(cyc(3, alpha), 2, &mut rng, &format!("cyclic-triple alpha={alpha}"))?;
        let (p, a, n) = quat_points[i % quat_points.len()];
        agree(quat(p, a, n), n, &mut rng, &format!("quaternion p={p} alpha={a} n={n}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("300 instances agree in {:.1}s", elapsed.as_secs_f64()))
}

fn kernel_index<P: Platform>(platform: P, n: usize, rng: &mut ChaCha20Rng, label: &str) -> Result<(), String> {
    let params = setup(platform, n, rng, 64).map_err(|e| e.to_string())?;
    let g = &params.platform;
    let alpha = order_p_power(g, &params.c, g.prime(), 64).map_err(|e| e.to_string())?;
    let order = prime_power(g.prime(), alpha);
    for slot in 0..n {
        let index = brute_force_slot_kernel(g, &params.generators, slot, 1 << 16).map_err(|e| e.to_string())?;
        ensure(big(index as u64) == order, || {
            format!("{label} slot {slot}: index {index}, |c| = {order}")
        })?;
    }
    Ok(())
}

fn slot_kernel() -> Check {
    let mut rng = rng_for(2, 0);
    let mut count = 0;
    for p in [3, 5, 7, 11, 13] {
        for m in 1..=2 {
            for _ in 0..3 {
                kernel_index(heis(p, m), 2, &mut rng, &format!("heisenberg p={p} m={m}"))?;
                count += 1;
            }
        }
    }
    for (p, alpha) in [(3, 1), (3, 2), (3, 3), (3, 4), (5, 1), (5, 2), (7, 1)] {
        for _ in 0..3 {
            kernel_index(
                cyc(p, alpha),
                2,
                &mut rng,
                &format!("cyclic-triple p={p} alpha={alpha}"),
            )?;
            count += 1;
        }
    }
    Ok(format!("{count} instances, index = |c| in every slot"))
}

fn oracle_equivalence() -> Check {
    let mut rng = rng_for(3, 0);
    let e = |rng: &mut ChaCha20Rng| BigInt::from(rng.gen_range(-1_000_000_000i64..1_000_000_000));
    let h = heis(101, 3);
    let c = cyc(3, 4);
    for _ in 0..1000 {
        let (x, a) = (h.random_element(&mut rng), e(&mut rng));
        ensure(h.pow_closed_form(&x, &a) == pow(&h, &x, &a), || {
            format!("heisenberg power, a={a}")
        })?;
        let (x, a) = (c.random_element(&mut rng), e(&mut rng));
        ensure(c.pow_closed_form(&x, &a) == pow(&c, &x, &a), || {
            format!("cyclic-triple power, a={a}")
        })?;
    }
    let q = QuatParams::new(big(7), 2, 3).unwrap();
    let g = QuaternionPlatform::new(q.clone()).unwrap();
    let i0 = q.base_layer();
    for trial in 0..1000u64 {
        let k = 1 + trial % 3;
        let x = sample_s_element(&q, k * i0, &mut rng).map_err(|e| e.to_string())?;
        let m = e(&mut rng);
        let formula = pow_layer_formula(&q, &x, &m, k).map_err(|e| e.to_string())?;
        let exact = q.reduce_to_layer(&pow(&g, &x.q, &m), (k + 1) * i0);
        ensure(formula == exact, || format!("quaternion layer formula, k={k}, m={m}"))?;
    }
    Ok("3 x 1000 inputs agree".into())
}

fn valuation_suite() -> Check {
    let mut rng = rng_for(4, 0);
    let q = QuatParams::new(big(7), 2, 3).unwrap();
    let top = q.saturation();
    let mut lines = Vec::new();
    for k in 1..4u64 {
        for l in 1..4u64 {
            if k + l < top {
                let s = commutator_levels(&q, k, l, 100, &mut rng).map_err(|e| e.to_string())?;
                ensure(s.bound_held == s.trials, || {
                    format!("commutator below {} ({}/{})", k + l, s.bound_held, s.trials)
                })?;
            }
        }
        if k + 2 < top {
            let s = p_power_shift(&q, k, 100, &mut rng).map_err(|e| e.to_string())?;
            ensure(s.bound_held == s.trials, || {
                format!("p-th power of level {k} below {}", k + 2)
            })?;
        }
    }
    for k in 1..=q.class() as u64 {
        let s = layer_exponent(&q, k, 200, &mut rng).map_err(|e| e.to_string())?;
        ensure(s.bound_held == s.trials, || {
            format!("layer {k}: bound held {}/{}", s.bound_held, s.trials)
        })?;
        ensure(2 * s.generic >= s.trials, || {
            format!("layer {k}: generic {}/{}", s.generic, s.trials)
        })?;
        lines.push(format!("layer {k} generic {}/{}", s.generic, s.trials));
    }
    Ok(lines.join(", "))
}

fn pohlig_hellman_bound() -> Check {
    let mut rng = rng_for(5, 0);
    let mut slowest = Duration::ZERO;
    let mut count = 0;
    for p in [3u64, 101, 65_521, 1_048_573] {
        for alpha in 1..=4u32 {
            let g = cyc(p, alpha);
            let base = g.element(1, 0, 0);
            let order = prime_power(g.p(), alpha);
            let bound = 2 * alpha as u64 * (ceil_sqrt(g.p()).to_string().parse::<u64>().unwrap() + 2);
            for _ in 0..5 {
                let x = rng.gen_biguint_below(&order);
                let target = pow_nat(&g, &base, &x);
                let start = Instant::now();
                let r = pohlig_hellman(&g, &base, &target, g.p(), alpha).map_err(|e| e.to_string())?;
                slowest = slowest.max(start.elapsed());
                ensure(r.exponent == x, || {
                    format!("p={p} alpha={alpha}: got {} for {x}", r.exponent)
                })?;
                ensure(r.bsgs_ops <= bound, || {
                    format!("p={p} alpha={alpha}: {} ops > {bound}", r.bsgs_ops)
                })?;
                count += 1;
            }
        }
    }
    ensure(slowest < Duration::from_secs(5), || {
        format!("slowest instance {slowest:?}")
    })?;
    Ok(format!(
        "{count} exponents recovered, slowest {:.0} ms",
        slowest.as_secs_f64() * 1e3
    ))
}

fn sound<P: Platform>(
    params: &ProtocolParams<P>,
    rng: &mut ChaCha20Rng,
    linear: Option<LinearFn<P>>,
    label: &str,
) -> Result<(), String> {
    let (keys, t) = run_exchange(params, rng);
    let honest = derive_key(params, &keys[0], &t).map_err(|e| e.to_string())?;
    let g = &params.platform;
    let generic = eavesdrop_generic(params, &t, DEFAULT_BUDGET).map_err(|e| format!("{label}: {e}"))?;
    ensure(g.encode(&generic.key) == g.encode(&honest), || {
        format!("{label}: generic key differs")
    })?;
    if let Some(f) = linear {
        let r = f(params, &t).map_err(|e| format!("{label}: {e}"))?;
        ensure(g.encode(&r.key) == g.encode(&honest), || {
            format!("{label}: linear key differs")
        })?;
    }
    Ok(())
}

fn attack_soundness() -> Check {
    let mut rng = rng_for(6, 0);
    let quat_points: Vec<(u64, u32, usize)> = [5, 7, 101]
        .into_iter()
        .flat_map(|p| (1..=3).flat_map(move |a| (1..=4).map(move |n| (p, a, n))))
        .collect();
    for i in 0..100 {
        let p = [5, 101, 65_521][i % 3];
        let params = setup(heis(p, 1 + i % 2), 2, &mut rng, 64).map_err(|e| e.to_string())?;
        sound(
            &params,
            &mut rng,
            Some(attack_heisenberg_linear),
            &format!("heisenberg p={p}"),
        )?;
        let alpha = 1 + (i % 4) as u32;
        let params = setup(cyc(3, alpha), 2, &mut rng, 64).map_err(|e| e.to_string())?;
        sound(&params, &mut rng, None, &format!("cyclic-triple alpha={alpha}"))?;
        let (p, a, n) = quat_points[i % quat_points.len()];
        let params = setup(quat(p, a, n), n, &mut rng, 64).map_err(|e| e.to_string())?;
        sound(
            &params,
            &mut rng,
            Some(attack_quaternion_linear),
            &format!("quaternion p={p} alpha={a} n={n}"),
        )?;
    }
    Ok("100 instances per platform, every attack matches".into())
}

fn bench(settings: &[(&str, &str)]) -> Vec<BenchRow> {
    let s: Settings = settings.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    bench_rows(&RunConfig::from_settings(&s, None).unwrap()).unwrap()
}

fn ops(rows: &[BenchRow], algorithm: &str) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.algorithm == algorithm)
        .map(|r| r.ops)
        .collect()
}

fn complexity_separation() -> Check {
    let grid = [
        ("grid", "101,401,1601"),
        ("trials", "200"),
        ("seed", "7"),
        ("no-timing", "true"),
    ];
    let heis_rows = bench(&[&grid[..], &[("platform", "heisenberg")]].concat());
    let quat_rows = bench(&[&grid[..], &[("platform", "quaternion"), ("alpha", "1")]].concat());
    let mut failures = Vec::new();

    let generic = ops(&heis_rows, "generic");
    let ratios: Vec<f64> = generic.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.iter().any(|r| !(1.5..=3.0).contains(r)) {
        failures.push("generic step ratio outside [1.5, 3]".to_string());
    }
    for (alg, rows) in [("heisenberg-linear", &heis_rows), ("quaternion-linear", &quat_rows)] {
        let v = ops(rows, alg);
        let spread = v.iter().cloned().fold(f64::MIN, f64::max) / v.iter().cloned().fold(f64::MAX, f64::min);
        if spread >= 2.0 {
            failures.push(format!("{alg} spread {spread:.2}"));
        }
    }

    let p61 = (1u64 << 61) - 1;
    let mut rng = rng_for(7, 1);
    let mut big_detail = Vec::new();
    let h = setup(heis(p61, 1), 2, &mut rng, 64).unwrap();
    let q = setup(quat(p61, 1, 2), 2, &mut rng, 64).unwrap();
    for (label, refused, millis) in [
        large_prime(&h, &mut rng, attack_heisenberg_linear),
        large_prime(&q, &mut rng, attack_quaternion_linear),
    ] {
        if !refused {
            failures.push(format!("{label}: generic attack not refused"));
        }
        if millis >= 100.0 {
            failures.push(format!("{label}: linear attack took {millis:.1} ms"));
        }
        big_detail.push(format!("{label} linear {millis:.2} ms"));
    }

    let detail = format!(
        "generic ops {generic:.1?} (step ratios {ratios:.3?}), linear ops {:.1?} / {:.1?}, 61-bit: {}",
        ops(&heis_rows, "heisenberg-linear"),
        ops(&quat_rows, "quaternion-linear"),
        big_detail.join(", ")
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", failures.join("; ")))
    }
}

type LinearFn<P> = fn(
    &ProtocolParams<P>,
    &nilnike_core::protocol::Transcript<<P as Group>::Element>,
) -> nilnike_core::Result<nilnike_core::attacks::AttackReport<<P as Group>::Element>>;

/// Returns (family, generic refused, linear millis); the linear key must match.
fn large_prime<P: Platform>(
    params: &ProtocolParams<P>,
    rng: &mut ChaCha20Rng,
    linear: LinearFn<P>,
) -> (&'static str, bool, f64) {
    let (keys, t) = run_exchange(params, rng);
    let honest = derive_key(params, &keys[0], &t).unwrap();
    let refused = matches!(
        eavesdrop_generic(params, &t, DEFAULT_BUDGET),
        Err(nilnike_core::Error::BudgetExceeded { .. })
    );
    let start = Instant::now();
    let r = linear(params, &t).unwrap();
    let millis = start.elapsed().as_secs_f64() * 1e3;
    assert!(params.platform.same(&r.key, &honest));
    (params.platform.descriptor().family(), refused, millis)
}

fn cdh_one<P: Platform>(params: &ProtocolParams<P>, rng: &mut ChaCha20Rng) -> Result<(), String> {
    let g = &params.platform;
    for _ in 0..100 {
        let x = rng.gen_biguint_below(&params.key_order);
        let y = rng.gen_biguint_below(&params.key_order);
        let c_x = pow_nat(g, &params.c, &x);
        let c_y = pow_nat(g, &params.c, &y);
        let got = cdh_from_eavesdropper(params, &c_x, &c_y, (&x, &y), |p, t| {
            eavesdrop_generic(p, t, DEFAULT_BUDGET)
        })
        .map_err(|e| e.to_string())?;
        let want = pow_nat(g, &params.c, &((&x * &y) % &params.key_order));
        ensure(g.same(&got, &want), || {
            format!("{}: x={x} y={y}", g.descriptor().summary())
        })?;
    }
    Ok(())
}

fn cdh_harness() -> Check {
    let mut rng = rng_for(8, 0);
    cdh_one(&setup(heis(101, 2), 2, &mut rng, 64).unwrap(), &mut rng)?;
    cdh_one(&setup(cyc(5, 3), 2, &mut rng, 64).unwrap(), &mut rng)?;
    cdh_one(&setup(quat(7, 2, 3), 3, &mut rng, 64).unwrap(), &mut rng)?;
    Ok("100 pairs per platform".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "protocol correctness", protocol_correctness),
        (2, "slot kernel index", slot_kernel),
        (3, "oracle equivalence", oracle_equivalence),
        (4, "valuation suite", valuation_suite),
        (5, "pohlig-hellman", pohlig_hellman_bound),
        (6, "attack soundness", attack_soundness),
        (7, "complexity separation", complexity_separation),
        (8, "cdh harness", cdh_harness),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let result = run();
        let (verdict, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        let note = if result.is_err() && KNOWN_UNMET.contains(&id) {
            " (known unmet)"
        } else {
            ""
        };
        println!("criterion {id} {verdict}{note}: {name}: {detail}");
        if result.is_err() && !KNOWN_UNMET.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
