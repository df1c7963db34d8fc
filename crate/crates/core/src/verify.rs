//! Named invariant suites, runnable at arbitrary parameters.
//!
//! Each suite returns the first violation it finds. [`run_all`] stops at the
//! first failing suite so callers can report it by name.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::attacks::{
    attack_heisenberg_linear, attack_quaternion_linear, eavesdrop_generic, pohlig_hellman, DEFAULT_BUDGET,
};
use crate::cyclic::CyclicTripleGroup;
use crate::group::{brute_force_slot_kernel, commutator, order_p_power, pow, pow_nat, Group};
use crate::heisenberg::HeisenbergGroup;
use crate::numtheory::Valuation;
use crate::platform::Platform;
use crate::protocol::{derive_key, run_exchange, setup};
use crate::quaternion::{
    conj, equal_mod_layer, level, pow_layer_formula, quat_mul, sample_s_element, MulTable, QuatParams, Quaternion,
    QuaternionPlatform,
};
use crate::Result;

pub const SUITES: &[&str] = &[
    "quaternion-relations",
    "group-laws",
    "closed-forms",
    "slot-kernel",
    "quaternion-layer-formula",
    "valuation-filtration",
    "protocol-consistency",
    "pohlig-hellman",
    "attack-soundness",
];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub heis_p: BigUint,
    pub heis_m: usize,
    pub cyc_p: BigUint,
    pub cyc_alpha: u32,
    pub quat_p: BigUint,
    pub quat_alpha: u32,
    pub quat_n: usize,
    /// Highest layer `k` checked by the layer formula suite.
    pub layer_k_max: u64,
    pub trials: usize,
    pub table: MulTable,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            heis_p: BigUint::from(101u32),
            heis_m: 2,
            cyc_p: BigUint::from(3u32),
            cyc_alpha: 3,
            quat_p: BigUint::from(7u32),
            quat_alpha: 2,
            quat_n: 3,
            layer_k_max: 3,
            trials: 50,
            table: MulTable::standard(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub suite: &'static str,
    pub detail: String,
}

type SuiteResult = core::result::Result<(), String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> SuiteResult {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn lift<T>(r: Result<T>) -> core::result::Result<T, String> {
    r.map_err(|e| format!("{e}"))
}

impl VerifyConfig {
    fn heis(&self) -> core::result::Result<HeisenbergGroup, String> {
        lift(HeisenbergGroup::new(self.heis_p.clone(), self.heis_m))
    }
    fn cyc(&self) -> core::result::Result<CyclicTripleGroup, String> {
        lift(CyclicTripleGroup::new(self.cyc_p.clone(), self.cyc_alpha))
    }
    fn quat_params(&self, class: usize) -> core::result::Result<QuatParams, String> {
        let base = lift(QuatParams::new(self.quat_p.clone(), self.quat_alpha, class))?;
        lift(QuatParams::custom(
            base.p().clone(),
            base.t().clone(),
            base.precision(),
            self.quat_alpha,
            class,
            self.table.clone(),
        ))
    }
    fn quat(&self) -> core::result::Result<QuaternionPlatform, String> {
        lift(QuaternionPlatform::new(self.quat_params(self.quat_n)?))
    }
}

/// Runs one suite by name.
pub fn run_suite(name: &str, cfg: &VerifyConfig, seed: u64) -> core::result::Result<(), Failure> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (suite, outcome): (&'static str, SuiteResult) = match name {
        "quaternion-relations" => ("quaternion-relations", quaternion_relations(cfg, &mut rng)),
        "group-laws" => ("group-laws", group_laws(cfg, &mut rng)),
        "closed-forms" => ("closed-forms", closed_forms(cfg, &mut rng)),
        "slot-kernel" => ("slot-kernel", slot_kernel(cfg)),
        "quaternion-layer-formula" => ("quaternion-layer-formula", layer_formula(cfg, &mut rng)),
        "valuation-filtration" => ("valuation-filtration", valuation_filtration(cfg, &mut rng)),
        "protocol-consistency" => ("protocol-consistency", protocol_consistency(cfg, &mut rng)),
        "pohlig-hellman" => ("pohlig-hellman", pohlig_hellman_suite(cfg, &mut rng)),
        "attack-soundness" => ("attack-soundness", attack_soundness(cfg, &mut rng)),
        _ => {
            return Err(Failure {
                suite: "unknown",
                detail: format!("no suite named {name}"),
            })
        }
    };
    outcome.map_err(|detail| Failure { suite, detail })
}

/// Runs every suite in order, stopping at the first failure.
pub fn run_all(cfg: &VerifyConfig, seed: u64) -> core::result::Result<Vec<&'static str>, Failure> {
    let mut passed = Vec::new();
    for (i, name) in SUITES.iter().enumerate() {
        run_suite(name, cfg, seed.wrapping_add(i as u64))?;
        passed.push(*name);
    }
    Ok(passed)
}

fn random_quaternion<R: Rng + ?Sized>(q: &QuatParams, rng: &mut R) -> Quaternion {
    Quaternion {
        coords: core::array::from_fn(|_| rng.gen_biguint_below(q.modulus())),
    }
}

fn quaternion_relations<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> SuiteResult {
    let q = cfg.quat_params(cfg.quat_n)?;
    let one = q.one();
    let i = q.quaternion(0, 1, 0, 0);
    let j = q.quaternion(0, 0, 1, 0);
    let k = q.quaternion(0, 0, 0, 1);
    let scalar = |x: &BigUint| Quaternion {
        coords: [x.clone(), BigUint::zero(), BigUint::zero(), BigUint::zero()],
    };
    let neg = |x: &Quaternion| crate::quaternion::quat_sub(&q, &q.zero(), x);
    let tp = q.ring().mul(q.t(), q.p());
    let relations = [
        ("i*i = t", quat_mul(&q, &i, &i), scalar(q.t())),
        ("j*j = p", quat_mul(&q, &j, &j), scalar(q.p())),
        ("i*j = k", quat_mul(&q, &i, &j), k.clone()),
        ("j*i = -k", quat_mul(&q, &j, &i), neg(&k)),
        ("k*k = -tp", quat_mul(&q, &k, &k), neg(&scalar(&tp))),
        ("i*k = t j", quat_mul(&q, &i, &k), quat_mul(&q, &scalar(q.t()), &j)),
        (
            "k*i = -t j",
            quat_mul(&q, &k, &i),
            neg(&quat_mul(&q, &scalar(q.t()), &j)),
        ),
        (
            "j*k = -p i",
            quat_mul(&q, &j, &k),
            neg(&quat_mul(&q, &scalar(q.p()), &i)),
        ),
        ("k*j = p i", quat_mul(&q, &k, &j), quat_mul(&q, &scalar(q.p()), &i)),
        ("1*k = k", quat_mul(&q, &one, &k), k.clone()),
        ("k*1 = k", quat_mul(&q, &k, &one), k.clone()),
    ];
    for (name, got, want) in relations {
        check(got == want, || format!("relation {name} fails"))?;
    }
    for _ in 0..cfg.trials {
        let (x, y, z) = (
            random_quaternion(&q, rng),
            random_quaternion(&q, rng),
            random_quaternion(&q, rng),
        );
        check(
            quat_mul(&q, &quat_mul(&q, &x, &y), &z) == quat_mul(&q, &x, &quat_mul(&q, &y, &z)),
            || "associativity fails".into(),
        )?;
        check(
            conj(&q, &quat_mul(&q, &x, &y)) == quat_mul(&q, &conj(&q, &y), &conj(&q, &x)),
            || "bar map is not an anti-homomorphism".into(),
        )?;
    }
    Ok(())
}

fn laws<G: Platform, R: Rng + ?Sized>(g: &G, rng: &mut R, trials: usize, label: &str) -> SuiteResult {
    for _ in 0..trials {
        let x = lift(g.sample_generator(rng))?;
        let y = lift(g.sample_generator(rng))?;
        let z = lift(g.sample_generator(rng))?;
        check(g.same(&g.mul(&g.mul(&x, &y), &z), &g.mul(&x, &g.mul(&y, &z))), || {
            format!("{label}: associativity")
        })?;
        check(g.same(&g.mul(&x, &g.identity()), &x), || format!("{label}: identity"))?;
        check(g.is_identity(&g.mul(&x, &g.inv(&x))), || format!("{label}: inverse"))?;
        check(g.same(&lift(g.decode(&g.encode(&x)))?, &x), || {
            format!("{label}: encoding round trip")
        })?;
        let mut naive = g.identity();
        for e in 0..=64u64 {
            check(g.same(&pow_nat(g, &x, &BigUint::from(e)), &naive), || {
                format!("{label}: pow disagrees with repeated multiplication at e={e}")
            })?;
            naive = g.mul(&naive, &x);
        }
    }
    Ok(())
}

fn group_laws<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> SuiteResult {
    laws(&cfg.heis()?, rng, cfg.trials, "heisenberg")?;
    laws(&cfg.cyc()?, rng, cfg.trials, "cyclic-triple")?;
    laws(&cfg.quat()?, rng, cfg.trials, "quaternion")
}

fn closed_forms<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> SuiteResult {
    let h = cfg.heis()?;
    let c = cfg.cyc()?;
    for _ in 0..cfg.trials {
        let e = BigInt::from(rng.gen_range(-100_000i64..100_000));
        let (x, y) = (h.random_element(rng), h.random_element(rng));
        check(h.pow_closed_form(&x, &e) == pow(&h, &x, &e), || {
            "heisenberg power".into()
        })?;
        check(h.commutator_closed_form(&x, &y) == commutator(&h, &x, &y), || {
            "heisenberg commutator".into()
        })?;
        let (x, y) = (c.random_element(rng), c.random_element(rng));
        check(c.pow_closed_form(&x, &e) == pow(&c, &x, &e), || {
            "cyclic-triple power".into()
        })?;
        check(c.commutator_closed_form(&x, &y) == commutator(&c, &x, &y), || {
            "cyclic-triple commutator".into()
        })?;
    }
    Ok(())
}

fn slot_kernel(cfg: &VerifyConfig) -> SuiteResult {
    fn one<G: Group>(g: &G, gens: &[G::Element], p: &BigUint, label: &str) -> SuiteResult {
        let c = lift(crate::group::nested_commutator(g, gens))?;
        let alpha = lift(order_p_power(g, &c, p, 64))?;
        let expected = num_traits::pow(p.clone(), alpha as usize);
        for slot in 0..gens.len() {
            let index = lift(brute_force_slot_kernel(g, gens, slot, 100_000))?;
            check(BigUint::from(index) == expected, || {
                format!("{label}: slot {slot} index {index}, |c| = {expected}")
            })?;
        }
        Ok(())
    }
    let small = BigUint::from(13u32);
    let hp = if cfg.heis_p <= small { cfg.heis_p.clone() } else { small };
    let h = lift(HeisenbergGroup::new(hp.clone(), 1))?;
    one(
        &h,
        &[h.standard_generator(0), h.standard_generator(1)],
        &hp,
        "heisenberg",
    )?;
    let c = lift(CyclicTripleGroup::new(BigUint::from(3u32), 4))?;
    one(&c, &[c.element(1, 0, 0), c.element(0, 1, 0)], c.p(), "cyclic-triple")
}

fn layer_formula<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> SuiteResult {
    let q = cfg.quat_params(cfg.layer_k_max as usize)?;
    let g = lift(QuaternionPlatform::new(q.clone()))?;
    let i0 = q.base_layer();
    for k in 1..=cfg.layer_k_max {
        for _ in 0..cfg.trials {
            let x = lift(sample_s_element(&q, k * i0, rng))?;
            let m = BigInt::from(rng.gen_range(-1_000_000i64..1_000_000));
            let formula = lift(pow_layer_formula(&q, &x, &m, k))?;
            let exact = q.reduce_to_layer(&pow(&g, &x.q, &m), (k + 1) * i0);
            check(formula == exact, || format!("layer formula fails at k={k}, m={m}"))?;
        }
    }
    Ok(())
}

/// Outcome counts of the filtration checks, for reuse by harnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiltrationStats {
    pub trials: usize,
    pub bound_held: usize,
    pub generic: usize,
}

/// `level([x, y]) ≥ k + ℓ`, with exactly `k + ℓ` counted as generic.
pub fn commutator_levels<R: Rng + ?Sized>(
    q: &QuatParams,
    k: u64,
    l: u64,
    trials: usize,
    rng: &mut R,
) -> Result<FiltrationStats> {
    let g = QuaternionPlatform::new(q.clone())?;
    let mut s = FiltrationStats {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let x = sample_s_element(q, k, rng)?.q;
        let y = sample_s_element(q, l, rng)?.q;
        let lv = level(q, &commutator(&g, &x, &y));
        s.bound_held += lv.at_least(k + l) as usize;
        s.generic += (lv == Valuation::Finite(k + l)) as usize;
    }
    Ok(s)
}

/// `level(x^p) ≥ k + 2`, with exactly `k + 2` counted as generic.
pub fn p_power_shift<R: Rng + ?Sized>(q: &QuatParams, k: u64, trials: usize, rng: &mut R) -> Result<FiltrationStats> {
    let g = QuaternionPlatform::new(q.clone())?;
    let mut s = FiltrationStats {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let x = sample_s_element(q, k, rng)?.q;
        let lv = level(q, &pow_nat(&g, &x, q.p()));
        s.bound_held += lv.at_least(k + 2) as usize;
        s.generic += (lv == Valuation::Finite(k + 2)) as usize;
    }
    Ok(s)
}

/// For `x` on layer `k·i₀`: `x^(p^α)` reaches layer `(k+1)·i₀` (bound) and
/// `x^(p^(α-1))` does not (generic).
pub fn layer_exponent<R: Rng + ?Sized>(q: &QuatParams, k: u64, trials: usize, rng: &mut R) -> Result<FiltrationStats> {
    let g = QuaternionPlatform::new(q.clone())?;
    let i0 = q.base_layer();
    let p_top = num_traits::pow(q.p().clone(), q.alpha() as usize - 1);
    let mut s = FiltrationStats {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let x = sample_s_element(q, k * i0, rng)?.q;
        let y = pow_nat(&g, &x, &p_top);
        let z = pow_nat(&g, &y, q.p());
        s.bound_held += equal_mod_layer(q, &z, &q.one(), (k + 1) * i0) as usize;
        s.generic += (!equal_mod_layer(q, &y, &q.one(), (k + 1) * i0)) as usize;
    }
    Ok(s)
}

fn valuation_filtration<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> SuiteResult {
    let q = cfg.quat_params(cfg.quat_n.max(3))?;
    let top = q.saturation();
    let trials = cfg.trials.max(2);
    for k in 1..4u64 {
        for l in 1..4u64 {
            if k + l >= top {
                continue;
            }
            let s = lift(commutator_levels(&q, k, l, trials, rng))?;
            check(s.bound_held == s.trials, || format!("commutator below level {}", k + l))?;
            if k % 2 == 1 {
                check(2 * s.generic >= s.trials, || {
                    format!("commutator of levels {k},{l} rarely exact ({}/{})", s.generic, s.trials)
                })?;
            }
        }
        if k + 2 < top {
            let s = lift(p_power_shift(&q, k, trials, rng))?;
            check(s.bound_held == s.trials, || {
                format!("p-th power of level {k} below {}", k + 2)
            })?;
        }
    }
    for k in 1..=q.class() as u64 {
        let s = lift(layer_exponent(&q, k, trials, rng))?;
        check(s.bound_held == s.trials, || {
            format!("layer {k} exponent exceeds p^alpha")
        })?;
        check(2 * s.generic >= s.trials, || {
            format!("layer {k} exponent generically below p^alpha")
        })?;
    }
    Ok(())
}

fn consistent<P: Platform, R: Rng + ?Sized>(
    platform: P,
    n: usize,
    trials: usize,
    rng: &mut R,
    label: &str,
) -> SuiteResult {
    let params = lift(setup(platform, n, rng, 32))?;
    for _ in 0..trials {
        let (keys, t) = run_exchange(&params, rng);
        let first = lift(derive_key(&params, &keys[0], &t))?;
        let e = keys.iter().fold(BigUint::one(), |acc, k| acc * &k.a) % &params.key_order;
        check(
            params.platform.same(&first, &pow_nat(&params.platform, &params.c, &e)),
            || format!("{label}: key differs from c^(a_1...a_(n+1))"),
        )?;
        for k in &keys[1..] {
            check(params.platform.same(&lift(derive_key(&params, k, &t))?, &first), || {
                format!("{label}: user {} derives a different key", k.j)
            })?;
        }
    }
    Ok(())
}

fn protocol_consistency<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> SuiteResult {
    consistent(cfg.heis()?, 2, cfg.trials, rng, "heisenberg")?;
    consistent(cfg.cyc()?, 2, cfg.trials, rng, "cyclic-triple")?;
    consistent(cfg.quat()?, cfg.quat_n, cfg.trials, rng, "quaternion")
}

fn pohlig_hellman_suite<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> SuiteResult {
    fn one<P: Platform, R: Rng + ?Sized>(
        platform: P,
        n: usize,
        trials: usize,
        rng: &mut R,
        label: &str,
    ) -> SuiteResult {
        let params = lift(setup(platform, n, rng, 32))?;
        let g = &params.platform;
        for _ in 0..trials {
            let e = rng.gen_biguint_below(&params.key_order);
            let target = pow_nat(g, &params.c, &e);
            let r = lift(pohlig_hellman(g, &params.c, &target, g.prime(), params.alpha))?;
            check(r.exponent == e, || {
                format!("{label}: recovered {} instead of {e}", r.exponent)
            })?;
        }
        Ok(())
    }
    one(cfg.cyc()?, 2, cfg.trials, rng, "cyclic-triple")?;
    one(cfg.quat()?, cfg.quat_n, cfg.trials, rng, "quaternion")
}

fn attack_soundness<R: Rng + ?Sized>(cfg: &VerifyConfig, rng: &mut R) -> SuiteResult {
    let params = lift(setup(cfg.heis()?, 2, rng, 32))?;
    for _ in 0..cfg.trials {
        let (keys, t) = run_exchange(&params, rng);
        let honest = lift(derive_key(&params, &keys[0], &t))?;
        check(lift(attack_heisenberg_linear(&params, &t))?.key == honest, || {
            "heisenberg linear".into()
        })?;
        check(
            lift(eavesdrop_generic(&params, &t, DEFAULT_BUDGET))?.key == honest,
            || "heisenberg generic".into(),
        )?;
    }
    let params = lift(setup(cfg.quat()?, cfg.quat_n, rng, 32))?;
    for _ in 0..cfg.trials {
        let (keys, t) = run_exchange(&params, rng);
        let honest = lift(derive_key(&params, &keys[0], &t))?;
        let g = &params.platform;
        check(
            g.same(&lift(attack_quaternion_linear(&params, &t))?.key, &honest),
            || "quaternion linear".into(),
        )?;
        check(
            g.same(&lift(eavesdrop_generic(&params, &t, DEFAULT_BUDGET))?.key, &honest),
            || "quaternion generic".into(),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::{Scalar, TableEntry};

    #[test]
    fn defaults_pass() {
        let cfg = VerifyConfig {
            trials: 8,
            ..Default::default()
        };
        assert_eq!(run_all(&cfg, 0).unwrap().len(), SUITES.len());
    }

    #[test]
    fn layer_formula_at_p7_alpha2() {
        let cfg = VerifyConfig {
            trials: 30,
            ..Default::default()
        };
        run_suite("quaternion-layer-formula", &cfg, 1).unwrap();
    }

    #[test]
    fn corrupted_sign_table_is_caught() {
        // j·i = +k instead of -k
        let table = MulTable::standard().with_entry(
            2,
            1,
            TableEntry {
                target: 3,
                negative: false,
                scalar: Scalar::One,
            },
        );
        let cfg = VerifyConfig {
            trials: 4,
            table,
            ..Default::default()
        };
        let err = run_all(&cfg, 0).unwrap_err();
        assert_eq!(err.suite, "quaternion-relations");
    }

    #[test]
    fn unknown_suite() {
        assert_eq!(
            run_suite("nope", &VerifyConfig::default(), 0).unwrap_err().suite,
            "unknown"
        );
    }
}
