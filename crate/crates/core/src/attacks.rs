//! Passive key recovery from a transcript, with group operations counted.
//!
//! The generic attack reduces to a discrete logarithm in `⟨c⟩` and costs
//! `O(α√p)` operations. The linear attacks read the exponent straight off the
//! coordinates of one share and cost a handful of operations plus one
//! exponentiation.

use alloc::vec::Vec;

use hashbrown::HashMap;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::group::{pow_nat, prime_power, Counted, Group};
use crate::heisenberg::HeisenbergGroup;
use crate::numtheory::{ceil_sqrt, inv_mod, v_p_capped};
use crate::platform::Platform;
use crate::protocol::{key_map, transcript_for, PrivateKey, ProtocolParams, Transcript};
use crate::quaternion::QuaternionPlatform;
use crate::{Error, Result};

/// Largest baby-step table BSGS will build.
pub const MAX_TABLE: u64 = 1 << 26;

/// Default operation budget of the generic attack.
pub const DEFAULT_BUDGET: u128 = 1 << 26;

/// Outcome of one key-recovery attempt.
#[derive(Clone, Debug)]
pub struct AttackReport<E> {
    pub algorithm: &'static str,
    pub key: E,
    /// Recovered private exponents, when the attack produces them.
    pub exponents: Vec<BigUint>,
    /// Group multiplications, inversions included.
    pub ops: u64,
}

/// Discrete logarithm of `target` to `base`, with `|base| ≤ order_bound`.
pub fn bsgs<G: Group>(g: &G, base: &G::Element, target: &G::Element, order_bound: &BigUint) -> Result<BigUint> {
    let m = ceil_sqrt(order_bound).max(BigUint::from(1u32));
    let m = match m.to_u64() {
        Some(m) if m <= MAX_TABLE => m,
        _ => {
            return Err(Error::TooLarge {
                bound: MAX_TABLE as usize,
            })
        }
    };
    let mut table: HashMap<Vec<u8>, u64> = HashMap::with_capacity(m as usize);
    let mut step = g.identity();
    for k in 0..m {
        table.entry(g.encode(&step)).or_insert(k);
        step = g.mul(&step, base);
    }
    // step = base^m
    let giant = g.inv(&step);
    let mut gamma = target.clone();
    for i in 0..m {
        if let Some(&k) = table.get(&g.encode(&gamma)) {
            return Ok(BigUint::from(i) * m + k);
        }
        if i + 1 < m {
            gamma = g.mul(&gamma, &giant);
        }
    }
    Err(Error::NotInSubgroup)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PohligHellman {
    pub exponent: BigUint,
    pub bsgs_calls: u32,
    /// Operations spent inside BSGS; the remainder of the caller's count is
    /// digit extraction.
    pub bsgs_ops: u64,
}

/// Discrete logarithm in a cyclic group of order `p^α`, one base-`p` digit at
/// a time. `target` must lie in `⟨base⟩`; a digit with no solution is
/// reported as `NotInSubgroup`, other violations go undetected.
pub fn pohlig_hellman<G: Group>(
    g: &G,
    base: &G::Element,
    target: &G::Element,
    p: &BigUint,
    alpha: u32,
) -> Result<PohligHellman> {
    if alpha == 0 {
        return if g.is_identity(target) {
            Ok(PohligHellman {
                exponent: BigUint::zero(),
                bsgs_calls: 0,
                bsgs_ops: 0,
            })
        } else {
            Err(Error::NotInSubgroup)
        };
    }
    let counted = Counted::new(g);
    let top = prime_power(p, alpha - 1);
    let gamma = pow_nat(g, base, &top);
    let base_inv = g.inv(base);
    let mut x = BigUint::zero();
    let mut p_k = BigUint::from(1u32);
    let mut calls = 0;
    for k in 0..alpha {
        let reduced = if x.is_zero() {
            target.clone()
        } else {
            g.mul(&pow_nat(g, &base_inv, &x), target)
        };
        let h = pow_nat(g, &reduced, &prime_power(p, alpha - 1 - k));
        let d = bsgs(&counted, &gamma, &h, p)?;
        calls += 1;
        x += d * &p_k;
        p_k *= p;
    }
    Ok(PohligHellman {
        exponent: x,
        bsgs_calls: calls,
        bsgs_ops: counted.ops(),
    })
}

/// Predicted operation count of the generic attack, `α(2⌈√p⌉ + 2)`.
pub fn generic_estimate(p: &BigUint, alpha: u32) -> u128 {
    let s = ceil_sqrt(p).to_u128().unwrap_or(u128::MAX / 4);
    (alpha as u128).saturating_mul(s.saturating_mul(2).saturating_add(2))
}

/// The `c`, `c^(a_1⋯a_n)`, `c^(a_(n+1))` triple an eavesdropper can form.
fn eavesdropper_view<G: Group>(
    g: &G,
    n: usize,
    gens: &[G::Element],
    t: &Transcript<G::Element>,
) -> Result<[G::Element; 3]> {
    let c = key_map(g, gens)?;
    let diag = (1..=n).map(|i| t.share(i, i).cloned()).collect::<Result<Vec<_>>>()?;
    let c_x = key_map(g, &diag)?;
    let mut last = gens.to_vec();
    last[0] = t.share(1, n + 1)?.clone();
    let c_y = key_map(g, &last)?;
    Ok([c, c_x, c_y])
}

/// Generic attack: solve `c^y = c^(a_(n+1))` with Pohlig-Hellman and output
/// `(c^(a_1⋯a_n))^y`.
pub fn eavesdrop_generic<P: Platform>(
    params: &ProtocolParams<P>,
    transcript: &Transcript<P::Element>,
    budget: u128,
) -> Result<AttackReport<P::Element>> {
    let estimate = generic_estimate(params.platform.prime(), params.alpha);
    if estimate > budget {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    let g = Counted::new(&params.platform);
    let [c, c_x, c_y] = eavesdropper_view(&g, params.n, &params.generators, transcript)?;
    let y = pohlig_hellman(&g, &c, &c_y, params.platform.prime(), params.alpha)?.exponent;
    let key = pow_nat(&g, &c_x, &y);
    Ok(AttackReport {
        algorithm: "generic",
        key,
        exponents: alloc::vec![y],
        ops: g.ops(),
    })
}

/// Heisenberg attack: `g^a = (a·u, a·v, ·)`, so `a mod p` is one division.
pub fn attack_heisenberg_linear(
    params: &ProtocolParams<HeisenbergGroup>,
    transcript: &Transcript<<HeisenbergGroup as Group>::Element>,
) -> Result<AttackReport<<HeisenbergGroup as Group>::Element>> {
    let heis = &params.platform;
    let g1 = &params.generators[0];
    let share = transcript.share(1, params.n + 1)?;
    let f = heis.field();
    let (gc, sc) =
        g1.u.iter()
            .chain(&g1.v)
            .zip(share.u.iter().chain(&share.v))
            .find(|(gc, _)| !gc.is_zero())
            .ok_or(Error::NoUnitCoordinate)?;
    let y = f.mul(sc, &f.inv(gc)?);

    let g = Counted::new(heis);
    let diag = (1..=params.n)
        .map(|i| transcript.share(i, i).cloned())
        .collect::<Result<Vec<_>>>()?;
    let c_x = key_map(&g, &diag)?;
    let key = pow_nat(&g, &c_x, &y);
    Ok(AttackReport {
        algorithm: "heisenberg-linear",
        key,
        exponents: alloc::vec![y],
        ops: g.ops(),
    })
}

/// Quaternion attack: on the top layer `c^a ≡ a₀^a + a·b₀ i + a·c₀ j + a·d₀ k`,
/// so `a mod p^α` is a ratio of matching coordinates of `c^a` and `c`.
pub fn attack_quaternion_linear(
    params: &ProtocolParams<QuaternionPlatform>,
    transcript: &Transcript<<QuaternionPlatform as Group>::Element>,
) -> Result<AttackReport<<QuaternionPlatform as Group>::Element>> {
    let q = params.platform.params();
    let p = q.p();
    let alpha = params.alpha;
    let g = Counted::new(&params.platform);
    let [c, c_x, c_y] = eavesdropper_view(&g, params.n, &params.generators, transcript)?;

    let layer = q.quotient_layer();
    let cap = q.precision() as u64;
    // coordinate with the most exposed digits
    let (coord, v, digits) = (1..4)
        .filter_map(|e| {
            let modulus_exp = q.layer_exponent(layer, e) as u64;
            let v = v_p_capped(&c.coords[e], p, cap);
            (v < modulus_exp).then(|| (e, v, modulus_exp - v))
        })
        .max_by_key(|&(e, _, digits)| (digits, core::cmp::Reverse(e)))
        .ok_or(Error::InsufficientPrecision { alpha })?;
    if digits < alpha as u64 {
        return Err(Error::InsufficientPrecision { alpha });
    }
    let modulus = prime_power(p, digits as u32);
    let p_v = prime_power(p, v as u32);
    let unit = (&c.coords[coord] / &p_v) % &modulus;
    let scaled = &c_y.coords[coord] % prime_power(p, q.layer_exponent(layer, coord));
    if !(&scaled % &p_v).is_zero() {
        return Err(Error::NotInSubgroup);
    }
    let y = ((scaled / &p_v) * inv_mod(&unit, &modulus)?) % prime_power(p, alpha);

    let key = pow_nat(&g, &c_x, &y);
    Ok(AttackReport {
        algorithm: "quaternion-linear",
        key,
        exponents: alloc::vec![y],
        ops: g.ops(),
    })
}

/// Computational Diffie-Hellman in `⟨c⟩` from a transcript solver.
///
/// The transcript is planted with `a_1 = x`, `a_2 = ... = a_n = 1` and
/// `a_(n+1) = y`; it is checked against `c_x` and `c_y` before the solver runs.
pub fn cdh_from_eavesdropper<P, F>(
    params: &ProtocolParams<P>,
    c_x: &P::Element,
    c_y: &P::Element,
    planted: (&BigUint, &BigUint),
    solver: F,
) -> Result<P::Element>
where
    P: Platform,
    F: FnOnce(&ProtocolParams<P>, &Transcript<P::Element>) -> Result<AttackReport<P::Element>>,
{
    let (x, y) = planted;
    let n = params.n;
    let keys: Vec<PrivateKey> = (1..=n + 1)
        .map(|j| PrivateKey {
            j,
            a: match j {
                1 => x.clone(),
                j if j == n + 1 => y.clone(),
                _ => BigUint::from(1u32),
            },
        })
        .collect();
    let transcript = transcript_for(params, &keys);
    let [_, tx, ty] = eavesdropper_view(&params.platform, n, &params.generators, &transcript)?;
    if !params.platform.same(&tx, c_x) || !params.platform.same(&ty, c_y) {
        return Err(Error::InvalidParameters(
            "planted exponents do not match c^x, c^y".into(),
        ));
    }
    Ok(solver(params, &transcript)?.key)
}
