//! Protocol I: non-interactive key exchange for `n + 1` users over a class-`n`
//! platform.
//!
//! Public data are generators `g_1, ..., g_n`. User `j` publishes
//! `g_i^(a_j)` for every `i`, and all users arrive at
//! `[g_1, ..., g_n]^(a_1 ⋯ a_(n+1))`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::One;
use rand::Rng;

use crate::group::{nested_commutator, pow_nat, prime_power, Group};
use crate::platform::Platform;
use crate::{Error, Result};

/// The key map `(x_1, ..., x_n) ↦ [x_1, ..., x_n]`. For `n = 1` it is the
/// identity map on the single slot.
pub fn key_map<G: Group>(g: &G, xs: &[G::Element]) -> Result<G::Element> {
    match xs {
        [] => Err(Error::TooShort),
        [x] => Ok(x.clone()),
        _ => nested_commutator(g, xs),
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolParams<P: Platform> {
    pub platform: P,
    pub n: usize,
    pub generators: Vec<P::Element>,
    pub c: P::Element,
    pub alpha: u32,
    pub key_order: BigUint,
}

impl<P: Platform> ProtocolParams<P> {
    pub fn users(&self) -> usize {
        self.n + 1
    }
}

/// Samples generators until `c = [g_1, ..., g_n]` has full order.
pub fn setup<P: Platform, R: Rng + ?Sized>(
    platform: P,
    n: usize,
    rng: &mut R,
    max_retries: u32,
) -> Result<ProtocolParams<P>> {
    if n == 0 || !platform.supports_class(n) {
        return Err(Error::ClassUnsupported {
            family: platform.descriptor().family(),
            n,
        });
    }
    for _ in 0..max_retries.max(1) {
        let gens = (0..n)
            .map(|_| platform.sample_generator(rng))
            .collect::<Result<Vec<_>>>()?;
        let c = key_map(&platform, &gens)?;
        if platform.key_element_ok(&c) {
            return Ok(build(platform, n, gens, c));
        }
    }
    Err(Error::DegenerateGenerators {
        retries: max_retries.max(1),
    })
}

/// Uses caller-chosen generators; fails if they are degenerate.
pub fn setup_with_generators<P: Platform>(platform: P, generators: Vec<P::Element>) -> Result<ProtocolParams<P>> {
    let n = generators.len();
    if n == 0 || !platform.supports_class(n) {
        return Err(Error::ClassUnsupported {
            family: platform.descriptor().family(),
            n,
        });
    }
    let c = key_map(&platform, &generators)?;
    if !platform.key_element_ok(&c) {
        return Err(Error::DegenerateGenerators { retries: 0 });
    }
    Ok(build(platform, n, generators, c))
}

fn build<P: Platform>(platform: P, n: usize, generators: Vec<P::Element>, c: P::Element) -> ProtocolParams<P> {
    let alpha = platform.key_alpha();
    let key_order = prime_power(platform.prime(), alpha);
    ProtocolParams {
        platform,
        n,
        generators,
        c,
        alpha,
        key_order,
    }
}

/// User index `j` (1-based) and exponent `a_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivateKey {
    pub j: usize,
    pub a: BigUint,
}

/// Uniform unit modulo `key_order`.
pub fn gen_private<R: Rng + ?Sized>(j: usize, rng: &mut R, key_order: &BigUint) -> PrivateKey {
    loop {
        let a = rng.gen_biguint_below(key_order);
        if a.gcd(key_order).is_one() {
            return PrivateKey { j, a };
        }
    }
}

/// `g_1^(a_j), ..., g_n^(a_j)`.
pub fn compute_shares<P: Platform>(params: &ProtocolParams<P>, key: &PrivateKey) -> Vec<P::Element> {
    params
        .generators
        .iter()
        .map(|g| pow_nat(&params.platform, g, &key.a))
        .collect()
}

/// Published shares, keyed by `(i, j)` with `i` the generator and `j` the
/// user, both 1-based. Private keys and derived keys are only present when
/// recorded for testing.
#[derive(Clone, Debug)]
pub struct Transcript<E> {
    pub shares: BTreeMap<(usize, usize), E>,
    pub private: Option<Vec<PrivateKey>>,
    pub keys: Option<Vec<E>>,
}

impl<E: Clone> Transcript<E> {
    pub fn new() -> Self {
        Transcript {
            shares: BTreeMap::new(),
            private: None,
            keys: None,
        }
    }

    pub fn share(&self, i: usize, j: usize) -> Result<&E> {
        self.shares.get(&(i, j)).ok_or(Error::MissingShare { i, j })
    }

    pub fn publish(&mut self, j: usize, shares: Vec<E>) {
        for (idx, s) in shares.into_iter().enumerate() {
            self.shares.insert((idx + 1, j), s);
        }
    }
}

impl<E: Clone> Default for Transcript<E> {
    fn default() -> Self {
        Self::new()
    }
}

/// Draws keys for all users and collects every share.
pub fn run_exchange<P: Platform, R: Rng + ?Sized>(
    params: &ProtocolParams<P>,
    rng: &mut R,
) -> (Vec<PrivateKey>, Transcript<P::Element>) {
    let keys: Vec<PrivateKey> = (1..=params.users())
        .map(|j| gen_private(j, rng, &params.key_order))
        .collect();
    let transcript = transcript_for(params, &keys);
    (keys, transcript)
}

/// Transcript for fixed private keys, one per user in order.
pub fn transcript_for<P: Platform>(params: &ProtocolParams<P>, keys: &[PrivateKey]) -> Transcript<P::Element> {
    let mut t = Transcript::new();
    for k in keys {
        t.publish(k.j, compute_shares(params, k));
    }
    t
}

/// User `own.j`'s view of the shared key.
pub fn derive_key<P: Platform>(
    params: &ProtocolParams<P>,
    own: &PrivateKey,
    transcript: &Transcript<P::Element>,
) -> Result<P::Element> {
    let n = params.n;
    let j = own.j;
    if j == 0 || j > n + 1 {
        return Err(Error::InvalidParameters("user index out of range".into()));
    }
    let slots = (1..=n)
        .map(|i| {
            let owner = if i == j { n + 1 } else { i };
            transcript.share(i, owner).cloned()
        })
        .collect::<Result<Vec<_>>>()?;
    let k = key_map(&params.platform, &slots)?;
    Ok(pow_nat(&params.platform, &k, &own.a))
}

/// Key for the sub-group `subset` of users, with every other exponent taken
/// as one. User `own.j` places the other members' exponents on slots
/// `1, ..., |B| - 1` through their shares and raises the result to `a_j`.
pub fn degenerate_key<P: Platform>(
    params: &ProtocolParams<P>,
    subset: &[usize],
    own: &PrivateKey,
    transcript: &Transcript<P::Element>,
) -> Result<P::Element> {
    let mut members = subset.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.len() < 2 {
        return Err(Error::SubsetTooSmall);
    }
    if members.len() > params.n + 1 || members.iter().any(|&m| m == 0 || m > params.n + 1) {
        return Err(Error::InvalidParameters("subset outside the user range".into()));
    }
    if !members.contains(&own.j) {
        return Err(Error::InvalidParameters("own key is not in the subset".into()));
    }
    let others: Vec<usize> = members.into_iter().filter(|&m| m != own.j).collect();
    let mut slots = params.generators.clone();
    for (s, &m) in others.iter().enumerate() {
        slots[s] = transcript.share(s + 1, m)?.clone();
    }
    let k = key_map(&params.platform, &slots)?;
    Ok(pow_nat(&params.platform, &k, &own.a))
}

/// `c^e`, the reference value of a key with total exponent `e`.
pub fn key_from_exponent<P: Platform>(params: &ProtocolParams<P>, e: &BigInt) -> P::Element {
    let r = e.mod_floor(&BigInt::from(params.key_order.clone()));
    pow_nat(&params.platform, &params.c, r.magnitude())
}

/// Product of the exponents modulo `key_order`.
pub fn total_exponent(params: &ProtocolParams<impl Platform>, keys: &[PrivateKey]) -> BigUint {
    keys.iter()
        .fold(BigUint::one(), |acc, k| (acc * &k.a) % &params.key_order)
}
