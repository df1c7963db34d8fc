//! Modular and truncated `p`-adic integer arithmetic.
//!
//! Every residue carries its modulus, which in this crate is always a prime
//! power `p^N`. All integers are arbitrary precision.

use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// An integer modulo a prime power, always stored reduced.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    value: BigUint,
    modulus: BigUint,
}

impl Residue {
    pub fn new(value: impl Into<BigUint>, modulus: impl Into<BigUint>) -> Self {
        let modulus = modulus.into();
        assert!(!modulus.is_zero(), "modulus must be positive");
        let value = value.into() % &modulus;
        Residue { value, modulus }
    }

    /// Reduces a signed integer into `[0, modulus)`.
    pub fn from_signed(value: &BigInt, modulus: impl Into<BigUint>) -> Self {
        let modulus = modulus.into();
        let value = reduce_signed(value, &modulus);
        Residue { value, modulus }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// `p`-adic valuation. `Infinite` stands for `v_p(0)`, and for quantities
/// that vanish to the full working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// True when the valuation is at least `k`.
    pub fn at_least(self, k: u64) -> bool {
        match self {
            Valuation::Finite(v) => v >= k,
            Valuation::Infinite => true,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        use core::cmp::Ordering::*;
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Greater,
            (Valuation::Infinite, Valuation::Infinite) => Equal,
        }
    }
}

pub(crate) fn reduce_signed(value: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    value
        .mod_floor(&m)
        .to_biguint()
        .expect("mod_floor by a positive modulus is nonnegative")
}

/// Square-and-multiply exponentiation.
pub fn mod_pow(base: &Residue, exp: &BigUint) -> Residue {
    Residue {
        value: base.value.modpow(exp, &base.modulus),
        modulus: base.modulus.clone(),
    }
}

/// Inverse of a unit modulo `p^N`, via extended Euclid.
pub fn mod_inv(x: &Residue) -> Result<Residue> {
    inv_mod(&x.value, &x.modulus).map(|value| Residue {
        value,
        modulus: x.modulus.clone(),
    })
}

pub(crate) fn inv_mod(x: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if modulus.is_one() {
        return Ok(BigUint::zero());
    }
    let a = BigInt::from_biguint(Sign::Plus, x % modulus);
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let egcd = a.extended_gcd(&m);
    if !egcd.gcd.is_one() {
        return Err(Error::NonUnit);
    }
    Ok(reduce_signed(&egcd.x, modulus))
}

/// Largest `e` with `p^e | x`.
pub fn v_p(x: &BigInt, p: &BigUint) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from_biguint(Sign::Plus, p.clone());
    let mut x = x.abs();
    let mut e = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(e);
        }
        x = q;
        e += 1;
    }
}

/// `v_p` of a residue mod `p^N`, capped at `N` (zero residues give `N`).
pub(crate) fn v_p_capped(x: &BigUint, p: &BigUint, cap: u64) -> u64 {
    if x.is_zero() {
        return cap;
    }
    let mut x = x.clone();
    let mut e = 0;
    while e < cap {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            break;
        }
        x = q;
        e += 1;
    }
    e
}

/// Legendre symbol style test via Euler's criterion: `x^((p-1)/2) mod p`.
fn euler_criterion(x: &BigUint, p: &BigUint) -> BigUint {
    let e = (p - 1u32) >> 1;
    x.modpow(&e, p)
}

/// Smallest positive quadratic nonresidue modulo an odd prime.
pub fn find_qnr(p: &BigUint) -> Residue {
    assert!(p > &BigUint::from(2u32), "find_qnr needs an odd prime");
    let minus_one = p - 1u32;
    let mut t = BigUint::from(2u32);
    loop {
        if euler_criterion(&t, p) == minus_one {
            return Residue::new(t, p.clone());
        }
        t += 1u32;
    }
}

/// Square root of `s` modulo `p^N` congruent to `branch` modulo `p`, by Newton
/// iteration doubling the precision each step.
pub fn hensel_sqrt(s: &Residue, branch: &Residue) -> Result<Residue> {
    let p = branch.modulus();
    let modulus = s.modulus();
    let s_mod_p = s.value() % p;
    if !s_mod_p.is_zero() && !euler_criterion(&s_mod_p, p).is_one() {
        return Err(Error::NotASquare);
    }
    if branch.value().is_zero() || (branch.value() * branch.value()) % p != s_mod_p {
        return Err(Error::BadBranch);
    }
    let n = prime_power_exponent(modulus, p)
        .ok_or_else(|| Error::InvalidParameters("modulus is not a power of the branch prime".into()))?;

    let mut root = branch.value().clone();
    let mut precision = 1u32;
    while precision < n {
        precision = (2 * precision).min(n);
        let m = p.pow(precision);
        let f = (&root * &root + &m - (s.value() % &m)) % &m;
        let deriv_inv = inv_mod(&((&root << 1usize) % &m), &m)?;
        root = (&root + &m - (f * deriv_inv) % &m) % &m;
    }
    Ok(Residue::new(root, modulus.clone()))
}

/// `N` with `modulus = p^N`, if it is one.
pub fn prime_power_exponent(modulus: &BigUint, p: &BigUint) -> Option<u32> {
    let mut m = modulus.clone();
    let mut n = 0;
    while m > BigUint::one() {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return None;
        }
        m = q;
        n += 1;
    }
    (n >= 1).then_some(n)
}

/// `a(a-1)/2`.
pub fn binom2(a: &BigInt) -> BigInt {
    (a * (a - 1)) >> 1usize
}

const MR_BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin with the first twelve prime bases; deterministic below
/// `3.3 · 10^24`, probabilistic beyond.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &b in &MR_BASES {
        let b = BigUint::from(b);
        if n == &b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'bases: for &b in &MR_BASES {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Arithmetic in `Z/(modulus)` on bare `BigUint` values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Zmod {
    modulus: BigUint,
}

impl Zmod {
    pub fn new(modulus: BigUint) -> Self {
        assert!(!modulus.is_zero());
        Zmod { modulus }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn reduce(&self, x: &BigUint) -> BigUint {
        x % &self.modulus
    }

    pub fn reduce_signed(&self, x: &BigInt) -> BigUint {
        reduce_signed(x, &self.modulus)
    }

    pub fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.modulus {
            s - &self.modulus
        } else {
            s
        }
    }

    pub fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.modulus - (b - a)
        }
    }

    pub fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.modulus - a
        }
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }

    pub fn pow(&self, a: &BigUint, e: &BigUint) -> BigUint {
        a.modpow(e, &self.modulus)
    }

    pub fn inv(&self, a: &BigUint) -> Result<BigUint> {
        inv_mod(a, &self.modulus)
    }

    /// Fixed width, in bytes, of a big-endian encoding of any residue.
    pub fn byte_width(&self) -> usize {
        let bits = (&self.modulus - 1u32).bits().max(1);
        bits.div_ceil(8) as usize
    }
}

/// `⌈√n⌉` for a `BigUint`.
pub fn ceil_sqrt(n: &BigUint) -> BigUint {
    let r = n.sqrt();
    if &r * &r == *n {
        r
    } else {
        r + 1u32
    }
}
