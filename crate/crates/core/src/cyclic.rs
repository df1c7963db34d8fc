//! The class-2 group on `C × C × C` with `C = Z/(p^α)`, written additively:
//!
//! ```text
//! (x, y, z)(x', y', z') = (x + x', y + y', z + z' + x·y')
//! ```
//!
//! The pairing `e(x, y') = x·y'` is residue multiplication. It is bilinear and
//! non-degenerate; the commutator it induces, `x·y' - x'·y`, is alternating.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::Zero;
use rand::Rng;

use crate::group::{decode_coords, encode_coords, prime_power, Group};
use crate::numtheory::{binom2, is_probable_prime, Zmod};
use crate::{Error, Result};

pub const TAG: u8 = 0x02;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicTripleElement {
    pub x: BigUint,
    pub y: BigUint,
    pub z: BigUint,
}

#[derive(Clone, Debug)]
pub struct CyclicTripleGroup {
    p: BigUint,
    alpha: u32,
    ring: Zmod,
}

impl CyclicTripleGroup {
    pub fn new(p: BigUint, alpha: u32) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::InvalidParameters("alpha must be at least 1".into()));
        }
        if p == BigUint::from(2u32) || !is_probable_prime(&p) {
            return Err(Error::InvalidParameters("p must be an odd prime".into()));
        }
        let ring = Zmod::new(prime_power(&p, alpha));
        Ok(CyclicTripleGroup { p, alpha, ring })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    /// `|C| = p^α`.
    pub fn order(&self) -> &BigUint {
        self.ring.modulus()
    }

    pub fn element(&self, x: u64, y: u64, z: u64) -> CyclicTripleElement {
        let r = |v: u64| self.ring.reduce(&BigUint::from(v));
        CyclicTripleElement {
            x: r(x),
            y: r(y),
            z: r(z),
        }
    }

    /// `a^e = (e·x, e·y, e·z + e(e-1)/2 · x·y)`.
    pub fn pow_closed_form(&self, a: &CyclicTripleElement, e: &BigInt) -> CyclicTripleElement {
        let r = &self.ring;
        let e_mod = r.reduce_signed(e);
        let b = r.reduce_signed(&binom2(e));
        CyclicTripleElement {
            x: r.mul(&a.x, &e_mod),
            y: r.mul(&a.y, &e_mod),
            z: r.add(&r.mul(&a.z, &e_mod), &r.mul(&b, &r.mul(&a.x, &a.y))),
        }
    }

    /// `[a, b] = (0, 0, x·y' - x'·y)`.
    pub fn commutator_closed_form(&self, a: &CyclicTripleElement, b: &CyclicTripleElement) -> CyclicTripleElement {
        let r = &self.ring;
        CyclicTripleElement {
            x: BigUint::zero(),
            y: BigUint::zero(),
            z: r.sub(&r.mul(&a.x, &b.y), &r.mul(&b.x, &a.y)),
        }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> CyclicTripleElement {
        let m = self.order();
        CyclicTripleElement {
            x: rng.gen_biguint_below(m),
            y: rng.gen_biguint_below(m),
            z: rng.gen_biguint_below(m),
        }
    }
}

impl Group for CyclicTripleGroup {
    type Element = CyclicTripleElement;

    fn identity(&self) -> CyclicTripleElement {
        CyclicTripleElement {
            x: BigUint::zero(),
            y: BigUint::zero(),
            z: BigUint::zero(),
        }
    }

    fn mul(&self, a: &CyclicTripleElement, b: &CyclicTripleElement) -> CyclicTripleElement {
        let r = &self.ring;
        CyclicTripleElement {
            x: r.add(&a.x, &b.x),
            y: r.add(&a.y, &b.y),
            z: r.add(&r.add(&a.z, &b.z), &r.mul(&a.x, &b.y)),
        }
    }

    /// `(-x, -y, -z + x·y)`.
    fn inv(&self, a: &CyclicTripleElement) -> CyclicTripleElement {
        let r = &self.ring;
        CyclicTripleElement {
            x: r.neg(&a.x),
            y: r.neg(&a.y),
            z: r.sub(&r.mul(&a.x, &a.y), &a.z),
        }
    }

    fn tag(&self) -> u8 {
        TAG
    }

    fn encode(&self, a: &CyclicTripleElement) -> Vec<u8> {
        encode_coords(TAG, self.ring.byte_width(), [&a.x, &a.y, &a.z])
    }

    fn decode(&self, bytes: &[u8]) -> Result<CyclicTripleElement> {
        let mut c = decode_coords(TAG, self.ring.byte_width(), 3, self.order(), bytes)?.into_iter();
        let (x, y, z) = (c.next().unwrap(), c.next().unwrap(), c.next().unwrap());
        Ok(CyclicTripleElement { x, y, z })
    }

    fn same(&self, a: &CyclicTripleElement, b: &CyclicTripleElement) -> bool {
        a == b
    }
}
