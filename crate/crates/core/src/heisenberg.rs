//! The extraspecial group `Heis_{2m+1}(F_p)` of exponent `p`.
//!
//! Elements are triples `(u, v, z)` with `u, v ∈ F_p^m` and `z ∈ F_p`, and
//!
//! ```text
//! (u, v, z)(u', v', z') = (u + u', v + v', z + z' + u·v')
//! ```
//!
//! The group has class 2, its derived subgroup is the center `{(0, 0, z)}`,
//! and every non-identity element has order `p`.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::Zero;
use rand::Rng;

use crate::group::{decode_coords, encode_coords, Group};
use crate::numtheory::{binom2, is_probable_prime, Zmod};
use crate::{Error, Result};

pub const TAG: u8 = 0x01;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeisElement {
    pub u: Vec<BigUint>,
    pub v: Vec<BigUint>,
    pub z: BigUint,
}

#[derive(Clone, Debug)]
pub struct HeisenbergGroup {
    field: Zmod,
    m: usize,
}

impl HeisenbergGroup {
    pub fn new(p: BigUint, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameters("m must be at least 1".into()));
        }
        if p == BigUint::from(2u32) || !is_probable_prime(&p) {
            return Err(Error::InvalidParameters("p must be an odd prime".into()));
        }
        Ok(HeisenbergGroup { field: Zmod::new(p), m })
    }

    pub fn p(&self) -> &BigUint {
        self.field.modulus()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub(crate) fn field(&self) -> &Zmod {
        &self.field
    }

    /// Builds a reduced element from small coordinates.
    pub fn element(&self, u: &[u64], v: &[u64], z: u64) -> HeisElement {
        assert!(u.len() == self.m && v.len() == self.m, "dimension mismatch");
        let f = |x: &u64| self.field.reduce(&BigUint::from(*x));
        HeisElement {
            u: u.iter().map(f).collect(),
            v: v.iter().map(f).collect(),
            z: f(&z),
        }
    }

    /// Standard generator: `idx < m` is the unit vector `e_idx` in `u`, and
    /// `m ≤ idx < 2m` is `e_(idx-m)` in `v`.
    pub fn standard_generator(&self, idx: usize) -> HeisElement {
        assert!(idx < 2 * self.m);
        let mut x = self.identity();
        if idx < self.m {
            x.u[idx] = BigUint::from(1u32);
        } else {
            x.v[idx - self.m] = BigUint::from(1u32);
        }
        x
    }

    fn dot(&self, a: &[BigUint], b: &[BigUint]) -> BigUint {
        let s = a.iter().zip(b).fold(BigUint::zero(), |acc, (x, y)| acc + x * y);
        self.field.reduce(&s)
    }

    /// `x^a = (a·u, a·v, a·z + a(a-1)/2 · u·v)`.
    pub fn pow_closed_form(&self, x: &HeisElement, a: &BigInt) -> HeisElement {
        let f = &self.field;
        let a_mod = f.reduce_signed(a);
        let b = f.reduce_signed(&binom2(a));
        let uv = self.dot(&x.u, &x.v);
        HeisElement {
            u: x.u.iter().map(|c| f.mul(c, &a_mod)).collect(),
            v: x.v.iter().map(|c| f.mul(c, &a_mod)).collect(),
            z: f.add(&f.mul(&x.z, &a_mod), &f.mul(&b, &uv)),
        }
    }

    /// `[x, y] = (0, 0, u·v' - u'·v)`.
    pub fn commutator_closed_form(&self, x: &HeisElement, y: &HeisElement) -> HeisElement {
        let mut c = self.identity();
        c.z = self.field.sub(&self.dot(&x.u, &y.v), &self.dot(&y.u, &x.v));
        c
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> HeisElement {
        let p = self.p();
        HeisElement {
            u: (0..self.m).map(|_| rng.gen_biguint_below(p)).collect(),
            v: (0..self.m).map(|_| rng.gen_biguint_below(p)).collect(),
            z: rng.gen_biguint_below(p),
        }
    }

    /// True iff `u = v = 0`, i.e. `x` lies in the center.
    pub fn is_central(&self, x: &HeisElement) -> bool {
        x.u.iter().chain(&x.v).all(Zero::is_zero)
    }

    fn coordinate_count(&self) -> usize {
        2 * self.m + 1
    }
}

impl Group for HeisenbergGroup {
    type Element = HeisElement;

    fn identity(&self) -> HeisElement {
        HeisElement {
            u: alloc::vec![BigUint::zero(); self.m],
            v: alloc::vec![BigUint::zero(); self.m],
            z: BigUint::zero(),
        }
    }

    fn mul(&self, a: &HeisElement, b: &HeisElement) -> HeisElement {
        let f = &self.field;
        let add = |x: &[BigUint], y: &[BigUint]| x.iter().zip(y).map(|(s, t)| f.add(s, t)).collect();
        HeisElement {
            u: add(&a.u, &b.u),
            v: add(&a.v, &b.v),
            z: f.add(&f.add(&a.z, &b.z), &self.dot(&a.u, &b.v)),
        }
    }

    /// `(-u, -v, -z + u·v)`.
    fn inv(&self, a: &HeisElement) -> HeisElement {
        let f = &self.field;
        HeisElement {
            u: a.u.iter().map(|c| f.neg(c)).collect(),
            v: a.v.iter().map(|c| f.neg(c)).collect(),
            z: f.sub(&self.dot(&a.u, &a.v), &a.z),
        }
    }

    fn tag(&self) -> u8 {
        TAG
    }

    fn encode(&self, a: &HeisElement) -> Vec<u8> {
        let coords: Vec<&BigUint> = a.u.iter().chain(&a.v).chain(core::iter::once(&a.z)).collect();
        encode_coords(TAG, self.field.byte_width(), coords)
    }

    fn decode(&self, bytes: &[u8]) -> Result<HeisElement> {
        let coords = decode_coords(TAG, self.field.byte_width(), self.coordinate_count(), self.p(), bytes)?;
        let (u, rest) = coords.split_at(self.m);
        let (v, z) = rest.split_at(self.m);
        Ok(HeisElement {
            u: u.to_vec(),
            v: v.to_vec(),
            z: z[0].clone(),
        })
    }

    fn same(&self, a: &HeisElement, b: &HeisElement) -> bool {
        a == b
    }
}
