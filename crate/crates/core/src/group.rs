//! The group contract shared by all platforms, and the commutator calculus on
//! top of it.
//!
//! Commutators follow `[x, y] = x y x⁻¹ y⁻¹`, and longer commutators are
//! nested to the right: `[x1, x2, ..., xn] = [x1, [x2, [..., [x(n-1), xn]]]]`.

use alloc::format;
use alloc::vec::Vec;
use core::cell::Cell;
use core::fmt::Debug;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::{Error, Result};

/// A finite group given by explicit operations on element values.
///
/// Elements of a platform are plain values; the group object carries the
/// parameters needed to multiply them. `encode` must be canonical: two
/// elements are equal in the group exactly when their encodings are equal.
pub trait Group {
    type Element: Clone + Debug;

    fn identity(&self) -> Self::Element;

    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;

    fn inv(&self, a: &Self::Element) -> Self::Element;

    /// Platform tag byte leading every encoding.
    fn tag(&self) -> u8;

    /// Canonical fixed-width big-endian encoding, tag byte first.
    fn encode(&self, a: &Self::Element) -> Vec<u8>;

    fn decode(&self, bytes: &[u8]) -> Result<Self::Element>;

    /// Group equality.
    fn same(&self, a: &Self::Element, b: &Self::Element) -> bool {
        self.encode(a) == self.encode(b)
    }

    fn is_identity(&self, a: &Self::Element) -> bool {
        self.same(a, &self.identity())
    }
}

impl<G: Group + ?Sized> Group for &G {
    type Element = G::Element;

    fn identity(&self) -> Self::Element {
        (**self).identity()
    }
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element {
        (**self).mul(a, b)
    }
    fn inv(&self, a: &Self::Element) -> Self::Element {
        (**self).inv(a)
    }
    fn tag(&self) -> u8 {
        (**self).tag()
    }
    fn encode(&self, a: &Self::Element) -> Vec<u8> {
        (**self).encode(a)
    }
    fn decode(&self, bytes: &[u8]) -> Result<Self::Element> {
        (**self).decode(bytes)
    }
    fn same(&self, a: &Self::Element, b: &Self::Element) -> bool {
        (**self).same(a, b)
    }
    fn is_identity(&self, a: &Self::Element) -> bool {
        (**self).is_identity(a)
    }
}

/// Wraps a group and counts multiplications. An inversion counts as one
/// multiplication.
pub struct Counted<G> {
    inner: G,
    ops: Cell<u64>,
}

impl<G: Group> Counted<G> {
    pub fn new(inner: G) -> Self {
        Counted {
            inner,
            ops: Cell::new(0),
        }
    }

    pub fn ops(&self) -> u64 {
        self.ops.get()
    }

    pub fn reset(&self) {
        self.ops.set(0);
    }

    pub fn inner(&self) -> &G {
        &self.inner
    }

    fn tick(&self) {
        self.ops.set(self.ops.get() + 1);
    }
}

impl<G: Group> Group for Counted<G> {
    type Element = G::Element;

    fn identity(&self) -> Self::Element {
        self.inner.identity()
    }
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element {
        self.tick();
        self.inner.mul(a, b)
    }
    fn inv(&self, a: &Self::Element) -> Self::Element {
        self.tick();
        self.inner.inv(a)
    }
    fn tag(&self) -> u8 {
        self.inner.tag()
    }
    fn encode(&self, a: &Self::Element) -> Vec<u8> {
        self.inner.encode(a)
    }
    fn decode(&self, bytes: &[u8]) -> Result<Self::Element> {
        self.inner.decode(bytes)
    }
    fn same(&self, a: &Self::Element, b: &Self::Element) -> bool {
        self.inner.same(a, b)
    }
    fn is_identity(&self, a: &Self::Element) -> bool {
        self.inner.is_identity(a)
    }
}

/// `x^e` for `e ≥ 0` by left-to-right square-and-multiply.
pub fn pow_nat<G: Group>(g: &G, x: &G::Element, e: &BigUint) -> G::Element {
    if e.is_zero() {
        return g.identity();
    }
    let bits = e.bits();
    let mut acc = x.clone();
    for i in (0..bits - 1).rev() {
        acc = g.mul(&acc, &acc);
        if e.bit(i) {
            acc = g.mul(&acc, x);
        }
    }
    acc
}

/// `x^e`; negative exponents go through the inverse.
pub fn pow<G: Group>(g: &G, x: &G::Element, e: &BigInt) -> G::Element {
    match e.sign() {
        Sign::Minus => pow_nat(g, &g.inv(x), e.magnitude()),
        _ => pow_nat(g, x, e.magnitude()),
    }
}

pub fn pow_u64<G: Group>(g: &G, x: &G::Element, e: u64) -> G::Element {
    pow_nat(g, x, &BigUint::from(e))
}

/// `[x, y] = x y x⁻¹ y⁻¹`.
pub fn commutator<G: Group>(g: &G, x: &G::Element, y: &G::Element) -> G::Element {
    let xy = g.mul(x, y);
    let xyx = g.mul(&xy, &g.inv(x));
    g.mul(&xyx, &g.inv(y))
}

/// Right-nested commutator `[x1, [x2, [..., [x(n-1), xn]]]]`.
pub fn nested_commutator<G: Group>(g: &G, xs: &[G::Element]) -> Result<G::Element> {
    let (last, rest) = xs.split_last().ok_or(Error::TooShort)?;
    if rest.is_empty() {
        return Err(Error::TooShort);
    }
    Ok(rest.iter().rev().fold(last.clone(), |acc, x| commutator(g, x, &acc)))
}

/// Smallest `α ≤ cap` with `x^(p^α) = 1`.
pub fn order_p_power<G: Group>(g: &G, x: &G::Element, p: &BigUint, cap: u32) -> Result<u32> {
    let mut y = x.clone();
    for alpha in 0..=cap {
        if g.is_identity(&y) {
            return Ok(alpha);
        }
        if alpha < cap {
            y = pow_nat(g, &y, p);
        }
    }
    Err(Error::CapExceeded { cap })
}

/// Index `|⟨g_i⟩ : K_i|` where `K_i` is the largest subgroup of `⟨g_i⟩` whose
/// elements, placed in slot `slot` with the other generators fixed, give a
/// trivial nested commutator. Found by exhaustive enumeration of `⟨g_i⟩`.
pub fn brute_force_slot_kernel<G: Group>(g: &G, gens: &[G::Element], slot: usize, bound: usize) -> Result<usize> {
    let base = gens
        .get(slot)
        .ok_or_else(|| Error::InvalidParameters("slot out of range".into()))?;

    let mut powers = Vec::new();
    let mut h = g.identity();
    loop {
        if powers.len() >= bound {
            return Err(Error::TooLarge { bound });
        }
        powers.push(h.clone());
        h = g.mul(&h, base);
        if g.is_identity(&h) {
            break;
        }
    }
    let order = powers.len();

    let mut slots = gens.to_vec();
    let trivial: Vec<bool> = powers
        .iter()
        .map(|h| {
            slots[slot] = h.clone();
            nested_commutator(g, &slots).map(|c| g.is_identity(&c))
        })
        .collect::<Result<_>>()?;

    // Subgroups of a cyclic group of order N are ⟨g^d⟩ for d | N.
    let index = (1..=order)
        .filter(|d| order % d == 0)
        .find(|&d| (0..order).step_by(d).all(|k| trivial[k]))
        .expect("d = N always qualifies");
    Ok(index)
}

/// `p^α` as a `BigUint`.
pub fn prime_power(p: &BigUint, alpha: u32) -> BigUint {
    let mut r = BigUint::one();
    for _ in 0..alpha {
        r *= p;
    }
    r
}

pub(crate) fn encode_coords<'a>(tag: u8, width: usize, coords: impl IntoIterator<Item = &'a BigUint>) -> Vec<u8> {
    let mut out = alloc::vec![tag];
    for c in coords {
        let bytes = if c.is_zero() { Vec::new() } else { c.to_bytes_be() };
        assert!(bytes.len() <= width, "coordinate wider than encoding width");
        out.extend(core::iter::repeat_n(0u8, width - bytes.len()));
        out.extend(bytes);
    }
    out
}

pub(crate) fn decode_coords(
    tag: u8,
    width: usize,
    count: usize,
    modulus: &BigUint,
    bytes: &[u8],
) -> Result<Vec<BigUint>> {
    let (&t, body) = bytes
        .split_first()
        .ok_or_else(|| Error::Decode("empty encoding".into()))?;
    if t != tag {
        return Err(Error::Decode(format!("tag {t:#04x}, expected {tag:#04x}")));
    }
    if body.len() != width * count {
        return Err(Error::Decode(format!(
            "length {}, expected {}",
            body.len(),
            width * count
        )));
    }
    body.chunks(width)
        .map(|chunk| {
            let c = BigUint::from_bytes_be(chunk);
            if &c >= modulus {
                Err(Error::Decode("coordinate not reduced".into()))
            } else {
                Ok(c)
            }
        })
        .collect()
}
