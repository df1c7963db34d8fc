//! Truncated `p`-adic quaternions and the norm-one group `S(Δ_p)`.
//!
//! `Δ_p = Z_p ⊕ Z_p i ⊕ Z_p j ⊕ Z_p k` with `i² = t` (a quadratic nonresidue),
//! `j² = p` and `k = ij = -ji`. All arithmetic is carried out modulo `p^N`.
//!
//! The maximal ideal `m = Δ_p j` gives the filtration used throughout: `x`
//! lies in `m^ℓ` iff `2·v(a), 2·v(b), 2·v(c) + 1, 2·v(d) + 1` are all at least
//! `ℓ`. The group `S(Δ_p)` consists of norm-one elements of `1 + m`, and its
//! lower central series is `γ_ℓ = (1 + m^ℓ) ∩ S(Δ_p)`.
//!
//! [`QuaternionPlatform`] is the finite quotient `H / γ_(n+1)(H)` of
//! `H = γ_(2α-1)(S(Δ_p))`, which has class `n` and whose last lower central
//! factor has exponent `p^α`.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_traits::{One, Zero};
use rand::Rng;

use crate::group::{decode_coords, encode_coords, prime_power, Group};
use crate::numtheory::{find_qnr, hensel_sqrt, is_probable_prime, v_p_capped, Residue, Valuation, Zmod};
use crate::{Error, Result};

pub const TAG: u8 = 0x03;

const MAX_SAMPLING_RETRIES: u32 = 64;

/// Filtration weight of the basis elements `1, i, j, k`.
const WEIGHTS: [u64; 4] = [0, 0, 1, 1];

/// A quaternion `a + b i + c j + d k` with coordinates reduced mod `p^N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quaternion {
    pub coords: [BigUint; 4],
}

impl Quaternion {
    pub fn a(&self) -> &BigUint {
        &self.coords[0]
    }
    pub fn b(&self) -> &BigUint {
        &self.coords[1]
    }
    pub fn c(&self) -> &BigUint {
        &self.coords[2]
    }
    pub fn d(&self) -> &BigUint {
        &self.coords[3]
    }
}

/// Structure constant scalar attached to a basis product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scalar {
    One,
    T,
    P,
    TP,
}

/// `e_r · e_s = sign · scalar · e_target` for basis elements `1, i, j, k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub target: usize,
    pub negative: bool,
    pub scalar: Scalar,
}

/// Multiplication table of the basis, indexed `[r][s]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulTable {
    entries: [[TableEntry; 4]; 4],
}

impl MulTable {
    /// The table forced by `i² = t`, `j² = p`, `k = ij = -ji`.
    pub fn standard() -> Self {
        const fn e(target: usize, negative: bool, scalar: Scalar) -> TableEntry {
            TableEntry {
                target,
                negative,
                scalar,
            }
        }
        use Scalar::*;
        MulTable {
            entries: [
                [e(0, false, One), e(1, false, One), e(2, false, One), e(3, false, One)],
                // i·1 = i, i·i = t, i·j = k, i·k = t j
                [e(1, false, One), e(0, false, T), e(3, false, One), e(2, false, T)],
                // j·1 = j, j·i = -k, j·j = p, j·k = -p i
                [e(2, false, One), e(3, true, One), e(0, false, P), e(1, true, P)],
                // k·1 = k, k·i = -t j, k·j = p i, k·k = -tp
                [e(3, false, One), e(2, true, T), e(1, false, P), e(0, true, TP)],
            ],
        }
    }

    pub fn entry(&self, r: usize, s: usize) -> TableEntry {
        self.entries[r][s]
    }

    /// Replaces one entry; used to build deliberately broken tables.
    pub fn with_entry(mut self, r: usize, s: usize, entry: TableEntry) -> Self {
        self.entries[r][s] = entry;
        self
    }
}

/// Parameters of one truncated quaternion platform.
#[derive(Clone, Debug)]
pub struct QuatParams {
    p: BigUint,
    t: BigUint,
    precision: u32,
    alpha: u32,
    class: usize,
    ring: Zmod,
    table: MulTable,
    scalars: [BigUint; 4],
}

/// Working precision `N = ⌈((n+1)(2α-1) + 1)/2⌉ + 2`.
pub fn precision_for(n: usize, alpha: u32) -> u32 {
    let top = (n as u64 + 1) * (2 * alpha as u64 - 1) + 1;
    (top.div_ceil(2) + 2) as u32
}

impl QuatParams {
    /// Parameters with the smallest nonresidue `t` and the minimal precision.
    pub fn new(p: BigUint, alpha: u32, class: usize) -> Result<Self> {
        if p <= BigUint::from(3u32) || !is_probable_prime(&p) {
            return Err(Error::InvalidParameters("p must be a prime greater than 3".into()));
        }
        if alpha == 0 || class == 0 {
            return Err(Error::InvalidParameters("alpha and n must be at least 1".into()));
        }
        let t = find_qnr(&p).into_value();
        let precision = precision_for(class, alpha);
        Self::custom(p, t, precision, alpha, class, MulTable::standard())
    }

    /// Fully explicit parameters. Any `precision ≥ 1` is accepted for plain
    /// arithmetic; [`QuaternionPlatform::new`] insists on the minimum.
    pub fn custom(p: BigUint, t: BigUint, precision: u32, alpha: u32, class: usize, table: MulTable) -> Result<Self> {
        if p <= BigUint::from(3u32) || !is_probable_prime(&p) {
            return Err(Error::InvalidParameters("p must be a prime greater than 3".into()));
        }
        if alpha == 0 || class == 0 {
            return Err(Error::InvalidParameters("alpha and n must be at least 1".into()));
        }
        let half = (&p - 1u32) >> 1;
        if (&t % &p).is_zero() || (&t % &p).modpow(&half, &p) != &p - 1u32 {
            return Err(Error::InvalidParameters(
                "t must be a quadratic nonresidue mod p".into(),
            ));
        }
        if precision == 0 {
            return Err(Error::InvalidParameters("precision must be at least 1".into()));
        }
        let ring = Zmod::new(prime_power(&p, precision));
        let t = ring.reduce(&t);
        let scalars = [BigUint::one(), t.clone(), ring.reduce(&p), ring.mul(&t, &p)];
        Ok(QuatParams {
            p,
            t,
            precision,
            alpha,
            class,
            ring,
            table,
            scalars,
        })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }
    pub fn t(&self) -> &BigUint {
        &self.t
    }
    /// Working precision `N`.
    pub fn precision(&self) -> u32 {
        self.precision
    }
    pub fn alpha(&self) -> u32 {
        self.alpha
    }
    /// Nilpotency class `n` of the platform quotient.
    pub fn class(&self) -> usize {
        self.class
    }
    /// `p^N`.
    pub fn modulus(&self) -> &BigUint {
        self.ring.modulus()
    }
    pub fn ring(&self) -> &Zmod {
        &self.ring
    }
    pub fn table(&self) -> &MulTable {
        &self.table
    }

    /// Base layer `i₀ = 2α - 1`.
    pub fn base_layer(&self) -> u64 {
        2 * self.alpha as u64 - 1
    }

    /// Layer `(n+1)·i₀` that is quotiented out in the platform group.
    pub fn quotient_layer(&self) -> u64 {
        (self.class as u64 + 1) * self.base_layer()
    }

    /// Valuations at or above this are beyond the working precision.
    pub fn saturation(&self) -> u64 {
        2 * self.precision as u64 - 1
    }

    fn scalar(&self, s: Scalar) -> &BigUint {
        match s {
            Scalar::One => &self.scalars[0],
            Scalar::T => &self.scalars[1],
            Scalar::P => &self.scalars[2],
            Scalar::TP => &self.scalars[3],
        }
    }

    pub fn quaternion(&self, a: u64, b: u64, c: u64, d: u64) -> Quaternion {
        let r = |x: u64| self.ring.reduce(&BigUint::from(x));
        Quaternion {
            coords: [r(a), r(b), r(c), r(d)],
        }
    }

    pub fn from_signed(&self, coords: [&BigInt; 4]) -> Quaternion {
        Quaternion {
            coords: coords.map(|c| self.ring.reduce_signed(c)),
        }
    }

    pub fn one(&self) -> Quaternion {
        self.quaternion(1, 0, 0, 0)
    }

    pub fn zero(&self) -> Quaternion {
        self.quaternion(0, 0, 0, 0)
    }

    /// Exponent of the modulus `p^⌈(ℓ - w_e)/2⌉` of coordinate `e` in
    /// `Δ_p / m^ℓ`, capped at the working precision.
    pub fn layer_exponent(&self, layer: u64, coord: usize) -> u32 {
        let e = layer.saturating_sub(WEIGHTS[coord]).div_ceil(2);
        e.min(self.precision as u64) as u32
    }

    /// Canonical representative of `x` modulo `m^ℓ`.
    pub fn reduce_to_layer(&self, x: &Quaternion, layer: u64) -> Quaternion {
        Quaternion {
            coords: core::array::from_fn(|e| {
                let m = prime_power(&self.p, self.layer_exponent(layer, e));
                &x.coords[e] % m
            }),
        }
    }
}

pub fn quat_add(params: &QuatParams, x: &Quaternion, y: &Quaternion) -> Quaternion {
    Quaternion {
        coords: core::array::from_fn(|e| params.ring.add(&x.coords[e], &y.coords[e])),
    }
}

pub fn quat_sub(params: &QuatParams, x: &Quaternion, y: &Quaternion) -> Quaternion {
    Quaternion {
        coords: core::array::from_fn(|e| params.ring.sub(&x.coords[e], &y.coords[e])),
    }
}

/// Product driven by the parameter block's multiplication table. With the
/// standard table this is
///
/// ```text
/// a = a₁a₂ + t b₁b₂ + p c₁c₂ - tp d₁d₂
/// b = a₁b₂ + b₁a₂ - p c₁d₂ + p d₁c₂
/// c = a₁c₂ + c₁a₂ + t b₁d₂ - t d₁b₂
/// d = a₁d₂ + d₁a₂ + b₁c₂ - c₁b₂
/// ```
pub fn quat_mul(params: &QuatParams, x: &Quaternion, y: &Quaternion) -> Quaternion {
    let mut pos: [BigUint; 4] = Default::default();
    let mut neg: [BigUint; 4] = Default::default();
    for (r, xr) in x.coords.iter().enumerate() {
        if xr.is_zero() {
            continue;
        }
        for (s, ys) in y.coords.iter().enumerate() {
            if ys.is_zero() {
                continue;
            }
            let entry = params.table.entry(r, s);
            let mut term = xr * ys;
            if entry.scalar != Scalar::One {
                term = (term % params.modulus()) * params.scalar(entry.scalar);
            }
            if entry.negative {
                neg[entry.target] += term;
            } else {
                pos[entry.target] += term;
            }
        }
    }
    Quaternion {
        coords: core::array::from_fn(|e| {
            let ring = &params.ring;
            ring.sub(&ring.reduce(&pos[e]), &ring.reduce(&neg[e]))
        }),
    }
}

/// Bar map `a + bi + cj + dk ↦ a - bi - cj - dk`.
pub fn conj(params: &QuatParams, x: &Quaternion) -> Quaternion {
    let r = &params.ring;
    Quaternion {
        coords: [
            x.coords[0].clone(),
            r.neg(&x.coords[1]),
            r.neg(&x.coords[2]),
            r.neg(&x.coords[3]),
        ],
    }
}

/// Reduced norm, the scalar part of `x · x̄`: `a² - t b² - p c² + tp d²`.
pub fn norm(params: &QuatParams, x: &Quaternion) -> Residue {
    let prod = quat_mul(params, x, &conj(params, x));
    Residue::new(prod.coords[0].clone(), params.modulus().clone())
}

/// `m`-adic valuation: `min(2v(a), 2v(b), 2v(c)+1, 2v(d)+1)`. Results at or
/// above `2N - 1` exceed the working precision and are reported as
/// `Infinite`.
pub fn m_valuation(params: &QuatParams, x: &Quaternion) -> Valuation {
    let cap = params.precision as u64;
    let v = (0..4)
        .map(|e| 2 * v_p_capped(&x.coords[e], &params.p, cap) + WEIGHTS[e])
        .min()
        .expect("four coordinates");
    if v >= params.saturation() {
        Valuation::Infinite
    } else {
        Valuation::Finite(v)
    }
}

/// `m_valuation(x - 1)`: the largest `ℓ` with `x ∈ 1 + m^ℓ`.
pub fn level(params: &QuatParams, x: &Quaternion) -> Valuation {
    m_valuation(params, &quat_sub(params, x, &params.one()))
}

/// A norm-one element of `1 + m` together with a certified lower bound on
/// its level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SL1Element {
    pub q: Quaternion,
    pub level: u64,
}

impl SL1Element {
    /// Wraps a quaternion after checking the norm and computing its level.
    pub fn new(params: &QuatParams, q: Quaternion) -> Result<Self> {
        if !norm(params, &q).value().is_one() {
            return Err(Error::NotNormOne);
        }
        let lvl = match level(params, &q) {
            Valuation::Finite(0) => return Err(Error::LevelTooLow { required: 1 }),
            Valuation::Finite(v) => v,
            Valuation::Infinite => params.saturation(),
        };
        Ok(SL1Element { q, level: lvl })
    }
}

/// Completes `b i + c j + d k` to a norm-one element `a + b i + c j + d k`
/// with `a ≡ 1 mod p`.
pub fn s_element_from(params: &QuatParams, b: BigUint, c: BigUint, d: BigUint) -> Result<SL1Element> {
    let r = &params.ring;
    let (b, c, d) = (r.reduce(&b), r.reduce(&c), r.reduce(&d));
    let tb2 = r.mul(&params.t, &r.mul(&b, &b));
    let pc2 = r.mul(&r.reduce(&params.p), &r.mul(&c, &c));
    let tpd2 = r.mul(&params.scalars[3], &r.mul(&d, &d));
    let s = r.sub(&r.add(&r.add(&BigUint::one(), &tb2), &pc2), &tpd2);
    let a = hensel_sqrt(
        &Residue::new(s, params.modulus().clone()),
        &Residue::new(1u32, params.p.clone()),
    )?;
    SL1Element::new(
        params,
        Quaternion {
            coords: [a.into_value(), b, c, d],
        },
    )
}

/// Uniform-ish element of `γ_k(S(Δ_p))` whose level is exactly `k`, by
/// rejection sampling.
pub fn sample_s_element<R: Rng + ?Sized>(params: &QuatParams, k: u64, rng: &mut R) -> Result<SL1Element> {
    if k == 0 || k + 3 > 2 * params.precision as u64 {
        return Err(Error::InvalidParameters("sampling level must lie in 1..=2N-3".into()));
    }
    let m = params.modulus();
    let shift_b = prime_power(&params.p, k.div_ceil(2) as u32);
    let shift_cd = prime_power(&params.p, (k - 1).div_ceil(2) as u32);
    for _ in 0..MAX_SAMPLING_RETRIES {
        let b = rng.gen_biguint_below(m) * &shift_b;
        let c = rng.gen_biguint_below(m) * &shift_cd;
        let d = rng.gen_biguint_below(m) * &shift_cd;
        let x = s_element_from(params, b, c, d)?;
        if x.level == k {
            return Ok(x);
        }
    }
    Err(Error::SamplingFailed {
        retries: MAX_SAMPLING_RETRIES,
    })
}

/// Inverse in `S(Δ_p)`, which is the bar map.
pub fn quat_inv(params: &QuatParams, x: &SL1Element) -> Result<SL1Element> {
    if !norm(params, &x.q).value().is_one() {
        return Err(Error::NotNormOne);
    }
    Ok(SL1Element {
        q: conj(params, &x.q),
        level: x.level,
    })
}

/// Right-hand side of the layer power congruence
///
/// ```text
/// x^m ≡ a^m + m b i + m c j + m d k  (mod m^((k+1)·i₀))
/// ```
///
/// for `x ∈ γ_k(H) = γ_(k·i₀)(S(Δ_p))`, reduced to its canonical
/// representative modulo `m^((k+1)·i₀)`.
pub fn pow_layer_formula(params: &QuatParams, x: &SL1Element, m: &BigInt, k: u64) -> Result<Quaternion> {
    let required = k * params.base_layer();
    if !level(params, &x.q).at_least(required) {
        return Err(Error::LevelTooLow { required });
    }
    let r = &params.ring;
    let a = x.q.a();
    let a_m = match m.sign() {
        Sign::Minus => r.pow(&r.inv(a)?, m.magnitude()),
        _ => r.pow(a, m.magnitude()),
    };
    let m_mod = r.reduce_signed(m);
    let y = Quaternion {
        coords: [
            a_m,
            r.mul(&m_mod, x.q.b()),
            r.mul(&m_mod, x.q.c()),
            r.mul(&m_mod, x.q.d()),
        ],
    };
    Ok(params.reduce_to_layer(&y, (k + 1) * params.base_layer()))
}

/// True iff `x · y⁻¹ ∈ 1 + m^k`, with `y⁻¹ = ȳ` for norm-one `y`.
pub fn equal_mod_layer(params: &QuatParams, x: &Quaternion, y: &Quaternion, k: u64) -> bool {
    level(params, &quat_mul(params, x, &conj(params, y))).at_least(k)
}

/// The platform group `H / γ_(n+1)(H)` with `H = γ_(2α-1)(S(Δ_p))`.
///
/// Elements are kept at full working precision; equality and the canonical
/// encoding are taken modulo `m^((n+1)(2α-1))`.
#[derive(Clone, Debug)]
pub struct QuaternionPlatform {
    params: QuatParams,
}

impl QuaternionPlatform {
    pub fn new(params: QuatParams) -> Result<Self> {
        if params.precision < precision_for(params.class, params.alpha) {
            return Err(Error::InvalidParameters(
                "precision below the minimum for (n, alpha)".into(),
            ));
        }
        Ok(QuaternionPlatform { params })
    }

    pub fn params(&self) -> &QuatParams {
        &self.params
    }

    /// Canonical representative modulo the quotient layer.
    pub fn canonical(&self, x: &Quaternion) -> Quaternion {
        self.params.reduce_to_layer(x, self.params.quotient_layer())
    }
}

impl Group for QuaternionPlatform {
    type Element = Quaternion;

    fn identity(&self) -> Quaternion {
        self.params.one()
    }

    fn mul(&self, a: &Quaternion, b: &Quaternion) -> Quaternion {
        quat_mul(&self.params, a, b)
    }

    fn inv(&self, a: &Quaternion) -> Quaternion {
        conj(&self.params, a)
    }

    fn tag(&self) -> u8 {
        TAG
    }

    fn encode(&self, a: &Quaternion) -> Vec<u8> {
        let c = self.canonical(a);
        encode_coords(TAG, self.params.ring.byte_width(), &c.coords)
    }

    fn decode(&self, bytes: &[u8]) -> Result<Quaternion> {
        let coords = decode_coords(TAG, self.params.ring.byte_width(), 4, self.params.modulus(), bytes)?;
        let q = Quaternion {
            coords: coords.try_into().expect("four coordinates"),
        };
        if !level(&self.params, &q).at_least(self.params.base_layer()) {
            return Err(Error::Decode("element outside the base layer".into()));
        }
        Ok(q)
    }

    fn same(&self, a: &Quaternion, b: &Quaternion) -> bool {
        self.canonical(a) == self.canonical(b)
    }
}
