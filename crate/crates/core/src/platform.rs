//! Concrete platform families behind one trait, so the protocol and the
//! generic attacks can be written once.

use alloc::format;
use alloc::string::String;

use num_bigint::BigUint;
use rand::Rng;

use crate::cyclic::CyclicTripleGroup;
use crate::group::Group;
use crate::heisenberg::HeisenbergGroup;
use crate::quaternion::{level, QuaternionPlatform};
use crate::{numtheory::Valuation, Result};

/// Family name plus parameters of a platform instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlatformDescriptor {
    Heisenberg {
        p: BigUint,
        m: usize,
    },
    CyclicTriple {
        p: BigUint,
        alpha: u32,
    },
    Quaternion {
        p: BigUint,
        alpha: u32,
        n: usize,
        t: BigUint,
        precision: u32,
    },
}

impl PlatformDescriptor {
    pub fn family(&self) -> &'static str {
        match self {
            PlatformDescriptor::Heisenberg { .. } => "heisenberg",
            PlatformDescriptor::CyclicTriple { .. } => "cyclic-triple",
            PlatformDescriptor::Quaternion { .. } => "quaternion",
        }
    }

    pub fn p(&self) -> &BigUint {
        match self {
            PlatformDescriptor::Heisenberg { p, .. }
            | PlatformDescriptor::CyclicTriple { p, .. }
            | PlatformDescriptor::Quaternion { p, .. } => p,
        }
    }

    /// Short human-readable parameter summary.
    pub fn summary(&self) -> String {
        match self {
            PlatformDescriptor::Heisenberg { p, m } => format!("heisenberg p={p} m={m}"),
            PlatformDescriptor::CyclicTriple { p, alpha } => format!("cyclic-triple p={p} alpha={alpha}"),
            PlatformDescriptor::Quaternion {
                p,
                alpha,
                n,
                t,
                precision,
            } => format!("quaternion p={p} alpha={alpha} n={n} t={t} N={precision}"),
        }
    }
}

/// A group usable as a Protocol I platform.
pub trait Platform: Group + Sized {
    fn descriptor(&self) -> PlatformDescriptor;

    fn prime(&self) -> &BigUint;

    /// Exponent `α` such that the key subgroup `⟨c⟩` has order `p^α`.
    fn key_alpha(&self) -> u32;

    fn supports_class(&self, n: usize) -> bool;

    fn sample_generator<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self::Element>;

    /// Whether `c = [g_1, ..., g_n]` spans a key subgroup of the full order.
    fn key_element_ok(&self, c: &Self::Element) -> bool {
        let alpha = self.key_alpha();
        crate::group::order_p_power(self, c, self.prime(), alpha + 1) == Ok(alpha)
    }
}

impl Platform for HeisenbergGroup {
    fn descriptor(&self) -> PlatformDescriptor {
        PlatformDescriptor::Heisenberg {
            p: self.p().clone(),
            m: self.m(),
        }
    }
    fn prime(&self) -> &BigUint {
        self.p()
    }
    fn key_alpha(&self) -> u32 {
        1
    }
    fn supports_class(&self, n: usize) -> bool {
        n == 2
    }
    fn sample_generator<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self::Element> {
        Ok(self.random_element(rng))
    }
}

impl Platform for CyclicTripleGroup {
    fn descriptor(&self) -> PlatformDescriptor {
        PlatformDescriptor::CyclicTriple {
            p: self.p().clone(),
            alpha: self.alpha(),
        }
    }
    fn prime(&self) -> &BigUint {
        self.p()
    }
    fn key_alpha(&self) -> u32 {
        self.alpha()
    }
    fn supports_class(&self, n: usize) -> bool {
        n == 2
    }
    fn sample_generator<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self::Element> {
        Ok(self.random_element(rng))
    }
}

impl Platform for QuaternionPlatform {
    fn descriptor(&self) -> PlatformDescriptor {
        let q = self.params();
        PlatformDescriptor::Quaternion {
            p: q.p().clone(),
            alpha: q.alpha(),
            n: q.class(),
            t: q.t().clone(),
            precision: q.precision(),
        }
    }
    fn prime(&self) -> &BigUint {
        self.params().p()
    }
    fn key_alpha(&self) -> u32 {
        self.params().alpha()
    }
    fn supports_class(&self, n: usize) -> bool {
        n == self.params().class()
    }
    fn sample_generator<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self::Element> {
        let q = self.params();
        Ok(crate::quaternion::sample_s_element(q, q.base_layer(), rng)?.q)
    }
    /// `c` must sit exactly on layer `n·i₀`; then its image in
    /// `γ_n(H)/γ_(n+1)(H)` has order exactly `p^α`.
    fn key_element_ok(&self, c: &Self::Element) -> bool {
        let q = self.params();
        level(q, c) == Valuation::Finite(q.class() as u64 * q.base_layer())
    }
}
