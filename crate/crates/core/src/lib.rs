//! Nested-commutator non-interactive key exchange over nilpotent platform
//! groups, together with passive key-recovery attacks.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and the
//! command-line front end live in the `nilnike` companion crate.
//!
//! Three platform families implement the [`group::Group`] contract:
//!
//! * [`heisenberg::HeisenbergGroup`], the extraspecial group of exponent `p`
//!   on `F_p^m × F_p^m × F_p`;
//! * [`cyclic::CyclicTripleGroup`], the class-2 group on `C × C × C` with
//!   `C = Z/(p^α)`;
//! * [`quaternion::QuaternionPlatform`], a finite quotient of the norm-one
//!   group `S(Δ_p)` of a `p`-adic quaternion algebra, which supports any
//!   nilpotency class.
//!
//! [`protocol`] runs the `n + 1` user exchange on any of them and [`attacks`]
//! recovers the shared key from the public transcript, counting group
//! operations as it goes.

#![no_std]

extern crate alloc;

pub mod attacks;
pub mod cyclic;
mod error;
pub mod group;
pub mod heisenberg;
pub mod numtheory;
pub mod platform;
pub mod protocol;
pub mod quaternion;
pub mod verify;

pub use error::{Error, Result};
pub use group::{Counted, Group};
pub use platform::{Platform, PlatformDescriptor};
