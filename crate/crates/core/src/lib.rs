//! Achievable-rate-region toolkit for pattern recognition from compressed
//! memory and sensory data.
//!
//! The crate has three layers:
//!
//! * discrete information-theoretic primitives over dense joint pmf tables
//!   ([`pmf`]), plus the binary-entropy helpers used everywhere else
//!   ([`binary`]);
//! * closed-form inner/outer rate-region surfaces for the binary symmetric
//!   and jointly Gaussian environments ([`binary`], [`gaussian`]) together
//!   with generic upper-concave-envelope machinery ([`envelope`]);
//! * a desk-scale Monte Carlo simulation of the random-coding recognition
//!   scheme ([`sim`]) and brute-force verification of the supporting mutual
//!   information identities ([`lemmas`]).
//!
//! Everything is `no_std`-compatible (with `alloc`); IO, file formats, and
//! the command-line front end live in the companion `patrec-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod binary;
pub mod envelope;
pub mod error;
pub mod gaussian;
pub mod grid;
pub mod lemmas;
pub mod pmf;
pub mod rng;
pub mod sim;

mod math;

pub use error::{Error, Result};
pub use pmf::{JointPmf, RateTriple, Var};
pub use rng::SplitMix64;
