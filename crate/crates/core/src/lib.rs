//! Optimal privatization channels for simple binary hypothesis testing under
//! local differential privacy (LDP) and communication constraints.
//!
//! The library revolves around a small set of value types:
//!
//! - [`Distribution`]: a probability vector over a finite alphabet.
//! - [`Channel`]: a column-stochastic `l x k` matrix, acting on distributions
//!   by matrix-vector product.
//! - [`ldp::LpFamily`]: the linear-programming channel family that
//!   generalizes pure eps-LDP, singleton-based approximate LDP, and binary
//!   (eps, delta)-LDP.
//! - [`threshold::ThresholdPartition`]: a deterministic channel that groups
//!   inputs into contiguous blocks of the likelihood-ratio ordering.
//!
//! On top of these, [`optimize`] maximizes quasi-convex divergences over
//! channel families by enumerating the channels that can attain extreme
//! points of the joint range `{(Tp, Tq)}`, [`construct`] provides the
//! closed-form and constructive channels (randomized response, minimax and
//! free-privacy constructions, worst-case pairs, sample-complexity curves),
//! and [`sim`] is a Monte Carlo simulator of the non-interactive private
//! testing protocol.
//!
//! All types are immutable values after construction and safe to share across
//! threads. Every randomized routine takes an explicit 64-bit seed and is
//! bit-reproducible regardless of thread count.

#![forbid(unsafe_code)]

mod channel;
mod dist;
mod error;
mod polytope;
pub mod rng;

pub mod construct;
pub mod ldp;
pub mod optimize;
pub mod sim;
pub mod threshold;

pub use channel::Channel;
pub use dist::{
    canonicalize, chernoff_info, hellinger_sq, kl, renyi, tv, Distribution, LikelihoodOrder,
    LikelihoodRatio, PairCanonicalization,
};
pub use error::{Error, Result};

/// Largest exponent fed to `exp` when building channels from a privacy
/// parameter; keeps `e^eps` finite (documented in the CLI).
pub const EPS_CAP: f64 = 700.0;

/// Clamp a privacy parameter and exponentiate.
pub fn exp_eps(eps: f64) -> f64 {
    eps.min(EPS_CAP).exp()
}
