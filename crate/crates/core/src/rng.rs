//! Deterministic random streams.
//!
//! Every experiment is driven by a 64-bit master seed. Replica `r` gets its
//! own ChaCha8 stream seeded with `mix_seed(seed, r)`, so the output of a
//! replica never depends on how many other replicas ran or on scheduling.
//!
//! The mixer is SplitMix64's finalizer (constants `0x9E3779B97F4A7C15`,
//! `0xBF58476D1CE4E5B9`, `0x94D049BB133111EB`) applied twice:
//! `splitmix(seed ^ splitmix(r + GOLDEN))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// The random stream type used throughout the crate.
pub type Stream = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `replica` under master seed `seed`.
pub fn mix_seed(seed: u64, replica: u64) -> u64 {
    splitmix64(seed ^ splitmix64(replica.wrapping_add(GOLDEN)))
}

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn replica_stream(seed: u64, replica: u64) -> Stream {
    stream(mix_seed(seed, replica))
}

/// Runs `f` for replicas `0..n` on the current rayon pool, each with its
/// own stream. Results come back in replica order.
pub fn par_replicas<T, F>(seed: u64, n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(|r| f(r, &mut replica_stream(seed, r))).collect()
}

/// Uniform draw on the open interval (0, 1).
pub(crate) fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Exponential variate with the given rate (inverse transform).
pub(crate) fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -open01(rng).ln() / rate
}

pub(crate) fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}
