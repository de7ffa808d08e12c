//! Counter-based random streams.
//!
//! Every Gaussian increment is a pure function of
//! `(seed, realization, mode ordinal, step index)`: each `(realization, mode)`
//! pair owns a ChaCha8 stream and every step consumes exactly two 64-bit words,
//! so the word position is `4 * step`. Scheduling never changes the numbers.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

const MC_STREAM_BIT: u64 = 1 << 63;

/// Independent ChaCha stream for mode `mode` of realization `realization`.
pub fn mode_stream(seed: u64, realization: u32, mode: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((realization as u64) << 32) | mode as u64);
    rng
}

/// Stream for Monte-Carlo sampling chunk `chunk`, disjoint from all mode streams.
pub fn mc_stream(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(MC_STREAM_BIT | chunk);
    rng
}

/// Uniform in `(0, 1]` from the top 53 bits.
#[inline]
pub fn open_unit(word: u64) -> f64 {
    ((word >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Two independent standard normals from exactly two words (Box-Muller).
#[inline]
pub fn normal_pair<R: RngCore>(rng: &mut R) -> (f64, f64) {
    let u1 = open_unit(rng.next_u64());
    let u2 = open_unit(rng.next_u64());
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

/// Standard complex Gaussian increment scaled so that `E|z|^2 = variance`.
#[inline]
pub fn complex_normal<T: Real, R: RngCore>(rng: &mut R, variance: T) -> num_complex::Complex<T> {
    let (a, b) = normal_pair(rng);
    let sigma = (variance / (T::one() + T::one())).sqrt();
    num_complex::Complex::new(T::of(a) * sigma, T::of(b) * sigma)
}
