//! Seeded, scheduling-independent random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream addressed by
//! `(key, stream index)`, where the key is derived from the master seed and
//! an experiment coordinate such as `(n, rep)`. Parallel workers therefore
//! produce bit-identical output regardless of how work is scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a coordinate path into a 256-bit key.
pub fn derive_key(master: u64, path: &[u64]) -> [u8; 32] {
    let mut state = master;
    for &p in path {
        let mixed = splitmix64(&mut state);
        state = mixed ^ p.wrapping_mul(GOLDEN).rotate_left(17);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// A family of independent streams sharing one derived key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Substreams {
    key: [u8; 32],
}

impl Substreams {
    pub fn new(master: u64, path: &[u64]) -> Self {
        Self {
            key: derive_key(master, path),
        }
    }

    /// The `index`-th stream. Identical indices give identical streams.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }

    /// A child family, keyed by this family plus `path`.
    pub fn child(&self, path: &[u64]) -> Self {
        let mut seed = 0u64;
        for chunk in self.key.chunks_exact(8) {
            let mut buf = [0u8; 8];
            buf.copy_from_slice(chunk);
            seed = seed.rotate_left(23) ^ u64::from_le_bytes(buf);
        }
        Self::new(seed, path)
    }
}

/// Uniform on (0, 1] with 53 random bits; never returns zero.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on the open interval (0, 1), symmetric about 1/2.
#[inline]
pub fn open_open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on [0, 1).
#[inline]
pub fn unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Exponential(rate) by inverse CDF.
#[inline]
pub fn exponential<R: RngCore + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -open_unit(rng).ln() / rate
}

/// Gamma(shape 4, rate 2): the sum of four Exponential(2) inverse-CDF draws,
/// folded into a single logarithm of the product of the uniforms.
#[inline]
pub fn gamma4_rate2<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let p = open_unit(rng) * open_unit(rng) * open_unit(rng) * open_unit(rng);
    -0.5 * p.ln()
}
