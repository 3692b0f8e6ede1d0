//! Seeded random streams.
//!
//! Every random decision in the pipeline flows through a [`RandomStream`]
//! derived from `(global_seed, scene_index, label)`. Streams with different
//! labels are decorrelated, so the draws one stage consumes never shift the
//! draws of another — adding cameras cannot change geometry. Scenes with
//! different indices are independent, so any number of workers can generate
//! them in any order with identical output.
//!
//! The core generator is a SplitMix64 walk seeded through the same avalanche
//! mix; it is fast, has no shared state, and is nowhere near cryptographic.

use crate::config::{Categorical, CountRange, Range};
use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const FNV_OFFSET: u64 = 0xCBF2_9CE4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;

/// Identity of one scene's random universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub global_seed: u64,
    pub scene_index: u64,
}

impl Seed {
    pub fn new(global_seed: u64, scene_index: u64) -> Seed {
        Seed {
            global_seed,
            scene_index,
        }
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// A deterministic stream of draws, cheap to copy around threads.
#[derive(Debug, Clone)]
pub struct RandomStream {
    state: u64,
}

/// Derive the stream for `(seed, label)`. Same inputs, same stream, always.
pub fn derive_stream(seed: Seed, label: &str) -> RandomStream {
    let key = mix64(
        seed.global_seed ^ mix64(seed.scene_index.wrapping_add(GOLDEN_GAMMA) ^ mix64(fnv1a(label.as_bytes()))),
    );
    RandomStream { state: key }
}

/// Derive an indexed sub-stream, e.g. one per object within a stage.
pub fn derive_stream_indexed(seed: Seed, label: &str, index: u64) -> RandomStream {
    let mut s = derive_stream(seed, label);
    s.state = mix64(s.state ^ index.wrapping_mul(GOLDEN_GAMMA).wrapping_add(1));
    s
}

impl RandomStream {
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform f64 in [0, 1) with a full 53-bit mantissa.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from a validated range; the degenerate range returns its
    /// endpoint exactly.
    pub fn uniform(&mut self, r: Range) -> f64 {
        r.lo + (r.hi - r.lo) * self.next_f64()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in the inclusive range.
    pub fn uniform_count(&mut self, r: CountRange) -> u32 {
        let n = (r.hi - r.lo + 1) as u64;
        r.lo + (self.next_u64() % n) as u32
    }

    pub fn uniform_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        debug_assert!((0.0..=1.0).contains(&p));
        self.next_f64() < p
    }

    pub fn categorical<'a, T>(&mut self, c: &'a Categorical<T>) -> &'a T {
        let u = self.next_f64();
        c.pick(u)
    }
}
