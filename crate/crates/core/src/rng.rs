//! Reproducible random streams.
//!
//! Every trial draws from its own ChaCha8 stream. A [`SeedTree`] maps a key
//! (trial index, cell index, ...) to a stream by setting the ChaCha stream
//! word, so results do not depend on which thread runs which trial.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// A node in a deterministic tree of random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream for leaf `key`.
    pub fn stream(&self, key: u64) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(key);
        rng
    }

    /// A child subtree, independent of this node's leaves.
    pub fn child(&self, key: u64) -> SeedTree {
        SeedTree::new(splitmix64(self.seed ^ splitmix64(key.wrapping_add(0xA5A5_5A5A))))
    }
}

/// A uniform draw from the open interval (0, 1).
#[inline]
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}
