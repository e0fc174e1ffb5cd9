//! Hierarchical, parallelism-independent random streams.
//!
//! A [`SeedTree`] node is a 64-bit key. Children are derived by mixing the key
//! with a tag (SplitMix64 finalizer), and every replicate draws from its own
//! ChaCha8 stream selected by index. A replicate's draws therefore depend only
//! on (master seed, path of tags, replicate index) and never on how work was
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type used for every replicate stream.
pub type Stream = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedTree {
    key: u64,
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        Self { key: seed }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Child node keyed by an integer tag.
    pub fn child(&self, tag: u64) -> SeedTree {
        SeedTree {
            key: splitmix(splitmix(self.key) ^ tag),
        }
    }

    /// Child node keyed by a label (FNV-1a of the bytes).
    pub fn named(&self, label: &str) -> SeedTree {
        let h = label
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        self.child(h)
    }

    /// Independent generator for replicate `index`.
    pub fn stream(&self, index: u64) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(index);
        rng
    }
}
