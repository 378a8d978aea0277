//! Deterministic random-stream derivation.
//!
//! Experiments are reproducible from a single master seed. Every unit of
//! randomized work (a candidate topology, an RWA repetition, ...) draws from
//! its own stream, derived as a pure function of the master seed and the
//! unit's position in the experiment, so results do not depend on execution
//! order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Node in a deterministic seed tree.
///
/// `StreamSeed::new(master).child(a).child(b)` always denotes the same
/// stream; children with distinct indices are statistically independent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamSeed(u64);

impl StreamSeed {
    pub fn new(master: u64) -> Self {
        StreamSeed(splitmix64(master))
    }

    /// Derives the `index`-th child seed.
    pub fn child(self, index: u64) -> Self {
        StreamSeed(splitmix64(
            self.0 ^ splitmix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)),
        ))
    }

    /// Instantiates the generator for this stream.
    pub fn rng(self) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(self.0)
    }
}

/// SplitMix64 step; full-period mixer over u64.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
