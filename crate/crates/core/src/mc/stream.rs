use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Words reserved for one block of a stream.
const BLOCK_SHIFT: u32 = 40;

/// A reproducible random stream: a ChaCha20 key derived from `seed`, with
/// `stream_id` selecting one of 2⁶⁴ independent nonces.
///
/// Each stream is further cut into blocks of 2⁴⁰ words so that parallel
/// workers can start at fixed offsets without coordinating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Generator positioned at the start of the stream.
    pub fn rng(&self) -> ChaCha20Rng {
        self.rng_at(0)
    }

    /// Generator positioned at the start of block `block`.
    pub fn rng_at(&self, block: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng.set_word_pos(u128::from(block) << BLOCK_SHIFT);
        rng
    }

    /// The same seed on another stream.
    pub fn with_stream(&self, stream_id: u64) -> Self {
        Self { stream_id, ..*self }
    }
}
