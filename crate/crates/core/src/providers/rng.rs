//! Path-keyed deterministic random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// All randomness in a run flows from one 64-bit seed. Each consumer asks
/// for a substream by key (usually a rendered component path), so results
/// never depend on the order or thread in which substreams are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededRng {
    seed: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_for(&self, key: &str) -> ChaCha8Rng {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update((key.len() as u64).to_le_bytes());
        h.update(key.as_bytes());
        ChaCha8Rng::from_seed(h.finalize().into())
    }
}
