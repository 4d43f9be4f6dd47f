//! Counter-based seeding.
//!
//! Every random stream is a ChaCha8 generator whose key is derived from the
//! master seed and a purpose label, and whose stream id is the replica index.
//! Replica `i` therefore never depends on how many replicas ran before it or
//! on which worker ran it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// 64-bit FNV-1a.
pub fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed material for one purpose under one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    key: [u8; 32],
}

impl SeedTree {
    pub fn new(master_seed: u64, purpose: &str) -> Self {
        let mut state = master_seed ^ fnv1a(purpose).rotate_left(17);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix(&mut state).to_le_bytes());
        }
        SeedTree { key }
    }

    /// Purpose-derived child, e.g. one per observable in a multi-part experiment.
    pub fn child(&self, purpose: &str) -> Self {
        let base = u64::from_le_bytes(self.key[..8].try_into().unwrap());
        SeedTree::new(base, purpose)
    }

    pub fn stream(&self, replica: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(replica);
        rng
    }
}

/// Shorthand for `SeedTree::new(master_seed, purpose).stream(replica)`.
pub fn replica_rng(master_seed: u64, purpose: &str, replica: u64) -> ChaCha8Rng {
    SeedTree::new(master_seed, purpose).stream(replica)
}
