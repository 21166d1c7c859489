//! Reproducible per-replication random streams.
//!
//! Each replication draws from a ChaCha8 stream keyed by
//! (master seed, replication index) through a splitmix64 expansion, so the
//! result of a Monte Carlo run does not depend on how replications are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MIX_CONSTANT: u64 = 0xD6E8_FEB8_6659_FD93;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The random stream of one replication.
pub fn replication_rng(master_seed: u64, replication: u64) -> ChaCha8Rng {
    let mut state = master_seed ^ replication.wrapping_mul(MIX_CONSTANT);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
