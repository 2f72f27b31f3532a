//! Seeded random streams.
//!
//! Every run owns a ChaCha8 stream. Replications derive their seed from the
//! master seed, a cell label and the replication index through
//! [`derive_seed`], which is a fixed function (not `std`'s hasher) so seeds
//! stay stable across toolchains and releases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SolverRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `replication` of the cell labelled `cell`.
pub fn derive_seed(master: u64, cell: &str, replication: u64) -> u64 {
    let mut h = splitmix64(master);
    for chunk in cell.as_bytes().chunks(8) {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        h = splitmix64(h ^ u64::from_le_bytes(word));
    }
    h = splitmix64(h ^ cell.len() as u64);
    splitmix64(h ^ replication)
}

/// Independent child stream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> SolverRng {
    rng_from_seed(splitmix64(seed ^ splitmix64(index.wrapping_add(1))))
}
