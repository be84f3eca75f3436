//! Seed derivation. Every random draw in the crate comes from a ChaCha8
//! stream keyed by a seed derived here, so results do not depend on how
//! trials are spread over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier of the generator, recorded next to every experiment row.
pub const RNG_ALGORITHM: &str = "chacha8";

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with any number of indices (trial, job, stream tag).
pub fn derive_seed(master: u64, indices: &[u64]) -> u64 {
    indices.iter().fold(splitmix64(master), |acc, &i| {
        splitmix64(acc ^ splitmix64(i.wrapping_add(0x5851_f42d_4c95_7f2d)))
    })
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(master: u64, indices: &[u64]) -> Rng {
    rng_from_seed(derive_seed(master, indices))
}
