//! Deterministic per-task seeds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce5_e9b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of task `index` under a run seed. Depends only on the pair, so task
/// `k` sees the same stream no matter how many tasks run or in what order.
pub fn task_seed(seed: u64, index: u64) -> u64 {
    mix(mix(seed) ^ index)
}

pub fn task_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(task_seed(seed, index))
}
