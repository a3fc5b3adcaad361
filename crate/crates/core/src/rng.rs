//! Deterministic random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type NodeRng = ChaCha8Rng;

/// Private stream for one node: the master seed keys the generator and the
/// node id selects one of its 2^64 independent streams.
pub fn node_stream(master_seed: u64, node_id: usize) -> NodeRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(node_id as u64);
    rng
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of integers into one well-mixed seed. Stable across
/// platforms and compiler versions.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6A09_E667_F3BC_C908, |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}
