use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counter-based, portable generator used for every random draw in the suite.
pub type SimRng = ChaCha8Rng;

/// Independent stream `instance` under `master_seed`. Streams never overlap
/// and are bit-identical across platforms.
pub fn stream_rng(master_seed: u64, instance: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(instance);
    rng
}

/// Scalar seed for repetition `index` of an experiment (splitmix64 mix).
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
