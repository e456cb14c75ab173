//! Seed plumbing.
//!
//! All randomness flows through `ChaCha8Rng::seed_from_u64`. Tasks inside a
//! scan get their own seed from a master seed via [`derive_seed`], so results
//! do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in output metadata.
pub const GENERATOR: &str = "ChaCha8Rng::seed_from_u64 (rand_chacha 0.3)";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer applied to `master + counter * golden_gamma`.
///
/// Counter `k` always yields the same seed for a given master, which is the
/// per-task seed scheme used by scans (`counter = n_qubits << 32 | replica`).
pub fn derive_seed(master: u64, counter: u64) -> u64 {
    let mut z = master.wrapping_add(counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
