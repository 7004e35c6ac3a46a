//! Seed derivation.
//!
//! All randomness is drawn from ChaCha8 streams. A stream is identified by a
//! master seed plus a short path of integers (a domain tag, a condition key, a
//! replicate index, ...). The path is folded into a 64-bit seed with the
//! SplitMix64 finalizer, so the seed of a work unit depends only on its
//! identity and never on which worker runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep independent uses of the same (master, replicate) apart.
pub mod tag {
    pub const SUBSAMPLE: u64 = 0x5355_4253;
    pub const NOISE: u64 = 0x4e4f_4953;
    pub const BASE: u64 = 0x4241_5345;
    pub const BOOTSTRAP: u64 = 0x424f_4f54;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `path` into `master`, one SplitMix64 round per element.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &part| splitmix64(acc ^ splitmix64(part)))
}

/// The generator used throughout the crate.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
