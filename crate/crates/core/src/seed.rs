//! Deterministic per-task random streams.
//!
//! A task seed is `splitmix64(splitmix64(master ^ C1·stream) ^ C2·index)`; every
//! task draws from its own `ChaCha8Rng`, so parallel scans reproduce bit for bit
//! regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers. The CLI uses the same values as its command ids.
pub mod stream {
    pub const CERTIFY: u64 = 1;
    pub const CRITICAL: u64 = 2;
    pub const LYAPUNOV: u64 = 3;
    pub const IDS: u64 = 4;
    pub const LOCALIZE: u64 = 5;
}

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let a = splitmix64(master ^ stream.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(a ^ index.wrapping_mul(0xA076_1D64_78BD_642F))
}

pub fn task_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, index))
}
