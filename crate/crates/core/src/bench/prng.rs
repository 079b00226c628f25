//! Named random streams.
//!
//! Every generator draws from ChaCha20 seeded with the user seed, using the
//! 64-bit FNV-1a hash of a stream name as the ChaCha stream id. Streams with
//! different names are independent and the output is identical on every
//! platform.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, name: &str) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(name));
    rng
}
