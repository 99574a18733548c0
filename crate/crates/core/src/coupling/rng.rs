//! Reproducible random streams: one ChaCha8 key per (master seed, purpose),
//! one stream per replication index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for; distinct purposes never share a key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Brownian = 1,
    ReferenceArea = 2,
    GaussianArea = 3,
    Baseline = 4,
    Scheme = 5,
    Test = 6,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, purpose, replication)`.
pub fn stream_rng(seed: u64, purpose: Purpose, replication: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut s = seed ^ splitmix(purpose as u64);
    for chunk in key.chunks_mut(8) {
        s = splitmix(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replication);
    rng
}
