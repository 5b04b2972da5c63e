//! Seeded random streams.
//!
//! Every stochastic routine draws from ChaCha8 (`rand_chacha::ChaCha8Rng`),
//! seeded with `seed_from_u64(seed)` and switched to an explicit stream
//! number with `set_stream`. ChaCha output is specified independently of
//! platform and word size, so a `(seed, stream)` pair always reproduces the
//! same draws. Stream numbers in use:
//!
//! * `0..3` sampling for the Z, X and Y settings of a simulated run
//! * `1000 + b` bootstrap resample `b`
//! * `2000` Haar unitaries for invariance checks

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const BOOTSTRAP_STREAM_BASE: u64 = 1000;
pub const HAAR_STREAM: u64 = 2000;

pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
