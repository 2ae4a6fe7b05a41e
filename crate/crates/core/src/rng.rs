//! Named deterministic random streams derived from a single 64-bit seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SeededRng = ChaCha8Rng;

/// Independent sub-streams of one seed, so each randomized component can be
/// regression-tested on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Generation,
    Locate,
    Fingerprint,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Generation => 0,
            Stream::Locate => 1,
            Stream::Fingerprint => 2,
        }
    }
}

pub fn stream_rng(seed: u64, stream: Stream) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}
