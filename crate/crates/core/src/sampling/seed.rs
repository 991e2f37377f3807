use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Address of an independent random stream.
///
/// The generator is ChaCha12 keyed by `ChaCha12Rng::seed_from_u64(master_seed)`.
/// Each `stream_index` owns four ChaCha stream ids,
/// `4 * stream_index + lane` (wrapping), one per [`Lane`]. ChaCha streams
/// are disjoint counter spaces, so the state of every lane is a pure
/// function of `(master_seed, stream_index, lane)` and does not depend on
/// which thread draws from it. Indices below `2^62` never share a lane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

/// Which variable a stream feeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lane {
    X = 0,
    Y = 1,
    Reference = 2,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self, lane: Lane) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index.wrapping_mul(4).wrapping_add(lane as u64));
        rng
    }
}
