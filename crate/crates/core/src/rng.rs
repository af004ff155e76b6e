//! Named, independent random streams.
//!
//! Every episode derives its generators from `(seed, stream)` so that the draws
//! consumed by one subsystem never perturb another: turning off node noise or
//! swapping the selection strategy leaves the environment trajectory untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::NodeId;

pub type SimRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Environment,
    UpdateCoin,
    Strategy,
    Node(NodeId),
}

impl Stream {
    fn index(self) -> u64 {
        match self {
            Stream::Environment => 0,
            Stream::UpdateCoin => 1,
            Stream::Strategy => 2,
            Stream::Node(k) => 1024 + u64::from(k.0),
        }
    }
}

pub fn stream(seed: u64, which: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which.index());
    rng
}
