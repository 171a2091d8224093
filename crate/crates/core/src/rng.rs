//! Per-path random streams. Every path draws from its own ChaCha stream keyed by
//! `(seed, domain, path_id)`, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum StreamDomain {
    Defaults,
    Exposure,
}

impl StreamDomain {
    fn tag(self) -> u64 {
        match self {
            StreamDomain::Defaults => 0x6465_6661_756c_7473,
            StreamDomain::Exposure => 0x6578_706f_7375_7265,
        }
    }
}

pub(crate) fn path_rng(seed: u64, domain: StreamDomain, path_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.tag());
    rng.set_stream(path_id);
    rng
}
