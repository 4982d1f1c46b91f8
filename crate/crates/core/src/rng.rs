//! Counter-based random sub-streams.
//!
//! Every random draw in a replication comes from a stream keyed by the root
//! seed, a domain tag and up to three coordinates (typically job, round and
//! device). Two schedulers run with the same root seed therefore see the same
//! execution-time and training noise for any (job, round, device) triple they
//! both visit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Fleet = 1,
    BackgroundLoad = 2,
    Execution = 3,
    Training = 4,
    Selection = 5,
    Genetic = 6,
    Dataset = 7,
    Partition = 8,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a 64-bit seed from the root seed and stream coordinates.
pub fn derive_seed(root: u64, domain: Domain, a: u64, b: u64, c: u64) -> u64 {
    let mut h = splitmix64(root);
    for word in [domain as u64, a, b, c] {
        h = splitmix64(h ^ word);
    }
    h
}

pub fn substream(root: u64, domain: Domain, a: u64, b: u64, c: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, domain, a, b, c))
}
