//! Counter-based random substreams.
//!
//! Every random quantity is drawn from a generator seeded by hashing
//! `(master seed, purpose, index, sample)`. Results therefore depend only on
//! the master seed and the logical position of the work item, never on how
//! work is split across threads or in which order it runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a substream is used for. Distinct purposes never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Posterior = 1,
    Sample = 2,
    Rnd = 3,
    PairParams = 4,
    Bootstrap = 5,
    SeriesSample = 6,
    SeriesPosterior = 7,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the substream for `(purpose, index, sample)` under `master`.
pub fn substream_seed(master: u64, purpose: Purpose, index: u64, sample: u64) -> u64 {
    let mut h = mix64(master.wrapping_add(GOLDEN));
    h = mix64(h ^ (purpose as u64).wrapping_mul(GOLDEN));
    h = mix64(h ^ mix64(index.wrapping_add(0x632B_E59B_D9B4_E019)));
    mix64(h ^ mix64(sample.wrapping_add(0x8CB9_2BA7_2F3D_8DD7)))
}

/// Generator for one substream.
pub fn substream(master: u64, purpose: Purpose, index: u64, sample: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(master, purpose, index, sample))
}

/// Uniform draw in the open interval (0, 1) with 53 bits of resolution.
pub fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}
