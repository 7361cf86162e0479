//! Seeded random substreams.
//!
//! Every random decision in a run draws from a stream keyed by
//! `(seed, purpose, iteration, index)`, so fish can be processed in any order
//! (or in parallel) without changing results, and an operator that draws a
//! different number of values cannot shift the draws of another operator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Purpose {
    Init = 1,
    Individual = 2,
    Probe = 3,
    Links = 4,
    Volitive = 5,
    Sampling = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn substream(seed: u64, purpose: Purpose, iteration: u64, index: u64) -> StreamRng {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ purpose as u64);
    h = splitmix64(h ^ iteration);
    h = splitmix64(h ^ index);
    ChaCha8Rng::seed_from_u64(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = substream(7, Purpose::Individual, 3, 4).random();
        let b: u64 = substream(7, Purpose::Individual, 3, 4).random();
        let c: u64 = substream(7, Purpose::Individual, 3, 5).random();
        let d: u64 = substream(7, Purpose::Volitive, 3, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
