//! Seedable randomness contract.
//!
//! Every randomized operation in this crate takes a [`RandomSource`]
//! explicitly; there is no global RNG. Identical seeds yield identical
//! draw sequences, which is what makes the acceptance suites and the
//! key-file golden tests reproducible byte-for-byte.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Deterministic random stream seeded by 32 bytes.
#[derive(Clone, Debug)]
pub struct RandomSource {
    rng: ChaCha12Rng,
}

impl RandomSource {
    pub fn from_seed(seed: [u8; 32]) -> Self {
        Self { rng: ChaCha12Rng::from_seed(seed) }
    }

    /// Convenience constructor: spreads a 64-bit seed over the full seed
    /// via splitmix64 so nearby integer seeds give unrelated streams.
    pub fn from_u64(seed: u64) -> Self {
        let mut s = seed;
        let mut bytes = [0u8; 32];
        for chunk in bytes.chunks_exact_mut(8) {
            s = s.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = s;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^= z >> 31;
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        Self::from_seed(bytes)
    }

    /// Derives an independent child stream from this one.
    pub fn fork(&mut self) -> RandomSource {
        let mut seed = [0u8; 32];
        self.rng.fill_bytes(&mut seed);
        RandomSource::from_seed(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn fill_words(&mut self, words: &mut [u64]) {
        for w in words {
            *w = self.rng.next_u64();
        }
    }

    /// Uniform bit.
    pub fn bit(&mut self) -> bool {
        self.rng.next_u32() & 1 == 1
    }

    /// Uniform integer in `[0, n)`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Uniform float in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Bernoulli(p) draw; `p` is clamped to `[0, 1]`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_seed_identical_stream() {
        let mut a = RandomSource::from_seed([7u8; 32]);
        let mut b = RandomSource::from_seed([7u8; 32]);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn u64_seeds_differ() {
        let mut a = RandomSource::from_u64(1);
        let mut b = RandomSource::from_u64(2);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn fork_is_independent_of_parent_consumption() {
        let mut a = RandomSource::from_u64(9);
        let mut child = a.fork();
        let first = child.next_u64();
        // Re-derive: same parent state gives the same child.
        let mut a2 = RandomSource::from_u64(9);
        let mut child2 = a2.fork();
        assert_eq!(first, child2.next_u64());
    }

    #[test]
    fn bernoulli_extremes() {
        let mut r = RandomSource::from_u64(3);
        for _ in 0..100 {
            assert!(!r.bernoulli(0.0));
            assert!(r.bernoulli(1.0));
        }
    }
}
