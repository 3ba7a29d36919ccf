//! Deterministic stream expansion behind a small interface.

use crate::f2::BitVec;
use sha2::{Digest, Sha256};

/// Deterministic expansion of a short seed into a long bit string.
pub trait Prg {
    fn expand(&self, seed: &BitVec, out_len: usize) -> BitVec;
}

/// SHA-256 in counter mode: block i is H(domain ‖ seed_len ‖ seed ‖ i).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShaPrg;

impl Prg for ShaPrg {
    fn expand(&self, seed: &BitVec, out_len: usize) -> BitVec {
        let seed_bytes = seed.to_bytes();
        let mut bytes = Vec::with_capacity(out_len.div_ceil(8));
        let mut counter = 0u64;
        while bytes.len() * 8 < out_len {
            let mut h = Sha256::new();
            h.update(b"prc-prg-v1");
            h.update((seed.len() as u64).to_le_bytes());
            h.update(&seed_bytes);
            h.update(counter.to_le_bytes());
            bytes.extend_from_slice(&h.finalize());
            counter += 1;
        }
        bytes.truncate(out_len.div_ceil(8));
        // Zero padding bits beyond out_len before reconstructing.
        if out_len % 8 != 0 {
            let last = bytes.len() - 1;
            bytes[last] &= (1u8 << (out_len % 8)) - 1;
        }
        BitVec::from_bytes(&bytes, out_len).expect("length by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let seed = BitVec::from_bit_string("1011001110001111").unwrap();
        let a = ShaPrg.expand(&seed, 1000);
        let b = ShaPrg.expand(&seed, 1000);
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_seeds_distinct_outputs() {
        let mut outputs = std::collections::HashSet::new();
        for i in 0..200u32 {
            let mut seed = BitVec::zeros(32);
            for bit in 0..32 {
                seed.set(bit, i >> bit & 1 == 1);
            }
            outputs.insert(ShaPrg.expand(&seed, 256).to_bytes());
        }
        assert_eq!(outputs.len(), 200);
    }

    #[test]
    fn output_balanced() {
        let seed = BitVec::from_bit_string("0101").unwrap();
        let out = ShaPrg.expand(&seed, 100_000);
        let rate = out.hamming_weight() as f64 / 100_000.0;
        assert!((rate - 0.5).abs() < 0.01, "rate {rate}");
    }

    #[test]
    fn prefix_consistency_not_required_but_length_exact() {
        let seed = BitVec::from_bit_string("111").unwrap();
        for len in [1usize, 7, 8, 9, 255, 256, 257] {
            assert_eq!(ShaPrg.expand(&seed, len).len(), len);
        }
    }
}
