//! Uniform permutations of `[n]` and their action on bit vectors.

use super::{BitVec, F2Error};
use crate::rng::RandomSource;

/// A permutation π of `[n]`, stored with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl Permutation {
    /// Builds from a forward map; validates bijectivity.
    pub fn from_forward(forward: Vec<u32>) -> Result<Self, F2Error> {
        let n = forward.len();
        let mut inverse = vec![u32::MAX; n];
        for (i, &f) in forward.iter().enumerate() {
            let f = f as usize;
            if f >= n || inverse[f] != u32::MAX {
                return Err(F2Error::IndexOutOfRange { index: f, len: n });
            }
            inverse[f] = i as u32;
        }
        Ok(Self { forward, inverse })
    }

    pub fn identity(n: usize) -> Self {
        let forward: Vec<u32> = (0..n as u32).collect();
        Self { inverse: forward.clone(), forward }
    }

    pub fn n(&self) -> usize {
        self.forward.len()
    }

    pub fn forward_map(&self) -> &[u32] {
        &self.forward
    }

    /// π(i).
    pub fn forward(&self, i: usize) -> usize {
        self.forward[i] as usize
    }

    /// π⁻¹(i).
    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i] as usize
    }

    /// out[k] = v[π(k)].
    pub fn apply(&self, v: &BitVec) -> Result<BitVec, F2Error> {
        if v.len() != self.n() {
            return Err(F2Error::LengthMismatch { expected: self.n(), actual: v.len() });
        }
        let mut out = BitVec::zeros(v.len());
        for (k, &f) in self.forward.iter().enumerate() {
            if v.get(f as usize) {
                out.set(k, true);
            }
        }
        Ok(out)
    }

    /// out[k] = v[π⁻¹(k)]; inverse of [`Self::apply`].
    pub fn apply_inverse(&self, v: &BitVec) -> Result<BitVec, F2Error> {
        if v.len() != self.n() {
            return Err(F2Error::LengthMismatch { expected: self.n(), actual: v.len() });
        }
        let mut out = BitVec::zeros(v.len());
        for (k, &inv) in self.inverse.iter().enumerate() {
            if v.get(inv as usize) {
                out.set(k, true);
            }
        }
        Ok(out)
    }
}

/// Uniform permutation via Fisher–Yates.
pub fn random_permutation(n: usize, rng: &mut RandomSource) -> Permutation {
    let mut forward: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        let j = rng.index(i + 1);
        forward.swap(i, j);
    }
    Permutation::from_forward(forward).expect("Fisher-Yates yields a bijection")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_sizes() {
        let mut rng = RandomSource::from_u64(41);
        assert_eq!(random_permutation(1, &mut rng), Permutation::identity(1));
        let p0 = random_permutation(0, &mut rng);
        assert_eq!(p0.n(), 0);
    }

    #[test]
    fn round_trip_is_identity() {
        let mut rng = RandomSource::from_u64(42);
        for n in 1..=64 {
            let pi = random_permutation(n, &mut rng);
            let v = BitVec::random(n, &mut rng);
            assert_eq!(pi.apply_inverse(&pi.apply(&v).unwrap()).unwrap(), v);
            assert_eq!(pi.apply(&pi.apply_inverse(&v).unwrap()).unwrap(), v);
        }
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::from_forward(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_forward(vec![0, 3]).is_err());
    }

    #[test]
    fn length_mismatch() {
        let pi = Permutation::identity(4);
        assert!(pi.apply(&BitVec::zeros(5)).is_err());
    }

    #[test]
    fn uniform_over_permutations() {
        // N=4: chi-square over the 24 permutations.
        let mut rng = RandomSource::from_u64(43);
        let mut counts = std::collections::HashMap::new();
        let trials = 100_000;
        for _ in 0..trials {
            let pi = random_permutation(4, &mut rng);
            *counts.entry(pi.forward_map().to_vec()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 24);
        let e = trials as f64 / 24.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 23 df at 0.001 → critical value 49.73
        assert!(chi2 < 49.73, "chi2 = {chi2}");
    }
}
