//! Multi-bit PRC from the zero-bit code.
//!
//! A message of ℓ bits becomes ℓ+1 blocks of length n: block i is a
//! zero-bit codeword when mᵢ = 1 and uniform otherwise, the final
//! sentinel block is always a codeword, and the concatenation is run
//! through a secret permutation that disperses bursty errors evenly
//! across blocks.

use crate::f2::{random_permutation, BitVec, F2Error, Permutation};
use crate::rng::RandomSource;
use crate::zero::{self, PrcParams, ZeroBitPublicKey, ZeroBitSecretKey, ZeroError};

#[derive(Clone, Debug)]
pub struct MultiBitKey {
    pub inner_sk: ZeroBitSecretKey,
    pub inner_pk: ZeroBitPublicKey,
    pub ell: usize,
    pub pi: Permutation,
}

impl MultiBitKey {
    /// Inner zero-bit block length.
    pub fn inner_n(&self) -> usize {
        self.inner_sk.params.n
    }

    /// Codeword length n·(ℓ+1).
    pub fn block_len(&self) -> usize {
        self.inner_n() * (self.ell + 1)
    }
}

/// Fresh inner keys plus a fresh dispersal permutation over n·(ℓ+1).
pub fn multibit_keygen(
    ell: usize,
    inner_params: &PrcParams,
    rng: &mut RandomSource,
) -> Result<MultiBitKey, ZeroError> {
    if ell == 0 {
        return Err(ZeroError::BadParams("ell must be at least 1".into()));
    }
    let (inner_sk, inner_pk) = zero::keygen(inner_params, rng)?;
    let pi = random_permutation(inner_params.n * (ell + 1), rng);
    Ok(MultiBitKey { inner_sk, inner_pk, ell, pi })
}

/// Encodes ℓ message bits into a permuted (ℓ+1)-block codeword.
pub fn multibit_encode(
    key: &MultiBitKey,
    m: &BitVec,
    rng: &mut RandomSource,
) -> Result<BitVec, F2Error> {
    if m.len() != key.ell {
        return Err(F2Error::LengthMismatch { expected: key.ell, actual: m.len() });
    }
    let n = key.inner_n();
    let mut y = BitVec::zeros(0);
    for i in 0..key.ell {
        let block = if m.get(i) {
            zero::encode(&key.inner_pk, rng)
        } else {
            BitVec::random(n, rng)
        };
        y = y.concat(&block);
    }
    y = y.concat(&zero::encode(&key.inner_pk, rng));
    key.pi.apply(&y)
}

/// Per-block decode detail for diagnostics.
#[derive(Clone, Debug)]
pub struct MultiBitOutcome {
    /// Recovered message; `None` when the sentinel block fails.
    pub message: Option<BitVec>,
    /// Unsat counts for blocks 1..ℓ+1 (sentinel last).
    pub block_unsat: Vec<usize>,
    pub threshold: usize,
}

/// Un-permutes, inner-decodes every block, and rejects unless the
/// sentinel block is Detected.
pub fn multibit_decode(key: &MultiBitKey, x: &BitVec) -> Result<MultiBitOutcome, ZeroError> {
    if x.len() != key.block_len() {
        return Err(ZeroError::F2(F2Error::LengthMismatch {
            expected: key.block_len(),
            actual: x.len(),
        }));
    }
    let n = key.inner_n();
    let y = key.pi.apply_inverse(x)?;
    let mut block_unsat = Vec::with_capacity(key.ell + 1);
    let mut bits = BitVec::zeros(key.ell);
    let mut threshold = 0;
    let mut sentinel_ok = false;
    for i in 0..=key.ell {
        let outcome = zero::decode(&key.inner_sk, &y.slice(i * n, (i + 1) * n))?;
        block_unsat.push(outcome.unsat_count);
        threshold = outcome.threshold;
        if i == key.ell {
            sentinel_ok = outcome.detected();
        } else if outcome.detected() {
            bits.set(i, true);
        }
    }
    Ok(MultiBitOutcome {
        message: sentinel_ok.then_some(bits),
        block_unsat,
        threshold,
    })
}
