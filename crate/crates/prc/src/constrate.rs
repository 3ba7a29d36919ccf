//! Constant-rate PRC: a short pseudorandom seed carried by the multi-bit
//! PRC, a PRG-padded ECC block carrying the payload, and an outer
//! permutation over the concatenation.

use crate::ecc::Ecc;
use crate::f2::{random_permutation, BitVec, F2Error, Permutation};
use crate::multibit::{multibit_decode, multibit_encode, multibit_keygen, MultiBitKey};
use crate::prg::Prg;
use crate::rng::RandomSource;
use crate::zero::{PrcParams, ZeroError};

#[derive(Clone, Debug)]
pub struct ConstRateKey<E: Ecc, P: Prg> {
    /// Inner multi-bit PRC carrying λ-bit seeds.
    pub inner: MultiBitKey,
    pub ecc: E,
    pub prg: P,
    /// Outer permutation over n′ + n_ecc.
    pub pi: Permutation,
    pub lambda: usize,
}

impl<E: Ecc, P: Prg> ConstRateKey<E, P> {
    pub fn message_len(&self) -> usize {
        self.ecc.message_len()
    }

    /// Total codeword length n′ + n_ecc.
    pub fn block_len(&self) -> usize {
        self.inner.block_len() + self.ecc.block_len()
    }

    /// k / (n′ + n_ecc) — the arithmetic rate claim.
    pub fn rate(&self) -> f64 {
        self.message_len() as f64 / self.block_len() as f64
    }
}

pub fn constrate_keygen<E: Ecc, P: Prg>(
    lambda: usize,
    inner_params: &PrcParams,
    ecc: E,
    prg: P,
    rng: &mut RandomSource,
) -> Result<ConstRateKey<E, P>, ZeroError> {
    let inner = multibit_keygen(lambda, inner_params, rng)?;
    let pi = random_permutation(inner.block_len() + ecc.block_len(), rng);
    Ok(ConstRateKey { inner, ecc, prg, pi, lambda })
}

/// π(PRC_λ.Encode(r) ‖ PRG(r) ⊕ Enc(m)) with a fresh λ-bit r per call.
pub fn constrate_encode<E: Ecc, P: Prg>(
    key: &ConstRateKey<E, P>,
    m: &BitVec,
    rng: &mut RandomSource,
) -> Result<BitVec, F2Error> {
    if m.len() != key.message_len() {
        return Err(F2Error::LengthMismatch { expected: key.message_len(), actual: m.len() });
    }
    let r = BitVec::random(key.lambda, rng);
    let y1 = multibit_encode(&key.inner, &r, rng)?;
    let mut y2 = key.ecc.encode(m)?;
    y2.xor_in_place(&key.prg.expand(&r, y2.len()))?;
    key.pi.apply(&y1.concat(&y2))
}

/// Un-permutes, recovers r from the inner PRC, strips the PRG pad and
/// ECC-decodes; `None` when the seed is unrecoverable or the ECC fails.
pub fn constrate_decode<E: Ecc, P: Prg>(
    key: &ConstRateKey<E, P>,
    c: &BitVec,
) -> Result<Option<BitVec>, ZeroError> {
    if c.len() != key.block_len() {
        return Err(ZeroError::F2(F2Error::LengthMismatch {
            expected: key.block_len(),
            actual: c.len(),
        }));
    }
    let y = key.pi.apply_inverse(c)?;
    let split = key.inner.block_len();
    let y1 = y.slice(0, split);
    let mut y2 = y.slice(split, y.len());
    let Some(r) = multibit_decode(&key.inner, &y1)?.message else {
        return Ok(None);
    };
    y2.xor_in_place(&key.prg.expand(&r, y2.len()))?;
    Ok(key.ecc.decode(&y2)?)
}
