//! The majority code MajEnc/MajDec and the deletion-robust PRC wrapper.
//!
//! MajEnc maps each bit to a uniform odd-width block conditioned on its
//! majority (there are exactly 2^{m−1} such blocks per value, so uniform
//! input stays uniform). MajDec evenly re-partitions whatever arrives —
//! absorbing deletions — and takes per-block majorities.

use crate::f2::BitVec;
use crate::multibit::{multibit_decode, multibit_encode, MultiBitKey};
use crate::rng::RandomSource;
use crate::zero::{self, DecodeOutcome, PrcParams, ZeroBitPublicKey, ZeroBitSecretKey, ZeroError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MajorityError {
    #[error("repetition width must be odd, got {0}")]
    EvenWidth(usize),
    #[error("received string of {len} bits is shorter than {n} blocks")]
    TooShort { len: usize, n: usize },
    #[error(transparent)]
    Zero(#[from] ZeroError),
    #[error(transparent)]
    F2(#[from] crate::f2::F2Error),
}

/// Each input bit becomes a uniform m-bit block with matching majority,
/// by rejection sampling (expected two draws per block).
pub fn majenc(x: &BitVec, m: usize, rng: &mut RandomSource) -> Result<BitVec, MajorityError> {
    if m % 2 == 0 {
        return Err(MajorityError::EvenWidth(m));
    }
    let mut out = BitVec::zeros(x.len() * m);
    for i in 0..x.len() {
        let want = x.get(i);
        loop {
            let block = BitVec::random(m, rng);
            if (2 * block.hamming_weight() > m) == want {
                for k in 0..m {
                    out.set(i * m + k, block.get(k));
                }
                break;
            }
        }
    }
    Ok(out)
}

/// Evenly partitions `z` into `n` blocks (the first |z| mod n blocks get
/// the extra bit) and outputs per-block majorities; even-length ties are
/// resolved by a fresh random bit.
pub fn majdec(z: &BitVec, n: usize, rng: &mut RandomSource) -> Result<BitVec, MajorityError> {
    if z.len() < n {
        return Err(MajorityError::TooShort { len: z.len(), n });
    }
    let base = z.len() / n;
    let extra = z.len() % n;
    let mut out = BitVec::zeros(n);
    let mut start = 0;
    for i in 0..n {
        let len = base + usize::from(i < extra);
        let ones = z.count_ones_range(start, start + len);
        let bit = match (2 * ones).cmp(&len) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => rng.bit(),
        };
        out.set(i, bit);
        start += len;
    }
    Ok(out)
}

/// Inner code of a deletion-robust PRC.
#[derive(Clone, Debug)]
pub enum DeletionInner {
    Zero { sk: ZeroBitSecretKey, pk: ZeroBitPublicKey },
    Multi(MultiBitKey),
}

impl DeletionInner {
    pub fn block_len(&self) -> usize {
        match self {
            DeletionInner::Zero { sk, .. } => sk.params.n,
            DeletionInner::Multi(key) => key.block_len(),
        }
    }
}

/// PRC_del[m, PRC]: majority-encode the inner codeword.
#[derive(Clone, Debug)]
pub struct DeletionKey {
    pub inner: DeletionInner,
    pub m: usize,
}

/// Deletion decode report.
#[derive(Clone, Debug)]
pub struct DeletionOutcome {
    pub detected: bool,
    /// Message bits when the inner code is multi-bit.
    pub message: Option<BitVec>,
    /// Zero-bit decode detail when the inner code is zero-bit.
    pub zero_outcome: Option<DecodeOutcome>,
}

pub fn deletion_keygen(
    inner_params: &PrcParams,
    m: usize,
    rng: &mut RandomSource,
) -> Result<DeletionKey, MajorityError> {
    if m % 2 == 0 {
        return Err(MajorityError::EvenWidth(m));
    }
    let (sk, pk) = zero::keygen(inner_params, rng)?;
    Ok(DeletionKey { inner: DeletionInner::Zero { sk, pk }, m })
}

pub fn deletion_keygen_multi(
    ell: usize,
    inner_params: &PrcParams,
    m: usize,
    rng: &mut RandomSource,
) -> Result<DeletionKey, MajorityError> {
    if m % 2 == 0 {
        return Err(MajorityError::EvenWidth(m));
    }
    let inner = crate::multibit::multibit_keygen(ell, inner_params, rng)?;
    Ok(DeletionKey { inner: DeletionInner::Multi(inner), m })
}

/// MajEnc_m(Encode(…)); `msg` is required for a multi-bit inner code and
/// ignored for a zero-bit one.
pub fn deletion_encode(
    key: &DeletionKey,
    msg: Option<&BitVec>,
    rng: &mut RandomSource,
) -> Result<BitVec, MajorityError> {
    let inner = match &key.inner {
        DeletionInner::Zero { pk, .. } => zero::encode(pk, rng),
        DeletionInner::Multi(mkey) => {
            let msg = msg.ok_or_else(|| {
                MajorityError::Zero(ZeroError::BadParams("multi-bit inner needs a message".into()))
            })?;
            multibit_encode(mkey, msg, rng)?
        }
    };
    majenc(&inner, key.m, rng)
}

/// Decode(MajDec_n(z)).
pub fn deletion_decode(
    key: &DeletionKey,
    z: &BitVec,
    rng: &mut RandomSource,
) -> Result<DeletionOutcome, MajorityError> {
    let n = key.inner.block_len();
    let y = majdec(z, n, rng)?;
    match &key.inner {
        DeletionInner::Zero { sk, .. } => {
            let outcome = zero::decode(sk, &y)?;
            Ok(DeletionOutcome {
                detected: outcome.detected(),
                message: None,
                zero_outcome: Some(outcome),
            })
        }
        DeletionInner::Multi(mkey) => {
            let outcome = multibit_decode(mkey, &y)?;
            Ok(DeletionOutcome {
                detected: outcome.message.is_some(),
                message: outcome.message,
                zero_outcome: None,
            })
        }
    }
}

/// Empirical per-bit agreement of `majdec(channel(majenc(x)))` with `x`
/// — the tuning experiment behind the desk-scale (n, m) choices.
pub fn estimate_majority_agreement(
    n: usize,
    m: usize,
    channel: &crate::channel::ChannelSpec,
    trials: usize,
    rng: &mut RandomSource,
) -> Result<f64, MajorityError> {
    let mut agree = 0usize;
    for _ in 0..trials {
        let x = BitVec::random(n, rng);
        let enc = majenc(&x, m, rng)?;
        let recv = channel.apply(&enc, rng);
        let dec = majdec(&recv, n, rng)?;
        agree += (0..n).filter(|&i| x.get(i) == dec.get(i)).count();
    }
    Ok(agree as f64 / (n * trials) as f64)
}
