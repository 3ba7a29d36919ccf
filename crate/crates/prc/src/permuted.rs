//! The heuristic permuted code: ECC-encode a random prefix plus the
//! message, add Bernoulli noise, and hide the structure behind a secret
//! permutation.

use crate::ecc::Ecc;
use crate::f2::{random_permutation, BitVec, F2Error, Permutation};
use crate::rng::RandomSource;
use crate::zero::ZeroError;

#[derive(Clone, Debug)]
pub struct PermutedCodeKey<E: Ecc> {
    pub pi: Permutation,
    pub ecc: E,
    pub eta: f64,
    /// Random prefix bits prepended to every message.
    pub lambda: usize,
}

impl<E: Ecc> PermutedCodeKey<E> {
    /// Payload bits per codeword.
    pub fn message_len(&self) -> usize {
        self.ecc.message_len() - self.lambda
    }

    pub fn block_len(&self) -> usize {
        self.ecc.block_len()
    }
}

pub fn permuted_keygen<E: Ecc>(
    ecc: E,
    lambda: usize,
    eta: f64,
    rng: &mut RandomSource,
) -> Result<PermutedCodeKey<E>, ZeroError> {
    if lambda >= ecc.message_len() {
        return Err(ZeroError::BadParams(format!(
            "lambda={lambda} leaves no payload in {}-bit messages",
            ecc.message_len()
        )));
    }
    if !(0.0..0.5).contains(&eta) {
        return Err(ZeroError::BadParams(format!("eta={eta} out of [0, 1/2)")));
    }
    let pi = random_permutation(ecc.block_len(), rng);
    Ok(PermutedCodeKey { pi, ecc, eta, lambda })
}

/// π(enc(r ‖ m) ⊕ e) with fresh r ← F₂^λ and e ← Ber(n, η).
pub fn permuted_encode<E: Ecc>(
    key: &PermutedCodeKey<E>,
    m: &BitVec,
    rng: &mut RandomSource,
) -> Result<BitVec, F2Error> {
    if m.len() != key.message_len() {
        return Err(F2Error::LengthMismatch { expected: key.message_len(), actual: m.len() });
    }
    let r = BitVec::random(key.lambda, rng);
    let mut c = key.ecc.encode(&r.concat(m))?;
    if key.eta > 0.0 {
        c.xor_in_place(&BitVec::bernoulli(c.len(), key.eta, rng))?;
    }
    key.pi.apply(&c)
}

/// Un-permutes, ECC-decodes, and strips the random prefix.
pub fn permuted_decode<E: Ecc>(
    key: &PermutedCodeKey<E>,
    x: &BitVec,
) -> Result<Option<BitVec>, F2Error> {
    if x.len() != key.block_len() {
        return Err(F2Error::LengthMismatch { expected: key.block_len(), actual: x.len() });
    }
    let c = key.pi.apply_inverse(x)?;
    Ok(key
        .ecc
        .decode(&c)?
        .map(|d| d.slice(key.lambda, d.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelSpec;
    use crate::ecc::RepetitionEcc;

    fn key(rng: &mut RandomSource) -> PermutedCodeKey<RepetitionEcc> {
        permuted_keygen(RepetitionEcc::new(48, 9).unwrap(), 16, 0.0, rng).unwrap()
    }

    #[test]
    fn round_trip_noiseless() {
        let mut rng = RandomSource::from_u64(131);
        let k = key(&mut rng);
        for _ in 0..20 {
            let m = BitVec::random(32, &mut rng);
            let x = permuted_encode(&k, &m, &mut rng).unwrap();
            assert_eq!(permuted_decode(&k, &x).unwrap().unwrap(), m);
        }
    }

    #[test]
    fn fresh_randomness_per_encode() {
        let mut rng = RandomSource::from_u64(132);
        let k = permuted_keygen(RepetitionEcc::new(48, 9).unwrap(), 16, 0.05, &mut rng).unwrap();
        let m = BitVec::zeros(32);
        assert_ne!(
            permuted_encode(&k, &m, &mut rng).unwrap(),
            permuted_encode(&k, &m, &mut rng).unwrap()
        );
    }

    #[test]
    fn robust_at_half_tolerated_rate() {
        let mut rng = RandomSource::from_u64(133);
        let k = key(&mut rng);
        let p = k.ecc.tolerated_rate() / 2.0;
        let ch = ChannelSpec::Bsc(p);
        let mut ok = 0;
        for _ in 0..200 {
            let m = BitVec::random(32, &mut rng);
            let x = permuted_encode(&k, &m, &mut rng).unwrap();
            if permuted_decode(&k, &ch.apply(&x, &mut rng)).unwrap() == Some(m) {
                ok += 1;
            }
        }
        assert!(ok >= 198, "{ok}/200");
    }

    #[test]
    fn lambda_must_leave_payload() {
        let mut rng = RandomSource::from_u64(134);
        assert!(permuted_keygen(RepetitionEcc::new(16, 3).unwrap(), 16, 0.0, &mut rng).is_err());
    }
}
