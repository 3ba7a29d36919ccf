//! Publicly attributable watermarking.
//!
//! The PRC decoding key ships inside the *public* key (a deliberate
//! role reversal: anyone can decode), and each codeword block after the
//! first embeds a signature over all preceding tokens. A verified
//! signature proves the prefix was emitted verbatim; any edit inside
//! the signed prefix breaks verification by design.

use crate::f2::{BitVec, F2Error};
use crate::multibit::{multibit_decode, multibit_encode, multibit_keygen, MultiBitKey};
use crate::rng::RandomSource;
use crate::scan::WindowScanner;
use crate::watermark::{biased_token_probability, Model, Response};
use crate::zero::{PrcParams, ZeroError};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttrError {
    #[error("PRC capacity ell = {ell} is below the signature length {sig_len}")]
    CapacityTooSmall { ell: usize, sig_len: usize },
    #[error("Lstar = {lstar} is shorter than one codeword block of {block} tokens")]
    LstarTooShort { lstar: usize, block: usize },
    #[error(transparent)]
    Zero(#[from] ZeroError),
    #[error(transparent)]
    F2(#[from] F2Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignKey(pub Vec<u8>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyKey(pub Vec<u8>);

/// Fixed-length signatures over bit strings. Existential unforgeability
/// is assumed of the implementation, not tested cryptographically.
pub trait SignatureScheme {
    fn sig_len(&self) -> usize;
    fn keygen(&self, rng: &mut RandomSource) -> (SignKey, VerifyKey);
    fn sign(&self, sk: &SignKey, msg: &BitVec) -> BitVec;
    fn verify(&self, vk: &VerifyKey, msg: &BitVec, sig: &BitVec) -> bool;
}

/// Keyed-hash tags standing in for signatures at desk scale. The tag
/// key sits inside the verify key, so "public" verification here means
/// anyone *holding the key material* — a documented security toy; any
/// real signature scheme fits the same interface.
#[derive(Clone, Debug)]
pub struct MacScheme {
    pub tag_bits: usize,
}

impl Default for MacScheme {
    fn default() -> Self {
        MacScheme { tag_bits: 64 }
    }
}

impl SignatureScheme for MacScheme {
    fn sig_len(&self) -> usize {
        self.tag_bits
    }

    fn keygen(&self, rng: &mut RandomSource) -> (SignKey, VerifyKey) {
        let key = BitVec::random(256, rng).to_bytes();
        (SignKey(key.clone()), VerifyKey(key))
    }

    fn sign(&self, sk: &SignKey, msg: &BitVec) -> BitVec {
        let mut h = Sha256::new();
        h.update(b"prc-attr-mac-v1");
        h.update(&sk.0);
        h.update((msg.len() as u64).to_le_bytes());
        h.update(msg.to_bytes());
        let digest = h.finalize();
        BitVec::from_bytes(&digest[..self.tag_bits.div_ceil(8)], self.tag_bits)
            .unwrap_or_else(|_| BitVec::zeros(self.tag_bits))
    }

    fn verify(&self, vk: &VerifyKey, msg: &BitVec, sig: &BitVec) -> bool {
        self.sign(&SignKey(vk.0.clone()), msg) == *sig
    }
}

#[derive(Clone, Debug)]
pub struct AttrPublicKey<S: SignatureScheme> {
    /// Multi-bit PRC key, decodable by everyone — the role reversal.
    pub prc: MultiBitKey,
    pub scheme: S,
    pub sig_vk: VerifyKey,
    /// One pad per block, each of the full block length n(ℓ+1).
    pub pads: Vec<BitVec>,
    pub lstar: usize,
}

#[derive(Clone, Debug)]
pub struct AttrSecretKey {
    pub sig_sk: SignKey,
}

impl<S: SignatureScheme> AttrPublicKey<S> {
    /// Tokens per embedded codeword block.
    pub fn block_tokens(&self) -> usize {
        self.prc.block_len()
    }
}

pub fn attr_setup<S: SignatureScheme>(
    prc_params: &PrcParams,
    ell: usize,
    lstar: usize,
    scheme: S,
    rng: &mut RandomSource,
) -> Result<(AttrPublicKey<S>, AttrSecretKey), AttrError> {
    if ell < scheme.sig_len() {
        return Err(AttrError::CapacityTooSmall { ell, sig_len: scheme.sig_len() });
    }
    let prc = multibit_keygen(ell, prc_params, rng)?;
    let block = prc.block_len();
    if lstar < block {
        return Err(AttrError::LstarTooShort { lstar, block });
    }
    let (sig_sk, sig_vk) = scheme.keygen(rng);
    let pads = (0..lstar.div_ceil(block)).map(|_| BitVec::random(block, rng)).collect();
    Ok((AttrPublicKey { prc, scheme, sig_vk, pads, lstar }, AttrSecretKey { sig_sk }))
}

/// Signature padded to the PRC's ℓ-bit message space.
fn embed_message<S: SignatureScheme>(pk: &AttrPublicKey<S>, sigma: &BitVec) -> BitVec {
    let mut m = sigma.clone();
    while m.len() < pk.prc.ell {
        m.push(false);
    }
    m
}

/// Block 1 embeds a fixed all-zeros message; block b ≥ 2 embeds a
/// signature over tokens 1..(b−1)·n. Token sampling is the same biased
/// Bernoulli as watermark generation.
pub fn attr_generate<S: SignatureScheme>(
    pk: &AttrPublicKey<S>,
    sk: &AttrSecretKey,
    prompt: &str,
    model: &dyn Model,
    rng: &mut RandomSource,
) -> Result<Response, AttrError> {
    let block = pk.block_tokens();
    let len = pk.lstar.min(model.max_len());
    let mut session = model.start(prompt);
    let mut tokens = BitVec::zeros(0);
    let mut x = BitVec::zeros(0);
    for i in 0..len {
        if i % block == 0 {
            let b = i / block;
            let msg = if b == 0 {
                BitVec::zeros(pk.prc.ell)
            } else {
                embed_message(pk, &pk.scheme.sign(&sk.sig_sk, &tokens))
            };
            x = multibit_encode(&pk.prc, &msg, rng)?.xor(&pk.pads[b])?;
        }
        let phat = session.phat();
        let bit = rng.bernoulli(biased_token_probability(phat, x.get(i % block)));
        tokens.push(bit);
        session.push(bit);
    }
    Ok(Response { tokens, trace: None })
}

/// Attribution report: verdict plus where the verified signature sat.
#[derive(Clone, Debug, PartialEq)]
pub struct AttrReport {
    pub verified: bool,
    /// Length of the attributed prefix (tokens before the signature
    /// window) when verified.
    pub prefix_len: usize,
    pub window_start: usize,
    pub pad_index: usize,
}

impl AttrReport {
    fn miss() -> Self {
        AttrReport { verified: false, prefix_len: 0, window_start: 0, pad_index: 0 }
    }
}

/// Sentinel-check scanner for the multi-bit code: parity-check offsets
/// are the permuted positions of the sentinel block's bits.
fn sentinel_scanner(prc: &MultiBitKey) -> WindowScanner {
    let n0 = prc.inner_n();
    let base = prc.ell * n0;
    let rows = prc
        .inner_sk
        .p
        .rows()
        .iter()
        .map(|row| row.indices().iter().map(|&k| prc.pi.inverse(base + k) as u32).collect())
        .collect();
    WindowScanner::new(prc.block_len(), rows)
}

fn sentinel_constants<S: SignatureScheme>(
    pk: &AttrPublicKey<S>,
    pad: &BitVec,
) -> Result<BitVec, F2Error> {
    let prc = &pk.prc;
    let n0 = prc.inner_n();
    let base = prc.ell * n0;
    let mut constants = pk.prc.inner_sk.pz().clone();
    for (i, row) in prc.inner_sk.p.rows().iter().enumerate() {
        let mut parity = false;
        for &k in row.indices() {
            parity ^= pad.get(prc.pi.inverse(base + k));
        }
        if parity {
            constants.flip(i);
        }
    }
    Ok(constants)
}

/// Candidate window starts whose sentinel check fires, per pad.
fn sentinel_hits<S: SignatureScheme>(
    pk: &AttrPublicKey<S>,
    tokens: &BitVec,
) -> Result<Vec<(usize, usize)>, AttrError> {
    let scanner = sentinel_scanner(&pk.prc);
    let threshold = pk.prc.inner_sk.params.threshold();
    let mut hits = Vec::new();
    for (ell, pad) in pk.pads.iter().enumerate() {
        let counts = scanner.scan(tokens, &sentinel_constants(pk, pad)?);
        for (s, &unsat) in counts.iter().enumerate() {
            if (unsat as usize) < threshold {
                hits.push((s, ell));
            }
        }
    }
    Ok(hits)
}

/// Scans window starts (longest attributable prefix first) and pad
/// indices; a window that PRC-decodes to a signature verifying against
/// all preceding tokens attributes that prefix.
pub fn attr_text<S: SignatureScheme>(
    pk: &AttrPublicKey<S>,
    tokens: &BitVec,
) -> Result<AttrReport, AttrError> {
    let block = pk.block_tokens();
    if tokens.len() < block {
        return Ok(AttrReport::miss());
    }
    let mut hits = sentinel_hits(pk, tokens)?;
    // Longest prefix first, then lowest pad index.
    hits.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (s, ell) in hits {
        let window = tokens.slice(s, s + block).xor(&pk.pads[ell])?;
        let Some(msg) = multibit_decode(&pk.prc, &window)?.message else {
            continue;
        };
        let sigma = msg.slice(0, pk.scheme.sig_len());
        let prefix = tokens.slice(0, s);
        if pk.scheme.verify(&pk.sig_vk, &prefix, &sigma) {
            return Ok(AttrReport { verified: true, prefix_len: s, window_start: s, pad_index: ell });
        }
    }
    Ok(AttrReport::miss())
}

/// Watermark-style detection (signature ignored): true iff any window's
/// sentinel check fires. This is what survives channel noise.
pub fn attr_detect<S: SignatureScheme>(
    pk: &AttrPublicKey<S>,
    tokens: &BitVec,
) -> Result<bool, AttrError> {
    if tokens.len() < pk.block_tokens() {
        return Ok(false);
    }
    Ok(!sentinel_hits(pk, tokens)?.is_empty())
}

/// A forging adversary: gets the public key, a generation oracle and
/// randomness, and returns a candidate text.
pub type Adversary<'a, S> = dyn FnMut(
        &AttrPublicKey<S>,
        &mut dyn FnMut(&mut RandomSource) -> BitVec,
        &mut RandomSource,
    ) -> BitVec
    + 'a;

/// Is `needle` a contiguous substring of `haystack`?
fn is_substring(needle: &BitVec, haystack: &BitVec) -> bool {
    if needle.is_empty() {
        return true;
    }
    if needle.len() > haystack.len() {
        return false;
    }
    (0..=haystack.len() - needle.len())
        .any(|s| haystack.slice(s, s + needle.len()) == *needle)
}

/// The forging experiment: the adversary wins a trial when attr_text
/// verifies a prefix that is not a contiguous substring of any oracle
/// response. Returns the win fraction.
pub fn attr_forge_experiment<S: SignatureScheme>(
    adversary: &mut Adversary<'_, S>,
    pk: &AttrPublicKey<S>,
    sk: &AttrSecretKey,
    prompt: &str,
    model: &dyn Model,
    trials: usize,
    rng: &mut RandomSource,
) -> Result<f64, AttrError> {
    let mut wins = 0;
    for _ in 0..trials {
        let mut queries: Vec<BitVec> = Vec::new();
        let forged = {
            let mut oracle = |oracle_rng: &mut RandomSource| {
                let resp = attr_generate(pk, sk, prompt, model, oracle_rng)
                    .expect("oracle generation");
                queries.push(resp.tokens.clone());
                resp.tokens
            };
            adversary(pk, &mut oracle, rng)
        };
        let report = attr_text(pk, &forged)?;
        if report.verified {
            let prefix = forged.slice(0, report.prefix_len);
            if !queries.iter().any(|q| is_substring(&prefix, q)) {
                wins += 1;
            }
        }
    }
    Ok(wins as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelSpec;
    use crate::watermark::{ConstantModel, HashDrivenModel};

    fn small_setup(
        seed: u64,
        blocks: usize,
    ) -> (AttrPublicKey<MacScheme>, AttrSecretKey, RandomSource) {
        let mut rng = RandomSource::from_u64(seed);
        let params = PrcParams { n: 192, g: 16, t: 2, r: 176, eta: 0.0, zeta: 0.17 };
        let scheme = MacScheme { tag_bits: 16 };
        let lstar = 192 * 17 * blocks;
        let (pk, sk) = attr_setup(&params, 16, lstar, scheme, &mut rng).unwrap();
        (pk, sk, rng)
    }

    #[test]
    fn capacity_boundary() {
        let mut rng = RandomSource::from_u64(171);
        let params = PrcParams { n: 64, g: 8, t: 2, r: 48, eta: 0.0, zeta: 0.15 };
        assert!(attr_setup(&params, 64, 64 * 65, MacScheme::default(), &mut rng).is_ok());
        let err = attr_setup(&params, 64, 64 * 65, MacScheme { tag_bits: 65 }, &mut rng);
        assert!(matches!(err, Err(AttrError::CapacityTooSmall { ell: 64, sig_len: 65 })));
    }

    #[test]
    fn setup_deterministic_and_sk_in_pk() {
        let (a, _, _) = small_setup(172, 2);
        let (b, _, _) = small_setup(172, 2);
        assert_eq!(a.pads, b.pads);
        assert_eq!(a.sig_vk, b.sig_vk);
        // The PRC decoding material rides in the public key.
        assert_eq!(a.prc.inner_sk.z, b.prc.inner_sk.z);
    }

    #[test]
    fn mac_round_trip_and_tamper() {
        let scheme = MacScheme::default();
        let mut rng = RandomSource::from_u64(173);
        let (sk, vk) = scheme.keygen(&mut rng);
        let msg = BitVec::random(100, &mut rng);
        let sig = scheme.sign(&sk, &msg);
        assert_eq!(sig.len(), 64);
        assert!(scheme.verify(&vk, &msg, &sig));
        let mut tampered = msg.clone();
        tampered.flip(50);
        assert!(!scheme.verify(&vk, &tampered, &sig));
    }

    #[test]
    fn verbatim_attribution_on_half_model() {
        let (pk, sk, mut rng) = small_setup(174, 3);
        let block = pk.block_tokens();
        let model = ConstantModel { phat: 0.5, max_len: 3 * block };
        let resp = attr_generate(&pk, &sk, "p", &model, &mut rng).unwrap();
        let report = attr_text(&pk, &resp.tokens).unwrap();
        assert!(report.verified);
        // Longest signed prefix: everything before the last block.
        assert_eq!(report.prefix_len, 2 * block);
        assert_eq!(report.pad_index, 2);
        // The embedded signature in block 2 verifies against block 1.
        let sigma = pk.scheme.sign(&sk.sig_sk, &resp.tokens.slice(0, block));
        let window = resp.tokens.slice(block, 2 * block).xor(&pk.pads[1]).unwrap();
        let decoded = multibit_decode(&pk.prc, &window).unwrap().message.unwrap();
        assert_eq!(decoded.slice(0, 16), sigma);
    }

    #[test]
    fn flip_inside_signed_prefix_breaks_attribution() {
        let (pk, sk, mut rng) = small_setup(175, 2);
        let block = pk.block_tokens();
        let model = ConstantModel { phat: 0.5, max_len: 2 * block };
        let resp = attr_generate(&pk, &sk, "p", &model, &mut rng).unwrap();
        assert!(attr_text(&pk, &resp.tokens).unwrap().verified);
        let mut tampered = resp.tokens.clone();
        tampered.flip(block / 2);
        assert!(!attr_text(&pk, &tampered).unwrap().verified);
    }

    #[test]
    fn flips_after_signed_prefix_still_attribute() {
        let (pk, sk, mut rng) = small_setup(176, 2);
        let block = pk.block_tokens();
        let model = ConstantModel { phat: 0.5, max_len: 2 * block };
        let resp = attr_generate(&pk, &sk, "p", &model, &mut rng).unwrap();
        let mut tampered = resp.tokens.clone();
        // Corrupt a few bits inside the *last* block, beyond the signed
        // prefix; the embedded signature tolerates them.
        for k in 0..5 {
            tampered.flip(block + 37 * k + 11);
        }
        let report = attr_text(&pk, &tampered).unwrap();
        assert!(report.verified);
        assert_eq!(report.prefix_len, block);
    }

    #[test]
    fn random_tokens_never_attribute() {
        let (pk, _, mut rng) = small_setup(177, 2);
        let block = pk.block_tokens();
        for _ in 0..200 {
            let junk = BitVec::random(2 * block, &mut rng);
            assert!(!attr_text(&pk, &junk).unwrap().verified);
        }
    }

    #[test]
    fn detection_survives_noise_attribution_does_not() {
        let (pk, sk, mut rng) = small_setup(178, 2);
        let block = pk.block_tokens();
        let model = HashDrivenModel { lo: 0.3, hi: 0.7, seed: 21, max_len: 2 * block };
        let ch = ChannelSpec::Bsc(0.05);
        let mut detected = 0;
        for _ in 0..20 {
            let resp = attr_generate(&pk, &sk, "p", &model, &mut rng).unwrap();
            let noisy = ch.apply(&resp.tokens, &mut rng);
            if attr_detect(&pk, &noisy).unwrap() {
                detected += 1;
            }
        }
        assert!(detected >= 19, "{detected}/20");
    }

    #[test]
    fn splice_and_flip_adversaries_lose() {
        let (pk, sk, mut rng) = small_setup(179, 2);
        let block = pk.block_tokens();
        let model = ConstantModel { phat: 0.5, max_len: 2 * block };

        let mut splice: Box<Adversary<'_, MacScheme>> = Box::new(|_pk, oracle, rng| {
            let a = oracle(rng);
            let b = oracle(rng);
            let half = a.len() / 2;
            a.slice(0, half).concat(&b.slice(half, b.len()))
        });
        let rate = attr_forge_experiment(&mut *splice, &pk, &sk, "p", &model, 20, &mut rng)
            .unwrap();
        assert_eq!(rate, 0.0, "splice adversary");

        let mut flip: Box<Adversary<'_, MacScheme>> = Box::new(|_pk, oracle, rng| {
            let mut t = oracle(rng);
            let i = rng.index(t.len());
            t.flip(i);
            t
        });
        let rate =
            attr_forge_experiment(&mut *flip, &pk, &sk, "p", &model, 20, &mut rng).unwrap();
        assert_eq!(rate, 0.0, "flip adversary");

        // Replay loses by definition: the prefix is a substring of a query.
        let mut replay: Box<Adversary<'_, MacScheme>> =
            Box::new(|_pk, oracle, rng| oracle(rng));
        let rate =
            attr_forge_experiment(&mut *replay, &pk, &sk, "p", &model, 20, &mut rng).unwrap();
        assert_eq!(rate, 0.0, "replay adversary");
    }
}
