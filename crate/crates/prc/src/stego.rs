//! Robust stateless steganography by rejection sampling.
//!
//! A PRC codeword bit is embedded per emitted document: draw up to κ
//! covertext samples and keep the first whose hash matches the bit
//! (falling back to the κ-th draw regardless). With an unbiased hash
//! and pseudorandom codeword bits the stegotext distribution matches
//! the covertext channel exactly; the PRC absorbs both the fallback
//! flips and adversarial substitution.

use crate::constrate::{constrate_decode, constrate_encode, ConstRateKey};
use crate::ecc::RepetitionEcc;
use crate::f2::BitVec;
use crate::multibit::{multibit_decode, multibit_encode, MultiBitKey};
use crate::prg::ShaPrg;
use crate::rng::RandomSource;
use crate::zero::ZeroError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StegoError {
    #[error("kappa must be at least 1")]
    ZeroKappa,
    #[error(transparent)]
    Zero(#[from] ZeroError),
    #[error(transparent)]
    F2(#[from] crate::f2::F2Error),
}

/// A covertext distribution, accessed only through sampling.
pub trait CovertextChannel {
    /// Alphabet size |Σ|; documents are symbols in 0..alphabet().
    fn alphabet(&self) -> u32;
    fn sample(&self, history: &[u32], rng: &mut RandomSource) -> u32;
}

/// Uniform over k symbols, history-free.
#[derive(Clone, Debug)]
pub struct UniformSymbols {
    pub k: u32,
}

impl CovertextChannel for UniformSymbols {
    fn alphabet(&self) -> u32 {
        self.k
    }

    fn sample(&self, _history: &[u32], rng: &mut RandomSource) -> u32 {
        rng.index(self.k as usize) as u32
    }
}

/// Independent draws from a fixed weight vector.
#[derive(Clone, Debug)]
pub struct SkewedSymbols {
    weights: Vec<f64>,
}

impl SkewedSymbols {
    pub fn new(weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        Self { weights: weights.into_iter().map(|w| w / total).collect() }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn sample_weighted(weights: &[f64], rng: &mut RandomSource) -> u32 {
    let u = rng.unit();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i as u32;
        }
    }
    weights.len() as u32 - 1
}

impl CovertextChannel for SkewedSymbols {
    fn alphabet(&self) -> u32 {
        self.weights.len() as u32
    }

    fn sample(&self, _history: &[u32], rng: &mut RandomSource) -> u32 {
        sample_weighted(&self.weights, rng)
    }
}

/// First-order Markov chain over symbols: the next document depends on
/// the previous one (the first is drawn from `init`).
#[derive(Clone, Debug)]
pub struct MarkovText {
    init: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl MarkovText {
    pub fn new(init: Vec<f64>, rows: Vec<Vec<f64>>) -> Self {
        let norm = |v: Vec<f64>| {
            let t: f64 = v.iter().sum();
            v.into_iter().map(|w| w / t).collect::<Vec<_>>()
        };
        Self { init: norm(init), rows: rows.into_iter().map(norm).collect() }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

impl CovertextChannel for MarkovText {
    fn alphabet(&self) -> u32 {
        self.init.len() as u32
    }

    fn sample(&self, history: &[u32], rng: &mut RandomSource) -> u32 {
        match history.last() {
            None => sample_weighted(&self.init, rng),
            Some(&prev) => sample_weighted(&self.rows[prev as usize], rng),
        }
    }
}

/// Declared bias property of a document hash.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HashProperty {
    Unbiased,
    /// min over b of Pr[f(d) = b] ≥ α.
    MinEntropy(f64),
}

/// One bit per document.
pub trait DocHash {
    fn bit(&self, doc: u32) -> bool;
    fn property(&self) -> HashProperty;
}

/// Symbol parity — exactly unbiased on a uniform even alphabet.
#[derive(Clone, Debug)]
pub struct ParityHash;

impl DocHash for ParityHash {
    fn bit(&self, doc: u32) -> bool {
        doc & 1 == 1
    }

    fn property(&self) -> HashProperty {
        HashProperty::Unbiased
    }
}

/// f(d) = (d ≠ pivot), with a declared min-entropy bound.
#[derive(Clone, Debug)]
pub struct NotSymbolHash {
    pub pivot: u32,
    pub alpha: f64,
}

impl DocHash for NotSymbolHash {
    fn bit(&self, doc: u32) -> bool {
        doc != self.pivot
    }

    fn property(&self) -> HashProperty {
        HashProperty::MinEntropy(self.alpha)
    }
}

/// Up to κ channel draws; the first matching `target` wins, else the
/// κ-th draw is returned regardless of its hash.
pub fn rs_sample(
    channel: &dyn CovertextChannel,
    history: &[u32],
    f: &dyn DocHash,
    target: bool,
    kappa: usize,
    rng: &mut RandomSource,
) -> u32 {
    debug_assert!(kappa >= 1);
    let mut doc = channel.sample(history, rng);
    for _ in 1..kappa {
        if f.bit(doc) == target {
            break;
        }
        doc = channel.sample(history, rng);
    }
    doc
}

/// The embedded PRC: multi-bit or constant-rate.
#[derive(Clone, Debug)]
pub enum StegoCode {
    Multi(MultiBitKey),
    ConstRate(ConstRateKey<RepetitionEcc, ShaPrg>),
}

impl StegoCode {
    pub fn message_len(&self) -> usize {
        match self {
            StegoCode::Multi(k) => k.ell,
            StegoCode::ConstRate(k) => k.message_len(),
        }
    }

    pub fn block_len(&self) -> usize {
        match self {
            StegoCode::Multi(k) => k.block_len(),
            StegoCode::ConstRate(k) => k.block_len(),
        }
    }

    fn encode(&self, m: &BitVec, rng: &mut RandomSource) -> Result<BitVec, StegoError> {
        Ok(match self {
            StegoCode::Multi(k) => multibit_encode(k, m, rng)?,
            StegoCode::ConstRate(k) => constrate_encode(k, m, rng)?,
        })
    }

    fn decode(&self, x: &BitVec) -> Result<Option<BitVec>, StegoError> {
        Ok(match self {
            StegoCode::Multi(k) => multibit_decode(k, x)?.message,
            StegoCode::ConstRate(k) => constrate_decode(k, x)?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct StegoKey {
    pub code: StegoCode,
    pub kappa: usize,
}

/// Bits per emitted document — the underlying PRC's rate.
impl StegoKey {
    pub fn rate(&self) -> f64 {
        self.code.message_len() as f64 / self.code.block_len() as f64
    }
}

#[derive(Clone, Debug)]
pub struct Stegotext {
    pub docs: Vec<u32>,
    /// Documents whose hash missed the intended codeword bit (the κ-th
    /// draw fell the wrong way); the PRC absorbs these.
    pub embedded_flips: usize,
    pub flip_rate: f64,
}

pub fn steg_encode(
    key: &StegoKey,
    channel: &dyn CovertextChannel,
    f: &dyn DocHash,
    message: &BitVec,
    history: &[u32],
    rng: &mut RandomSource,
) -> Result<Stegotext, StegoError> {
    if key.kappa == 0 {
        return Err(StegoError::ZeroKappa);
    }
    let x = key.code.encode(message, rng)?;
    let mut h: Vec<u32> = history.to_vec();
    let mut docs = Vec::with_capacity(x.len());
    let mut flips = 0;
    for i in 0..x.len() {
        let doc = rs_sample(channel, &h, f, x.get(i), key.kappa, rng);
        if f.bit(doc) != x.get(i) {
            flips += 1;
        }
        // The history grows with the *emitted* document, never the
        // planned bit.
        h.push(doc);
        docs.push(doc);
    }
    Ok(Stegotext { docs, embedded_flips: flips, flip_rate: flips as f64 / x.len() as f64 })
}

pub fn steg_decode(
    key: &StegoKey,
    f: &dyn DocHash,
    docs: &[u32],
) -> Result<Option<BitVec>, StegoError> {
    if docs.len() != key.code.block_len() {
        return Ok(None);
    }
    let mut x = BitVec::zeros(docs.len());
    for (i, &d) in docs.iter().enumerate() {
        x.set(i, f.bit(d));
    }
    key.code.decode(&x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zero::PrcParams;

    fn multi_key(rng: &mut RandomSource) -> StegoKey {
        let params = PrcParams { n: 256, g: 24, t: 2, r: 224, eta: 0.0, zeta: 0.15 };
        let code = StegoCode::Multi(
            crate::multibit::multibit_keygen(8, &params, rng).unwrap(),
        );
        StegoKey { code, kappa: 64 }
    }

    #[test]
    fn rs_kappa_one_ignores_target() {
        let mut rng = RandomSource::from_u64(181);
        let ch = SkewedSymbols::new(vec![2.0, 1.0]);
        let f = ParityHash;
        let trials = 100_000;
        let ones = (0..trials)
            .filter(|_| f.bit(rs_sample(&ch, &[], &f, true, 1, &mut rng)))
            .count();
        // Raw channel rate 1/3, not the target.
        let rate = ones as f64 / trials as f64;
        assert!((rate - 1.0 / 3.0).abs() < 0.01, "{rate}");
    }

    #[test]
    fn rs_large_kappa_hits_target() {
        let mut rng = RandomSource::from_u64(182);
        let ch = UniformSymbols { k: 4 };
        let f = ParityHash;
        for i in 0..1000 {
            let target = i % 2 == 0;
            assert_eq!(f.bit(rs_sample(&ch, &[], &f, target, 64, &mut rng)), target);
        }
    }

    #[test]
    fn rs_kappa_two_closed_form() {
        // Pr[f=1] = 2/3, κ=2, target 1: 2/3 + (1/3)(2/3) = 8/9.
        let mut rng = RandomSource::from_u64(183);
        let ch = UniformSymbols { k: 3 };
        let f = NotSymbolHash { pivot: 0, alpha: 1.0 / 3.0 };
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| f.bit(rs_sample(&ch, &[], &f, true, 2, &mut rng)))
            .count();
        let rate = hits as f64 / trials as f64;
        assert!((rate - 8.0 / 9.0).abs() < 0.01, "{rate}");
    }

    #[test]
    fn markov_stationary_matches_eigenvector() {
        // Two-state chain: p(0→1)=0.25, p(1→0)=0.5 → stationary (2/3, 1/3).
        let ch = MarkovText::new(
            vec![0.5, 0.5],
            vec![vec![0.75, 0.25], vec![0.5, 0.5]],
        );
        let mut rng = RandomSource::from_u64(184);
        let mut h = Vec::new();
        let n = 200_000;
        let mut ones = 0usize;
        for _ in 0..n {
            let d = ch.sample(&h, &mut rng);
            ones += d as usize;
            h.clear();
            h.push(d);
        }
        let rate = ones as f64 / n as f64;
        let sigma = (2.0 / 9.0_f64 / n as f64).sqrt();
        // Mixing inflates the effective variance; allow 6σ.
        assert!((rate - 1.0 / 3.0).abs() < 6.0 * sigma, "{rate}");
    }

    #[test]
    fn clean_round_trip_unbiased() {
        let mut rng = RandomSource::from_u64(185);
        let key = multi_key(&mut rng);
        let ch = UniformSymbols { k: 4 };
        let f = ParityHash;
        for _ in 0..10 {
            let m = BitVec::random(8, &mut rng);
            let st = steg_encode(&key, &ch, &f, &m, &[], &mut rng).unwrap();
            assert_eq!(st.docs.len(), key.code.block_len());
            assert_eq!(st.embedded_flips, 0, "κ=64 never falls back in practice");
            assert_eq!(steg_decode(&key, &f, &st.docs).unwrap().unwrap(), m);
        }
    }

    #[test]
    fn stegotext_distribution_matches_covertext() {
        // Unbiased f + uniform channel: each document is exactly
        // uniform; chi-square over the 4 symbols.
        let mut rng = RandomSource::from_u64(186);
        let key = multi_key(&mut rng);
        let ch = UniformSymbols { k: 4 };
        let f = ParityHash;
        let mut counts = [0usize; 4];
        let mut total = 0usize;
        for _ in 0..25 {
            let m = BitVec::random(8, &mut rng);
            let st = steg_encode(&key, &ch, &f, &m, &[], &mut rng).unwrap();
            for d in st.docs {
                counts[d as usize] += 1;
                total += 1;
            }
        }
        let e = total as f64 / 4.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 3 df at 0.001 → 16.27.
        assert!(chi2 < 16.27, "chi2 = {chi2} over {total} docs");
    }

    #[test]
    fn substitution_within_tolerance_recovers() {
        let mut rng = RandomSource::from_u64(187);
        let params = PrcParams { n: 256, g: 24, t: 2, r: 224, eta: 0.05, zeta: 0.15 };
        let key = StegoKey {
            code: StegoCode::Multi(crate::multibit::multibit_keygen(8, &params, &mut rng).unwrap()),
            kappa: 64,
        };
        let ch = UniformSymbols { k: 4 };
        let f = ParityHash;
        let mut ok = 0;
        for _ in 0..50 {
            let m = BitVec::random(8, &mut rng);
            let st = steg_encode(&key, &ch, &f, &m, &[], &mut rng).unwrap();
            // Substitute 5% of documents by fresh samples conditioned
            // on the *flipped* hash bit (f ∘ E′ = BSC ∘ f).
            let mut docs = st.docs.clone();
            for d in docs.iter_mut() {
                if rng.bernoulli(0.05) {
                    *d = rs_sample(&ch, &[], &f, !f.bit(*d), 64, &mut rng);
                }
            }
            if steg_decode(&key, &f, &docs).unwrap() == Some(m) {
                ok += 1;
            }
        }
        assert!(ok >= 48, "{ok}/50");
    }

    #[test]
    fn raw_covertext_is_bot() {
        let mut rng = RandomSource::from_u64(188);
        let key = multi_key(&mut rng);
        let ch = UniformSymbols { k: 4 };
        let f = ParityHash;
        let mut hits = 0;
        for _ in 0..200 {
            let docs: Vec<u32> =
                (0..key.code.block_len()).map(|_| ch.sample(&[], &mut rng)).collect();
            if steg_decode(&key, &f, &docs).unwrap().is_some() {
                hits += 1;
            }
        }
        assert_eq!(hits, 0);
    }

    #[test]
    fn kappa_two_biased_agreement() {
        // MinEntropy(1/3): p₁ = 1/3, p₀ = 2/3. Agreement with a uniform
        // target under κ=2: ½[p₁(2−p₁) + p₀(2−p₀)] = 13/18 ≈ 0.722.
        let mut rng = RandomSource::from_u64(189);
        let ch = UniformSymbols { k: 3 };
        let f = NotSymbolHash { pivot: 0, alpha: 1.0 / 3.0 };
        let hash_one = |d: u32| d != 0;
        let trials = 100_000;
        let mut agree = 0;
        for _ in 0..trials {
            let target = rng.bit();
            let d = rs_sample(&ch, &[], &f, target, 2, &mut rng);
            if hash_one(d) == target {
                agree += 1;
            }
        }
        let rate = agree as f64 / trials as f64;
        assert!((rate - 13.0 / 18.0).abs() < 0.01, "{rate}");
        assert!(rate >= 0.5 + (1.0 / 3.0) / 2.0 - 0.01, "Theorem bound 1/2 + α/2");
    }

    #[test]
    fn rate_is_prc_rate() {
        let mut rng = RandomSource::from_u64(190);
        let key = multi_key(&mut rng);
        assert!((key.rate() - 8.0 / (256.0 * 9.0)).abs() < 1e-12);
    }
}
