//! Binarization of token-alphabet models through a prefix-free code.
//!
//! Each next-bit probability is the conditional mass of tokens whose
//! codeword continues the current partial codeword with that bit, so
//! sampling bit-by-bit and decoding reproduces the token distribution
//! exactly.

use super::model::{Model, ModelSession};
use super::WmError;
use crate::f2::BitVec;

/// A distribution over a finite token alphabet, conditioned on the
/// prompt and the committed token prefix. Deterministic.
pub trait TokenModel {
    fn alphabet_size(&self) -> usize;
    /// Next-token probabilities; must sum to 1 and have
    /// `alphabet_size()` entries.
    fn probs(&self, prompt: &str, prefix: &[usize]) -> Vec<f64>;
    fn max_tokens(&self) -> usize;
}

/// A prefix-free binary code over the token alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixCode {
    codes: Vec<BitVec>,
}

impl PrefixCode {
    pub fn new(codes: Vec<BitVec>) -> Result<Self, WmError> {
        if codes.is_empty() || codes.iter().any(|c| c.is_empty()) {
            return Err(WmError::NotPrefixFree);
        }
        for (i, a) in codes.iter().enumerate() {
            for (j, b) in codes.iter().enumerate() {
                if i != j && a.len() <= b.len() && b.slice(0, a.len()) == *a {
                    return Err(WmError::NotPrefixFree);
                }
            }
        }
        Ok(Self { codes })
    }

    pub fn from_strings(strings: &[&str]) -> Result<Self, WmError> {
        let codes = strings
            .iter()
            .map(|s| BitVec::from_bit_string(s).map_err(WmError::F2))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(codes)
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn code(&self, token: usize) -> &BitVec {
        &self.codes[token]
    }

    pub fn max_code_len(&self) -> usize {
        self.codes.iter().map(BitVec::len).max().unwrap_or(0)
    }

    pub fn encode(&self, tokens: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(0);
        for &t in tokens {
            out = out.concat(&self.codes[t]);
        }
        out
    }

    /// Greedy decode; `None` when the bits are not a concatenation of
    /// codewords.
    pub fn decode(&self, bits: &BitVec) -> Option<Vec<usize>> {
        let mut tokens = Vec::new();
        let mut pos = 0;
        while pos < bits.len() {
            let hit = self.codes.iter().position(|c| {
                pos + c.len() <= bits.len() && bits.slice(pos, pos + c.len()) == *c
            })?;
            pos += self.codes[hit].len();
            tokens.push(hit);
        }
        Some(tokens)
    }
}

/// The binary [`Model`] induced by a token model and a prefix code.
#[derive(Clone, Debug)]
pub struct BinarizedModel<T: TokenModel + Clone + 'static> {
    model: T,
    code: PrefixCode,
}

pub fn binarize_model<T: TokenModel + Clone + 'static>(
    model: T,
    code: PrefixCode,
) -> Result<BinarizedModel<T>, WmError> {
    if code.len() != model.alphabet_size() {
        return Err(WmError::NotPrefixFree);
    }
    Ok(BinarizedModel { model, code })
}

struct BinarizedSession<T: TokenModel> {
    model: T,
    code: PrefixCode,
    prompt: String,
    tokens: Vec<usize>,
    partial: BitVec,
}

impl<T: TokenModel> BinarizedSession<T> {
    /// Probability mass of tokens whose codeword extends `partial` by
    /// `bit`, and of all tokens consistent with `partial`.
    fn masses(&self) -> (f64, f64) {
        let probs = self.model.probs(&self.prompt, &self.tokens);
        let s = &self.partial;
        let mut with_bit = 0.0;
        let mut total = 0.0;
        for (t, p) in probs.iter().enumerate() {
            let c = self.code.code(t);
            if c.len() > s.len() && c.slice(0, s.len()) == *s {
                total += p;
                if c.get(s.len()) {
                    with_bit += p;
                }
            }
        }
        (with_bit, total)
    }
}

impl<T: TokenModel> ModelSession for BinarizedSession<T> {
    fn phat(&self) -> f64 {
        if self.tokens.len() >= self.model.max_tokens() {
            return 0.5;
        }
        let (ones, total) = self.masses();
        // A dead branch (no token consistent with the forced prefix)
        // has no defined conditional law; report the uninformative 1/2.
        if total <= 0.0 {
            return 0.5;
        }
        ones / total
    }

    fn push(&mut self, bit: bool) {
        self.partial.push(bit);
        let done = (0..self.code.len()).find(|&t| *self.code.code(t) == self.partial);
        if let Some(t) = done {
            self.tokens.push(t);
            self.partial = BitVec::zeros(0);
        }
    }
}

impl<T: TokenModel + Clone + 'static> Model for BinarizedModel<T> {
    fn start(&self, prompt: &str) -> Box<dyn ModelSession> {
        Box::new(BinarizedSession {
            model: self.model.clone(),
            code: self.code.clone(),
            prompt: prompt.to_string(),
            tokens: Vec::new(),
            partial: BitVec::zeros(0),
        })
    }

    fn max_len(&self) -> usize {
        self.model.max_tokens() * self.code.max_code_len()
    }
}

fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// A deterministic token model whose conditional distributions are
/// derived from a keyed hash of (prompt, prefix) — a test substrate
/// with nontrivial context dependence.
#[derive(Clone, Debug)]
pub struct RandomTokenModel {
    pub alphabet: usize,
    pub seed: u64,
    pub max_tokens: usize,
}

impl TokenModel for RandomTokenModel {
    fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    fn probs(&self, prompt: &str, prefix: &[usize]) -> Vec<f64> {
        let mut h = mix64(self.seed ^ 0x9e3779b97f4a7c15);
        for b in prompt.bytes() {
            h = mix64(h ^ u64::from(b));
        }
        for &t in prefix {
            h = mix64(h ^ (t as u64).wrapping_add(1));
        }
        let weights: Vec<f64> = (0..self.alphabet)
            .map(|i| 0.05 + (mix64(h ^ i as u64) >> 11) as f64 / (1u64 << 53) as f64)
            .collect();
        let total: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / total).collect()
    }

    fn max_tokens(&self) -> usize {
        self.max_tokens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fixed-distribution model (context-independent).
    #[derive(Clone)]
    struct Iid {
        p: Vec<f64>,
        max_tokens: usize,
    }

    impl TokenModel for Iid {
        fn alphabet_size(&self) -> usize {
            self.p.len()
        }

        fn probs(&self, _prompt: &str, _prefix: &[usize]) -> Vec<f64> {
            self.p.clone()
        }

        fn max_tokens(&self) -> usize {
            self.max_tokens
        }
    }

    #[test]
    fn rejects_non_prefix_free() {
        assert!(PrefixCode::from_strings(&["0", "01"]).is_err());
        assert!(PrefixCode::from_strings(&["10", "10"]).is_err());
        assert!(PrefixCode::from_strings(&["0", "10", "11"]).is_ok());
    }

    #[test]
    fn encode_decode_round_trip() {
        let code = PrefixCode::from_strings(&["0", "10", "110", "111"]).unwrap();
        let tokens = vec![2, 0, 3, 1, 0];
        let bits = code.encode(&tokens);
        assert_eq!(code.decode(&bits).unwrap(), tokens);
        assert!(code.decode(&BitVec::from_bit_string("11").unwrap()).is_none());
    }

    #[test]
    fn binary_alphabet_is_verbatim() {
        let model = Iid { p: vec![0.3, 0.7], max_tokens: 10 };
        let code = PrefixCode::from_strings(&["0", "1"]).unwrap();
        let bin = binarize_model(model, code).unwrap();
        let s = bin.start("x");
        assert!((s.phat() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn hand_enumeration_three_tokens() {
        // T = {A,B,C}, Enc = {0, 10, 11}, p = (1/2, 1/4, 1/4):
        // first-bit p′(0) = 1/2 and, after "1", p′(0) = 1/2.
        let model = Iid { p: vec![0.5, 0.25, 0.25], max_tokens: 10 };
        let code = PrefixCode::from_strings(&["0", "10", "11"]).unwrap();
        let bin = binarize_model(model, code).unwrap();
        let mut s = bin.start("x");
        assert!((s.phat() - 0.5).abs() < 1e-12); // p′(1) = 1/2 ⇒ p′(0) = 1/2
        s.push(true);
        assert!((s.phat() - 0.5).abs() < 1e-12);
    }

    /// Probability the binarized model, sampled greedily, emits exactly
    /// these bits as its next bits.
    fn bit_string_probability(bin: &BinarizedModel<RandomTokenModel>, bits: &BitVec) -> f64 {
        let mut s = bin.start("p");
        let mut prob = 1.0;
        for i in 0..bits.len() {
            let p1 = s.phat();
            prob *= if bits.get(i) { p1 } else { 1.0 - p1 };
            s.push(bits.get(i));
        }
        prob
    }

    #[test]
    fn exact_distribution_equality_exhaustive() {
        let model = RandomTokenModel { alphabet: 4, seed: 99, max_tokens: 8 };
        let code = PrefixCode::from_strings(&["0", "10", "110", "111"]).unwrap();
        let bin = binarize_model(model.clone(), code.clone()).unwrap();
        // All token strings of length ≤ 3.
        for len in 1..=3usize {
            let mut total = 0.0;
            for idx in 0..4usize.pow(len as u32) {
                let tokens: Vec<usize> = (0..len).map(|i| (idx >> (2 * i)) & 3).collect();
                let mut p_tok = 1.0;
                for cut in 0..len {
                    p_tok *= model.probs("p", &tokens[..cut])[tokens[cut]];
                }
                let p_bin = bit_string_probability(&bin, &code.encode(&tokens));
                assert!(
                    (p_tok - p_bin).abs() < 1e-12,
                    "{tokens:?}: token {p_tok} vs binary {p_bin}"
                );
                total += p_tok;
            }
            assert!((total - 1.0).abs() < 1e-9);
        }
    }
}
