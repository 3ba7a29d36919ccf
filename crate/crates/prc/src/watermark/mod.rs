//! Undetectable robust watermarking over deterministic mock models.
//!
//! Generation biases each next-token Bernoulli toward the bits of a
//! padded codeword, refreshed every block; the marginal law of every
//! token is exactly the model's, so the watermark is invisible without
//! the key. Detection scans windows of the emitted tokens against every
//! pad. A deletion-robust variant wraps the codeword in the majority
//! code before embedding.

mod binarize;
mod model;

pub use binarize::{binarize_model, BinarizedModel, PrefixCode, RandomTokenModel, TokenModel};
pub use model::{BurstyModel, ConstantModel, HashDrivenModel, Model, ModelSession};

use crate::f2::BitVec;
use crate::majority::{majdec, majenc, MajorityError};
use crate::rng::RandomSource;
use crate::scan::WindowScanner;
use crate::zero::{self, PrcParams, ZeroBitPublicKey, ZeroBitSecretKey, ZeroError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WmError {
    #[error("entropy range [{i}, {j}] out of bounds for {len} tokens (1-based)")]
    BadRange { i: usize, j: usize, len: usize },
    #[error("model assigns probability 0 to an observed token at position {0}")]
    ZeroProbability(usize),
    #[error("Lstar = {lstar} is shorter than one codeword block of {block} tokens")]
    LstarTooShort { lstar: usize, block: usize },
    #[error("code is not prefix-free (or does not match the alphabet)")]
    NotPrefixFree,
    #[error(transparent)]
    Zero(#[from] ZeroError),
    #[error(transparent)]
    Majority(#[from] MajorityError),
    #[error(transparent)]
    F2(#[from] crate::f2::F2Error),
}

/// The embedded code: plain zero-bit, or majority-wrapped for deletion
/// robustness.
#[derive(Clone, Debug)]
pub enum WmCode {
    Plain { sk: ZeroBitSecretKey, pk: ZeroBitPublicKey },
    /// Pads are applied to the inner n-bit codeword *before* MajEnc, so
    /// that pad and codeword desynchronize together under deletions.
    Deletion { sk: ZeroBitSecretKey, pk: ZeroBitPublicKey, m: usize },
}

impl WmCode {
    /// Inner codeword length n.
    pub fn inner_n(&self) -> usize {
        match self {
            WmCode::Plain { sk, .. } | WmCode::Deletion { sk, .. } => sk.params.n,
        }
    }

    /// Tokens consumed per codeword block.
    pub fn block_tokens(&self) -> usize {
        match self {
            WmCode::Plain { sk, .. } => sk.params.n,
            WmCode::Deletion { sk, m, .. } => sk.params.n * m,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WatermarkKey {
    pub code: WmCode,
    /// One n-bit one-time pad per block, a₁..a⌈L*/block⌉.
    pub pads: Vec<BitVec>,
    pub lstar: usize,
}

#[derive(Clone, Debug)]
pub struct Response {
    pub tokens: BitVec,
    /// Per-token p̂ᵢ values, kept only when tracing is requested.
    pub trace: Option<Vec<f64>>,
}

/// Detection report: verdict plus the first hit's location.
#[derive(Clone, Debug, PartialEq)]
pub struct WmReport {
    pub detected: bool,
    pub window_start: usize,
    pub window_len: usize,
    pub pad_index: usize,
    pub unsat_count: usize,
    pub threshold: usize,
}

impl WmReport {
    fn miss() -> Self {
        WmReport {
            detected: false,
            window_start: 0,
            window_len: 0,
            pad_index: 0,
            unsat_count: 0,
            threshold: 0,
        }
    }
}

fn make_pads(block: usize, inner_n: usize, lstar: usize, rng: &mut RandomSource) -> Vec<BitVec> {
    (0..lstar.div_ceil(block)).map(|_| BitVec::random(inner_n, rng)).collect()
}

pub fn wm_setup(
    prc_params: &PrcParams,
    lstar: usize,
    rng: &mut RandomSource,
) -> Result<WatermarkKey, WmError> {
    if lstar < prc_params.n {
        return Err(WmError::LstarTooShort { lstar, block: prc_params.n });
    }
    let (sk, pk) = zero::keygen(prc_params, rng)?;
    let pads = make_pads(prc_params.n, prc_params.n, lstar, rng);
    Ok(WatermarkKey { code: WmCode::Plain { sk, pk }, pads, lstar })
}

/// Deletion-robust variant: inner zero-bit code majority-encoded with
/// odd width `m`.
pub fn wm_setup_deletion(
    prc_params: &PrcParams,
    m: usize,
    lstar: usize,
    rng: &mut RandomSource,
) -> Result<WatermarkKey, WmError> {
    if m % 2 == 0 {
        return Err(WmError::Majority(MajorityError::EvenWidth(m)));
    }
    let block = prc_params.n * m;
    if lstar < block {
        return Err(WmError::LstarTooShort { lstar, block });
    }
    let (sk, pk) = zero::keygen(prc_params, rng)?;
    let pads = make_pads(block, prc_params.n, lstar, rng);
    Ok(WatermarkKey { code: WmCode::Deletion { sk, pk, m }, pads, lstar })
}

/// Pr[token = 1] after biasing p̂ toward codeword bit x:
/// p̂ − (−1)^x · min(p̂, 1−p̂).
pub fn biased_token_probability(phat: f64, x: bool) -> f64 {
    let shift = phat.min(1.0 - phat);
    if x {
        phat + shift
    } else {
        phat - shift
    }
}

fn fresh_block(key: &WatermarkKey, block: usize, rng: &mut RandomSource) -> Result<BitVec, WmError> {
    match &key.code {
        WmCode::Plain { pk, .. } => {
            let x = zero::encode(pk, rng);
            Ok(x.xor(&key.pads[block])?)
        }
        WmCode::Deletion { pk, m, .. } => {
            let inner = zero::encode(pk, rng).xor(&key.pads[block])?;
            Ok(majenc(&inner, *m, rng)?)
        }
    }
}

fn generate(
    key: &WatermarkKey,
    prompt: &str,
    model: &dyn Model,
    trace: bool,
    rng: &mut RandomSource,
) -> Result<Response, WmError> {
    let block_tokens = key.code.block_tokens();
    let len = key.lstar.min(model.max_len());
    let mut session = model.start(prompt);
    let mut tokens = BitVec::zeros(0);
    let mut traced = trace.then(Vec::new);
    let mut x = BitVec::zeros(0);
    for i in 0..len {
        if i % block_tokens == 0 {
            x = fresh_block(key, i / block_tokens, rng)?;
        }
        let phat = session.phat();
        if let Some(t) = traced.as_mut() {
            t.push(phat);
        }
        let bit = rng.bernoulli(biased_token_probability(phat, x.get(i % block_tokens)));
        tokens.push(bit);
        session.push(bit);
    }
    Ok(Response { tokens, trace: traced })
}

pub fn wm_generate(
    key: &WatermarkKey,
    prompt: &str,
    model: &dyn Model,
    rng: &mut RandomSource,
) -> Result<Response, WmError> {
    generate(key, prompt, model, false, rng)
}

pub fn wm_generate_traced(
    key: &WatermarkKey,
    prompt: &str,
    model: &dyn Model,
    rng: &mut RandomSource,
) -> Result<Response, WmError> {
    generate(key, prompt, model, true, rng)
}

/// Unwatermarked sampling from the model itself (soundness baseline).
pub fn model_sample(
    prompt: &str,
    model: &dyn Model,
    len: usize,
    rng: &mut RandomSource,
) -> BitVec {
    let mut session = model.start(prompt);
    let mut tokens = BitVec::zeros(0);
    for _ in 0..len.min(model.max_len()) {
        let bit = rng.bernoulli(session.phat());
        tokens.push(bit);
        session.push(bit);
    }
    tokens
}

fn detect_plain_naive(
    key: &WatermarkKey,
    sk: &ZeroBitSecretKey,
    tokens: &BitVec,
) -> Result<WmReport, WmError> {
    let n = sk.params.n;
    if tokens.len() < n {
        return Ok(WmReport::miss());
    }
    for s in 0..=tokens.len() - n {
        let window = tokens.slice(s, s + n);
        for (ell, pad) in key.pads.iter().enumerate() {
            let outcome = zero::decode(sk, &window.xor(pad)?)?;
            if outcome.detected() {
                return Ok(WmReport {
                    detected: true,
                    window_start: s,
                    window_len: n,
                    pad_index: ell,
                    unsat_count: outcome.unsat_count,
                    threshold: outcome.threshold,
                });
            }
        }
    }
    Ok(WmReport::miss())
}

fn detect_plain_fast(
    key: &WatermarkKey,
    sk: &ZeroBitSecretKey,
    tokens: &BitVec,
) -> Result<WmReport, WmError> {
    let n = sk.params.n;
    if tokens.len() < n {
        return Ok(WmReport::miss());
    }
    let rows: Vec<Vec<u32>> = sk
        .p
        .rows()
        .iter()
        .map(|row| row.indices().iter().map(|&i| i as u32).collect())
        .collect();
    let scanner = WindowScanner::new(n, rows);
    let threshold = sk.params.threshold();
    let mut best: Option<WmReport> = None;
    for (ell, pad) in key.pads.iter().enumerate() {
        let constants = sk.pz().xor(&sk.p.syndrome(pad)?)?;
        let counts = scanner.scan(tokens, &constants);
        for (s, &unsat) in counts.iter().enumerate() {
            if (unsat as usize) < threshold {
                let hit = WmReport {
                    detected: true,
                    window_start: s,
                    window_len: n,
                    pad_index: ell,
                    unsat_count: unsat as usize,
                    threshold,
                };
                // Naive scan order is window-major; keep the earliest
                // window (then lowest pad) so verdicts and locations
                // agree with it.
                if best.as_ref().is_none_or(|b| s < b.window_start) {
                    best = Some(hit);
                }
                break;
            }
        }
    }
    Ok(best.unwrap_or_else(WmReport::miss))
}

/// Candidate (start, len) windows for deletion detection: a coarse grid
/// of start/end fractions, always including the full text.
fn deletion_grid(len: usize, min_len: usize) -> Vec<(usize, usize)> {
    const STEPS: usize = 8;
    let mut grid = Vec::new();
    for i in 0..STEPS {
        let s = i * len / STEPS;
        for j in 0..STEPS - i {
            let e = len - j * len / STEPS;
            if e - s >= min_len {
                grid.push((s, e - s));
            }
        }
    }
    grid
}

fn detect_deletion(
    key: &WatermarkKey,
    sk: &ZeroBitSecretKey,
    m: usize,
    tokens: &BitVec,
) -> Result<WmReport, WmError> {
    let n = sk.params.n;
    if tokens.len() < n {
        return Ok(WmReport::miss());
    }
    // Fixed tie-break seed keeps detection deterministic.
    let mut tie_rng = RandomSource::from_u64(0x6d616a6465633031);
    // Windows much shorter than a received block can't carry the code.
    let min_len = (n * m / 2).max(n);
    for (s, w) in deletion_grid(tokens.len(), min_len) {
        let y = majdec(&tokens.slice(s, s + w), n, &mut tie_rng)?;
        for (ell, pad) in key.pads.iter().enumerate() {
            let outcome = zero::decode(sk, &y.xor(pad)?)?;
            if outcome.detected() {
                return Ok(WmReport {
                    detected: true,
                    window_start: s,
                    window_len: w,
                    pad_index: ell,
                    unsat_count: outcome.unsat_count,
                    threshold: outcome.threshold,
                });
            }
        }
    }
    Ok(WmReport::miss())
}

/// Algorithm-faithful window scan (decode per window); for plain keys
/// only length-n windows are decodable and shorter ones are skipped.
pub fn wm_detect(key: &WatermarkKey, tokens: &BitVec) -> Result<WmReport, WmError> {
    match &key.code {
        WmCode::Plain { sk, .. } => detect_plain_naive(key, sk, tokens),
        WmCode::Deletion { sk, m, .. } => detect_deletion(key, sk, *m, tokens),
    }
}

/// Same verdict as [`wm_detect`], via the word-parallel window scanner.
pub fn wm_detect_fast(key: &WatermarkKey, tokens: &BitVec) -> Result<WmReport, WmError> {
    match &key.code {
        WmCode::Plain { sk, .. } => detect_plain_fast(key, sk, tokens),
        WmCode::Deletion { sk, m, .. } => detect_deletion(key, sk, *m, tokens),
    }
}

fn entropy_sum(
    model: &dyn Model,
    prompt: &str,
    tokens: &BitVec,
    i: usize,
    j: usize,
    truncate: bool,
) -> Result<f64, WmError> {
    if i < 1 || i > j || j > tokens.len() {
        return Err(WmError::BadRange { i, j, len: tokens.len() });
    }
    let mut session = model.start(prompt);
    let mut total = 0.0;
    for pos in 1..=j {
        let phat = session.phat();
        let bit = tokens.get(pos - 1);
        if pos >= i {
            let p = if bit { phat } else { 1.0 - phat };
            if p == 0.0 {
                return Err(WmError::ZeroProbability(pos));
            }
            let term = -p.log2();
            total += if truncate { term.min(1.0) } else { term };
        }
        session.push(bit);
    }
    Ok(total)
}

/// H_e^{[i,j]} = Σ −log₂ p(tₗ) over ℓ ∈ [i, j] (1-based, inclusive),
/// with each p taken on the actual prefix.
pub fn empirical_entropy(
    model: &dyn Model,
    prompt: &str,
    tokens: &BitVec,
    i: usize,
    j: usize,
) -> Result<f64, WmError> {
    entropy_sum(model, prompt, tokens, i, j, false)
}

/// Like [`empirical_entropy`] with each per-token term clamped at 1.
pub fn truncated_entropy(
    model: &dyn Model,
    prompt: &str,
    tokens: &BitVec,
    i: usize,
    j: usize,
) -> Result<f64, WmError> {
    entropy_sum(model, prompt, tokens, i, j, true)
}
