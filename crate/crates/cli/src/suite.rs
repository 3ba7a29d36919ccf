//! The acceptance suite: fifteen numbered, fully seeded criteria
//! covering completeness, soundness, statistical behavior, the rate and
//! robustness transforms, the three applications, and determinism.
//!
//! Every criterion builds all of its randomness from fixed seeds so
//! that a re-run reproduces the same outcome byte for byte; criterion
//! 15 exploits exactly that. The two expensive large-n keys are shared
//! across criteria through `OnceLock`s (they are themselves derived
//! from fixed seeds, so sharing does not affect determinism).

use std::sync::OnceLock;

use prc::attr::{attr_detect, attr_generate, attr_setup, attr_text, attr_forge_experiment, MacScheme};
use prc::channel::ChannelSpec;
use prc::constrate::{constrate_decode, constrate_encode, constrate_keygen};
use prc::ecc::RepetitionEcc;
use prc::f2::BitVec;
use prc::majority::{deletion_decode, deletion_encode, deletion_keygen, estimate_majority_agreement};
use prc::multibit::{multibit_decode, multibit_encode, MultiBitKey};
use prc::prg::ShaPrg;
use prc::rng::RandomSource;
use prc::stats::{battery, sparse_parity_attack};
use prc::stego::{steg_decode, steg_encode, CovertextChannel, DocHash, NotSymbolHash, ParityHash, SkewedSymbols, StegoCode, StegoKey, UniformSymbols};
use prc::watermark::{binarize_model, biased_token_probability, model_sample, wm_detect, wm_detect_fast, wm_generate, wm_setup, wm_setup_deletion, HashDrivenModel, Model, PrefixCode, RandomTokenModel};
use prc::zero::{self, expected_unsat_fraction, preset_lpn, PrcParams, ZeroBitPublicKey, ZeroBitSecretKey};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::keyfile::{self, Key};

pub const COUNT: usize = 15;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub index: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} {}: {} — {}",
            self.index,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

/// Fresh computation of one criterion (1-based).
pub fn run(index: usize) -> Outcome {
    match index {
        1 => c01_zero_completeness(),
        2 => c02_zero_soundness(),
        3 => c03_randomness_battery(),
        4 => c04_sparsity_attack(),
        5 => c05_multibit_round_trip(),
        6 => c06_constant_rate(),
        7 => c07_majority_agreement(),
        8 => c08_deletion_round_trip(),
        9 => c09_watermark_undetectability(),
        10 => c10_watermark_substring(),
        11 => c11_watermark_deletion(),
        12 => c12_binarization_exactness(),
        13 => c13_attribution(),
        14 => c14_stego(),
        15 => c15_determinism(),
        _ => panic!("criterion index {index} out of 1..=15"),
    }
}

/// Memoized run; the numbered tests call this in order, so criterion 15
/// can compare cached first runs against fresh ones.
pub fn cached(index: usize) -> &'static Outcome {
    const ONCE: OnceLock<Outcome> = OnceLock::new();
    static CACHE: [OnceLock<Outcome>; COUNT] = [ONCE; COUNT];
    CACHE[index - 1].get_or_init(|| run(index))
}

// --- shared large keys ----------------------------------------------------

fn big_params() -> PrcParams {
    preset_lpn(16384, 0.05, 1.0 / 3.0).expect("preset")
}

/// The n = 16384 key shared by criteria 1, 2, 3, and 5.
fn big_key() -> &'static (ZeroBitSecretKey, ZeroBitPublicKey) {
    static KEY: OnceLock<(ZeroBitSecretKey, ZeroBitPublicKey)> = OnceLock::new();
    KEY.get_or_init(|| {
        let mut rng = RandomSource::from_u64(0xacc0_0001);
        zero::keygen(&big_params(), &mut rng).expect("big keygen")
    })
}

/// The n = 16384, η = 0 watermark key of criterion 10 (L* = 3n).
fn big_wm_key() -> &'static prc::watermark::WatermarkKey {
    static KEY: OnceLock<prc::watermark::WatermarkKey> = OnceLock::new();
    KEY.get_or_init(|| {
        let params = preset_lpn(16384, 0.0, 1.0 / 3.0).expect("preset");
        let mut rng = RandomSource::from_u64(0xacc0_0010);
        wm_setup(&params, 3 * params.n, &mut rng).expect("wm setup")
    })
}

// --- criteria -------------------------------------------------------------

fn c01_zero_completeness() -> Outcome {
    let (sk, pk) = big_key();
    let params = sk.params;
    let channel = ChannelSpec::parse("adv:0.10:subset").unwrap();
    // Margin pre-check: piling-up at the composed flip rate must clear
    // the threshold before any sampling.
    let delta = params.eta * 0.9 + 0.10 * (1.0 - params.eta);
    let expect = expected_unsat_fraction(params.t, delta);
    let thr = params.threshold() as f64 / params.r as f64;

    let mut rng = RandomSource::from_u64(0xacc1_0001);
    let mut hits = 0usize;
    for _ in 0..1000 {
        let x = zero::encode(pk, &mut rng);
        let y = channel.apply(&x, &mut rng);
        if zero::decode(sk, &y).unwrap().detected() {
            hits += 1;
        }
    }
    Outcome {
        index: 1,
        name: "zero-bit completeness",
        pass: hits >= 990 && expect < thr,
        detail: format!(
            "detected {hits}/1000 (need 990); predicted unsat {expect:.4} < threshold {thr:.4}"
        ),
    }
}

fn c02_zero_soundness() -> Outcome {
    let (sk, _) = big_key();
    let mut rng = RandomSource::from_u64(0xacc1_0002);
    let mut false_hits = 0usize;
    for _ in 0..10_000 {
        let x = BitVec::random(sk.params.n, &mut rng);
        if zero::decode(sk, &x).unwrap().detected() {
            false_hits += 1;
        }
    }
    let exponent = 2.0 * sk.params.r as f64 * sk.params.zeta * sk.params.zeta;
    Outcome {
        index: 2,
        name: "zero-bit soundness",
        pass: false_hits == 0,
        detail: format!(
            "false positives {false_hits}/10000 (need 0); per-trial bound exp(-{exponent:.0})"
        ),
    }
}

/// Known to fail, and the failure is genuine: with t = 4 at check
/// density r/n = 0.99, the random 4-XOR system sits above the 4-XORSAT
/// satisfiability threshold (α₄ ≈ 0.9768), so the kernel restricted to
/// the 2-core collapses to {0, 1} — t is even, so the all-ones vector
/// satisfies every check. Measured on this key: kernel dimension 365
/// with 15961 of 16384 coordinates in one equivalence class, i.e. 95%
/// of adjacent bit pairs are perfectly correlated across codewords,
/// which the serial/column-correlation/runs tests correctly reject.
/// t = 5 clears the threshold (α₅ ≈ 0.9924) and passes the battery but
/// drops the criterion-1 completeness to ~974/1000: no sparsity
/// satisfies both criteria at this (n, r, ζ, η) point. The battery is
/// doing its job, so the failure is reported rather than papered over.
fn c03_randomness_battery() -> Outcome {
    let (_, pk) = big_key();
    let mut rng = RandomSource::from_u64(0xacc1_0003);
    let samples: Vec<BitVec> = (0..1000).map(|_| zero::encode(pk, &mut rng)).collect();
    let reports = battery(&samples).unwrap();
    let pass = reports.iter().all(|r| r.pass);
    let mut detail = reports
        .iter()
        .map(|r| format!("{}={}", r.name, if r.pass { "ok" } else { "FAIL" }))
        .collect::<Vec<_>>()
        .join(" ");
    if !pass {
        detail.push_str(
            " (genuine structure: t=4 at density 0.99 exceeds the 4-XORSAT \
             threshold, collapsing the 2-core kernel to {0,1}; see examples/kernel_structure.rs)",
        );
    }
    Outcome { index: 3, name: "codeword randomness battery", pass, detail }
}

fn c04_sparsity_attack() -> Outcome {
    // Small r leaves a large kernel, so the only ≤2-sparse structure in
    // the t = 2 arm is the parity rows themselves; the t = 4 arm has
    // none reachable at t_max = 2.
    let mut rng = RandomSource::from_u64(0xacc1_0004);
    let weak = PrcParams { n: 64, g: 36, t: 2, r: 32, eta: 0.0, zeta: 0.15 };
    let (sk, pk) = zero::keygen(&weak, &mut rng).unwrap();
    let samples: Vec<BitVec> = (0..500).map(|_| zero::encode(&pk, &mut rng)).collect();
    let found = sparse_parity_attack(&samples, 2, 10_000).unwrap();
    let weak_row = found
        .as_ref()
        .map(|f| sk.p.rows().iter().any(|row| row.indices() == f.indices.as_slice()))
        .unwrap_or(false);

    // At n = 64 two weight-4 rows occasionally share three indices,
    // which puts a genuine 2-sparse vector in the dual and the attack
    // rightly finds it; that collision probability vanishes at real
    // scale, so the t = 4 arm conditions on a collision-free key.
    let strong = PrcParams { t: 4, ..weak };
    let (_, pk4) = loop {
        let (sk4, pk4) = zero::keygen(&strong, &mut rng).unwrap();
        let rows = sk4.p.rows();
        let collision = rows.iter().enumerate().any(|(i, a)| {
            rows[..i].iter().any(|b| {
                a.indices().iter().filter(|x| b.indices().contains(x)).count() > 2
            })
        });
        if !collision {
            break (sk4, pk4);
        }
    };
    let samples4: Vec<BitVec> = (0..500).map(|_| zero::encode(&pk4, &mut rng)).collect();
    let found4 = sparse_parity_attack(&samples4, 2, 10_000).unwrap();

    Outcome {
        index: 4,
        name: "sparsity attack demo",
        pass: weak_row && found4.is_none(),
        detail: format!(
            "t=2: recovered P row {:?} ({}); t=4: found {}",
            found.as_ref().map(|f| f.indices.clone()).unwrap_or_default(),
            if weak_row { "a true row" } else { "NOT a row" },
            if found4.is_none() { "none" } else { "a spurious parity" },
        ),
    }
}

fn c05_multibit_round_trip() -> Outcome {
    let (sk, pk) = big_key();
    let mut rng = RandomSource::from_u64(0xacc1_0005);
    let key = MultiBitKey {
        inner_sk: sk.clone(),
        inner_pk: pk.clone(),
        ell: 16,
        pi: prc::f2::random_permutation(sk.params.n * 17, &mut rng),
    };
    let mut results = Vec::new();
    for spec in ["adv:0.08:subset", "adv:0.08:prefix"] {
        let channel = ChannelSpec::parse(spec).unwrap();
        let mut ok = 0usize;
        for _ in 0..200 {
            let msg = BitVec::random(16, &mut rng);
            let x = multibit_encode(&key, &msg, &mut rng).unwrap();
            let y = channel.apply(&x, &mut rng);
            if multibit_decode(&key, &y).unwrap().message == Some(msg) {
                ok += 1;
            }
        }
        results.push((spec, ok));
    }
    Outcome {
        index: 5,
        name: "multi-bit round trip",
        pass: results.iter().all(|&(_, ok)| ok >= 198),
        detail: results
            .iter()
            .map(|(spec, ok)| format!("{spec}: {ok}/200 (need 198)"))
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn c06_constant_rate() -> Outcome {
    let inner = preset_lpn(2048, 0.05, 1.0 / 3.0).unwrap();
    let mut rng = RandomSource::from_u64(0xacc1_0006);
    let key = constrate_keygen(128, &inner, RepetitionEcc::new(128, 15).unwrap(), ShaPrg, &mut rng)
        .unwrap();
    let claim = 128.0 / (2048.0 * 129.0 + 128.0 * 15.0);
    let rate_exact = key.rate() == claim;
    let channel = ChannelSpec::parse("adv:0.05:subset").unwrap();
    let mut ok = 0usize;
    for _ in 0..200 {
        let msg = BitVec::random(128, &mut rng);
        let x = constrate_encode(&key, &msg, &mut rng).unwrap();
        let y = channel.apply(&x, &mut rng);
        if constrate_decode(&key, &y).unwrap() == Some(msg) {
            ok += 1;
        }
    }
    Outcome {
        index: 6,
        name: "constant-rate round trip",
        pass: rate_exact && ok >= 198,
        detail: format!(
            "rate {:.6} equals k/(n'+n_ecc): {rate_exact}; recovered {ok}/200 (need 198)",
            key.rate()
        ),
    }
}

fn c07_majority_agreement() -> Outcome {
    let mut rng = RandomSource::from_u64(0xacc1_0007);
    let channel = ChannelSpec::parse("bsc:0.1|bdc:0.3").unwrap();
    let agree = estimate_majority_agreement(256, 1025, &channel, 50, &mut rng).unwrap();
    Outcome {
        index: 7,
        name: "majority-code agreement",
        pass: agree >= 0.55,
        detail: format!("mean per-bit agreement {agree:.4} (need 0.55) at n=256 m=1025"),
    }
}

/// Tuned deletion parameters; chosen empirically by the tuning
/// experiment shipped as the `tune_deletion` example.
fn deletion_params() -> PrcParams {
    PrcParams { n: 1024, g: 48, t: 1, r: 973, eta: 0.0, zeta: 0.1 }
}

fn c08_deletion_round_trip() -> Outcome {
    let params = deletion_params();
    let m = 8193;
    let mut rng = RandomSource::from_u64(0xacc1_0008);
    let key = deletion_keygen(&params, m, &mut rng).unwrap();
    let channel = ChannelSpec::parse("bdc:0.3|bsc:0.05").unwrap();
    let mut ok = 0usize;
    for _ in 0..100 {
        let x = deletion_encode(&key, None, &mut rng).unwrap();
        let y = channel.apply(&x, &mut rng);
        if deletion_decode(&key, &y, &mut rng).unwrap().detected {
            ok += 1;
        }
    }
    // Soundness on uniform strings of the typical post-deletion length.
    let len = (params.n * m) as f64 * 0.7;
    let mut false_hits = 0usize;
    for _ in 0..1000 {
        let x = BitVec::random(len as usize, &mut rng);
        if deletion_decode(&key, &x, &mut rng).unwrap().detected {
            false_hits += 1;
        }
    }
    Outcome {
        index: 8,
        name: "deletion round trip",
        pass: ok >= 95 && false_hits == 0,
        detail: format!(
            "detected {ok}/100 (need 95) under bdc:0.3|bsc:0.05; uniform false positives {false_hits}/1000 (need 0)"
        ),
    }
}

fn undetectability_params() -> PrcParams {
    // r is kept well below n so the generator's row space is large and
    // every low-order token marginal matches the model's exactly.
    PrcParams { n: 512, g: 81, t: 3, r: 384, eta: 0.0, zeta: 0.15 }
}

fn gram_index(resp: &BitVec, pos: usize, k: usize) -> usize {
    (0..k).fold(0, |acc, j| (acc << 1) | usize::from(resp.get(pos + j)))
}

fn c09_watermark_undetectability() -> Outcome {
    let params = undetectability_params();
    let mut rng = RandomSource::from_u64(0xacc1_0009);
    let key = wm_setup(&params, 512, &mut rng).unwrap();
    let model = HashDrivenModel { lo: 0.3, hi: 0.7, seed: 0x5eed, max_len: 1 << 26 };

    let marked: Vec<BitVec> =
        (0..10_000).map(|_| wm_generate(&key, "", &model, &mut rng).unwrap().tokens).collect();
    let plain: Vec<BitVec> = (0..10_000).map(|_| model_sample("", &model, 512, &mut rng)).collect();

    // One k-gram per response at a deterministic per-response position,
    // so the two-sample chi-square is over independent draws.
    let mut gram_ok = true;
    let mut gram_detail = Vec::new();
    for k in 1..=3usize {
        let cats = 1 << k;
        let mut counts = vec![[0u64; 2]; cats];
        for (j, (a, b)) in marked.iter().zip(&plain).enumerate() {
            let pos = (j * 2_654_435_761) % (512 - k + 1);
            counts[gram_index(a, pos, k)][0] += 1;
            counts[gram_index(b, pos, k)][1] += 1;
        }
        let mut stat = 0.0;
        let mut df = 0usize;
        for c in &counts {
            let e = (c[0] + c[1]) as f64 / 2.0;
            if e > 0.0 {
                stat += (c[0] as f64 - e).powi(2) / e + (c[1] as f64 - e).powi(2) / e;
                df += 1;
            }
        }
        let df = (df.max(2) - 1) as f64;
        let crit = ChiSquared::new(df).unwrap().inverse_cdf(1.0 - 0.001 / 3.0);
        gram_ok &= stat < crit;
        gram_detail.push(format!("{k}-gram chi2 {stat:.2} < {crit:.2}"));
    }

    // Exact marginal law Pr[t_i = 1] = p̂_i at 10 short fixed prefixes
    // (short keeps the involved generator rows independent).
    let prefix_source = model_sample("prefixes", &model, 30, &mut rng);
    let pk = match &key.code {
        prc::watermark::WmCode::Plain { pk, .. } => pk,
        _ => unreachable!(),
    };
    let mut marginal_ok = true;
    let mut worst_z: f64 = 0.0;
    for i in 1..=10usize {
        let len = 3 * i;
        let mut session = model.start("");
        for b in prefix_source.slice(0, len).iter() {
            session.push(b);
        }
        let phat = session.phat();
        let m_draws = 100_000usize;
        let mut ones = 0usize;
        for _ in 0..m_draws {
            let x = zero::encode(pk, &mut rng);
            let bit = x.get(len) ^ key.pads[0].get(len);
            if rng.bernoulli(biased_token_probability(phat, bit)) {
                ones += 1;
            }
        }
        let sigma = (phat * (1.0 - phat) / m_draws as f64).sqrt();
        let z = (ones as f64 / m_draws as f64 - phat).abs() / sigma;
        worst_z = worst_z.max(z);
        marginal_ok &= z <= 3.0;
    }

    Outcome {
        index: 9,
        name: "watermark undetectability",
        pass: gram_ok && marginal_ok,
        detail: format!("{}; worst marginal |z| {worst_z:.2} (need <= 3)", gram_detail.join(", ")),
    }
}

fn c10_watermark_substring() -> Outcome {
    let key = big_wm_key();
    let n = key.code.inner_n();
    let window = (16 * n) / 10; // 1.6n: always fits a full block somewhere
    let model = HashDrivenModel { lo: 0.3, hi: 0.7, seed: 0x5eed, max_len: 1 << 26 };
    let bsc = ChannelSpec::parse("bsc:0.05").unwrap();
    let mut rng = RandomSource::from_u64(0xacc1_0010);

    let mut ok = 0usize;
    for _ in 0..200 {
        let resp = wm_generate(key, "", &model, &mut rng).unwrap().tokens;
        // Sample crop starts until the window covers a whole block.
        let s = loop {
            let s = rng.index(resp.len() - window + 1);
            let boundary = s.div_ceil(n) * n;
            if boundary + n <= s + window {
                break s;
            }
        };
        let cropped = bsc.apply(&resp.slice(s, s + window), &mut rng);
        if wm_detect_fast(key, &cropped).unwrap().detected {
            ok += 1;
        }
    }

    let mut false_hits = 0usize;
    for _ in 0..1000 {
        let text = model_sample("", &model, window, &mut rng);
        if wm_detect_fast(key, &text).unwrap().detected {
            false_hits += 1;
        }
    }

    Outcome {
        index: 10,
        name: "watermark substring robustness",
        pass: ok >= 198 && false_hits == 0,
        detail: format!(
            "detected {ok}/200 cropped+bsc:0.05 (need 198); unwatermarked false positives {false_hits}/1000 (need 0)"
        ),
    }
}

fn c11_watermark_deletion() -> Outcome {
    let params = deletion_params();
    let m = 4097;
    let mut rng = RandomSource::from_u64(0xacc1_0011);
    let key = wm_setup_deletion(&params, m, params.n * m, &mut rng).unwrap();
    let model = HashDrivenModel { lo: 0.45, hi: 0.55, seed: 0x5eed, max_len: 1 << 26 };
    let channel = ChannelSpec::parse("bdc:0.2|bsc:0.05").unwrap();
    let mut ok = 0usize;
    for _ in 0..100 {
        let resp = wm_generate(&key, "", &model, &mut rng).unwrap().tokens;
        let received = channel.apply(&resp, &mut rng);
        if wm_detect(&key, &received).unwrap().detected {
            ok += 1;
        }
    }
    Outcome {
        index: 11,
        name: "watermark deletion robustness",
        pass: ok >= 90,
        detail: format!("detected {ok}/100 (need 90) under bdc:0.2|bsc:0.05"),
    }
}

fn c12_binarization_exactness() -> Outcome {
    let token_model = RandomTokenModel { alphabet: 4, seed: 0xb12a, max_tokens: 4 };
    let code = PrefixCode::from_strings(&["0", "10", "110", "111"]).unwrap();
    let binary = binarize_model(token_model.clone(), code.clone()).unwrap();

    // Probability the binarized model emits exactly the bits of a token
    // string, replaying one session per string.
    let binary_prob = |tokens: &[usize]| -> f64 {
        let bits = code.encode(tokens);
        let mut session = binary.start("");
        let mut p = 1.0;
        for b in bits.iter() {
            let phat = session.phat();
            p *= if b { phat } else { 1.0 - phat };
            session.push(b);
        }
        p
    };
    let token_prob = |tokens: &[usize]| -> f64 {
        use prc::watermark::TokenModel;
        let mut p = 1.0;
        for (i, &t) in tokens.iter().enumerate() {
            p *= token_model.probs("", &tokens[..i])[t];
        }
        p
    };

    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for len in 1..=3usize {
        let mut tokens = vec![0usize; len];
        loop {
            worst = worst.max((binary_prob(&tokens) - token_prob(&tokens)).abs());
            checked += 1;
            // Odometer over the 4-ary strings of this length.
            let mut i = 0;
            while i < len {
                tokens[i] += 1;
                if tokens[i] < 4 {
                    break;
                }
                tokens[i] = 0;
                i += 1;
            }
            if i == len {
                break;
            }
        }
    }
    Outcome {
        index: 12,
        name: "binarization exactness",
        pass: worst < 1e-12,
        detail: format!("{checked} token strings; worst probability gap {worst:.2e} (need < 1e-12)"),
    }
}

fn c13_attribution() -> Outcome {
    let params = PrcParams { n: 512, g: 81, t: 2, r: 480, eta: 0.0, zeta: 0.17 };
    let block = params.n * 65;
    let mut rng = RandomSource::from_u64(0xacc1_0013);
    let (pk, sk) =
        attr_setup(&params, 64, 2 * block, MacScheme::default(), &mut rng).unwrap();
    let model = HashDrivenModel { lo: 0.3, hi: 0.7, seed: 0x5eed, max_len: 1 << 26 };

    let mut honest_ok = 0usize;
    let mut detect_ok = 0usize;
    let mut flipped_false = 0usize;
    for i in 0..100usize {
        let resp = attr_generate(&pk, &sk, "", &model, &mut rng).unwrap().tokens;
        let report = attr_text(&pk, &resp).unwrap();
        if report.verified && report.prefix_len == block {
            honest_ok += 1;
        }
        if attr_detect(&pk, &resp).unwrap() {
            detect_ok += 1;
        }
        let mut tampered = resp.clone();
        tampered.flip((i * 733) % block);
        if !attr_text(&pk, &tampered).unwrap().verified {
            flipped_false += 1;
        }
    }

    let mut splice = |_: &prc::attr::AttrPublicKey<MacScheme>,
                      oracle: &mut dyn FnMut(&mut RandomSource) -> BitVec,
                      rng: &mut RandomSource|
     -> BitVec {
        let a = oracle(rng);
        let b = oracle(rng);
        a.slice(0, block).concat(&b.slice(block, b.len()))
    };
    let splice_wins =
        attr_forge_experiment(&mut splice, &pk, &sk, "", &model, 50, &mut rng).unwrap();
    let mut flip = |_: &prc::attr::AttrPublicKey<MacScheme>,
                    oracle: &mut dyn FnMut(&mut RandomSource) -> BitVec,
                    rng: &mut RandomSource|
     -> BitVec {
        let mut a = oracle(rng);
        a.flip(rng.index(block));
        a
    };
    let flip_wins = attr_forge_experiment(&mut flip, &pk, &sk, "", &model, 50, &mut rng).unwrap();

    Outcome {
        index: 13,
        name: "attribution",
        pass: honest_ok == 100
            && flipped_false == 100
            && splice_wins == 0.0
            && flip_wins == 0.0
            && detect_ok == 100,
        detail: format!(
            "honest verified {honest_ok}/100; flipped rejected {flipped_false}/100; forge wins splice {splice_wins} flip {flip_wins} (need 0); detection {detect_ok}/100"
        ),
    }
}

fn c14_stego() -> Outcome {
    let params = PrcParams { n: 256, g: 24, t: 2, r: 224, eta: 0.0, zeta: 0.15 };
    let mut rng = RandomSource::from_u64(0xacc1_0014);
    let key = StegoKey {
        code: StegoCode::Multi(
            prc::multibit::multibit_keygen(16, &params, &mut rng).unwrap(),
        ),
        kappa: 16,
    };
    let block = key.code.block_len(); // 4352 documents per message

    // Exactness: 10^5 documents from the unbiased scheme, chi-square
    // against the uniform 4-symbol channel.
    let uniform = UniformSymbols { k: 4 };
    let parity = ParityHash;
    let mut counts = [0u64; 4];
    let mut emitted = 0usize;
    while emitted < 100_000 {
        let msg = BitVec::random(16, &mut rng);
        let st = steg_encode(&key, &uniform, &parity, &msg, &[], &mut rng).unwrap();
        for &d in &st.docs {
            counts[d as usize] += 1;
        }
        emitted += st.docs.len();
    }
    let e = emitted as f64 / 4.0;
    let chi_a: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let crit_a = ChiSquared::new(3.0).unwrap().inverse_cdf(0.999);

    // Robustness: substitute 5% of documents by ones with the opposite
    // hash bit (f ∘ E' = BSC_0.05 on the embedded bits).
    let mut recovered = 0usize;
    for _ in 0..200 {
        let msg = BitVec::random(16, &mut rng);
        let st = steg_encode(&key, &uniform, &parity, &msg, &[], &mut rng).unwrap();
        let mut docs = st.docs.clone();
        for d in docs.iter_mut() {
            if rng.bernoulli(0.05) {
                let want = !parity.bit(*d);
                loop {
                    let fresh = uniform.sample(&[], &mut rng);
                    if parity.bit(fresh) == want {
                        *d = fresh;
                        break;
                    }
                }
            }
        }
        if steg_decode(&key, &parity, &docs).unwrap() == Some(msg) {
            recovered += 1;
        }
    }

    // κ = 2 over the skewed channel: agreement ≥ 1/2 + α/2 − 0.01 and
    // marginal distribution equality.
    let skewed = SkewedSymbols::new(vec![0.5, 0.25, 0.25]);
    let not0 = NotSymbolHash { pivot: 0, alpha: 0.5 };
    let key2 = StegoKey { code: key.code.clone(), kappa: 2 };
    let mut skew_counts = [0u64; 3];
    let mut flips = 0usize;
    let mut docs2 = 0usize;
    for _ in 0..20 {
        let msg = BitVec::random(16, &mut rng);
        let st = steg_encode(&key2, &skewed, &not0, &msg, &[], &mut rng).unwrap();
        flips += st.embedded_flips;
        docs2 += st.docs.len();
        for &d in &st.docs {
            skew_counts[d as usize] += 1;
        }
    }
    let agreement = 1.0 - flips as f64 / docs2 as f64;
    let chi_b: f64 = [0.5, 0.25, 0.25]
        .iter()
        .zip(&skew_counts)
        .map(|(w, &c)| {
            let e = w * docs2 as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let crit_b = ChiSquared::new(2.0).unwrap().inverse_cdf(0.999);

    let pass = chi_a < crit_a
        && recovered >= 198
        && agreement >= 0.74
        && chi_b < crit_b
        && block == 4352;
    Outcome {
        index: 14,
        name: "stego exactness and robustness",
        pass,
        detail: format!(
            "uniform chi2 {chi_a:.2} < {crit_a:.2}; recovered {recovered}/200 (need 198); kappa=2 agreement {agreement:.4} (need 0.74); skew chi2 {chi_b:.2} < {crit_b:.2}"
        ),
    }
}

/// Byte-exact determinism of the key/codeword/report pipelines, then a
/// full re-run of criteria 1–14 compared against their first runs.
fn c15_determinism() -> Outcome {
    let pipeline = || -> String {
        let params = PrcParams { n: 256, g: 24, t: 2, r: 224, eta: 0.05, zeta: 0.15 };
        let mut out = String::new();
        let mut rng = RandomSource::from_u64(0xacc1_0015);
        let (sk, pk) = zero::keygen(&params, &mut rng).unwrap();
        out += &keyfile::save(&Key::Zero { sk: sk.clone(), pk: pk.clone() });
        let x = zero::encode(&pk, &mut rng);
        out += &keyfile::format_bits(&x);
        let d = zero::decode(&sk, &x).unwrap();
        out += &format!("\nunsat={} threshold={}\n", d.unsat_count, d.threshold);

        let multi = prc::multibit::multibit_keygen(4, &params, &mut rng).unwrap();
        out += &keyfile::save(&Key::Multi(multi.clone()));
        let msg = BitVec::random(4, &mut rng);
        let c = multibit_encode(&multi, &msg, &mut rng).unwrap();
        out += &keyfile::format_bits(&c);

        let cr = constrate_keygen(
            8,
            &params,
            RepetitionEcc::new(16, 3).unwrap(),
            ShaPrg,
            &mut rng,
        )
        .unwrap();
        out += &keyfile::save(&Key::ConstRate(cr));
        let del = deletion_keygen(&params, 5, &mut rng).unwrap();
        out += &keyfile::save(&Key::Deletion(del));
        let wm = wm_setup(&params, 512, &mut rng).unwrap();
        out += &keyfile::save(&Key::Watermark(wm));
        let (apk, ask) =
            attr_setup(&params, 16, 2 * 256 * 17, MacScheme { tag_bits: 16 }, &mut rng).unwrap();
        out += &keyfile::save(&Key::Attribution { pk: apk, sk: ask });
        let stego = StegoKey {
            code: StegoCode::Multi(prc::multibit::multibit_keygen(4, &params, &mut rng).unwrap()),
            kappa: 4,
        };
        out += &keyfile::save(&Key::Stego(stego));
        out
    };
    let artifacts_ok = pipeline() == pipeline();

    let mut rerun_ok = true;
    let mut first_fail = String::new();
    for i in 1..=14usize {
        let first = cached(i);
        let again = run(i);
        if first.pass != again.pass || first.detail != again.detail {
            rerun_ok = false;
            if first_fail.is_empty() {
                first_fail = format!(" (criterion {i} diverged)");
            }
        }
    }

    Outcome {
        index: 15,
        name: "determinism",
        pass: artifacts_ok && rerun_ok,
        detail: format!(
            "key/codeword/report pipelines byte-identical: {artifacts_ok}; criteria 1-14 re-run identical: {rerun_ok}{first_fail}"
        ),
    }
}
