//! Tuning experiment for deletion-robust parameters.
//!
//! The asymptotic requirement m = Ω(n log⁶ n) on the majority-code
//! width is far beyond desk scale, so the (n, m, t, r, ζ) used by the
//! deletion tests are chosen empirically: this program measures, for
//! candidate settings and channels, (a) the per-bit agreement of the
//! majority code through the channel and (b) the resulting unsat
//! fraction at the zero-bit decoder, and prints the margin to the
//! detection threshold. Run with `cargo run --release --example
//! tune_deletion`.

use prc::channel::ChannelSpec;
use prc::f2::BitVec;
use prc::majority::{estimate_majority_agreement, majdec, majenc};
use prc::rng::RandomSource;
use prc::watermark::biased_token_probability;
use prc::zero::{self, expected_unsat_fraction, PrcParams};

/// Unsat fraction of the zero-bit decoder when the codeword passes
/// through majenc → (optional embedding BSC) → channel → majdec.
#[allow(clippy::too_many_arguments)]
fn measure_unsat(
    params: &PrcParams,
    m: usize,
    embed_lo: Option<f64>,
    channel: &ChannelSpec,
    trials: usize,
    rng: &mut RandomSource,
) -> (f64, f64) {
    let (sk, pk) = zero::keygen(params, rng).unwrap();
    let mut fractions = Vec::new();
    for _ in 0..trials {
        let x = zero::encode(&pk, rng);
        let enc = majenc(&x, m, rng).unwrap();
        // Optional watermark-embedding layer: tokens drawn from the
        // biased sampler with p̂ ∈ [lo, 1−lo].
        let sent = match embed_lo {
            None => enc,
            Some(lo) => {
                let mut t = BitVec::zeros(enc.len());
                for i in 0..enc.len() {
                    let phat = lo + (1.0 - 2.0 * lo) * rng.unit();
                    t.set(i, rng.bernoulli(biased_token_probability(phat, enc.get(i))));
                }
                t
            }
        };
        let recv = channel.apply(&sent, rng);
        let y = majdec(&recv, params.n, rng).unwrap();
        let out = zero::decode(&sk, &y).unwrap();
        fractions.push(out.unsat_count as f64 / params.r as f64);
    }
    let mean = fractions.iter().sum::<f64>() / trials as f64;
    let var =
        fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (trials - 1).max(1) as f64;
    (mean, var.sqrt())
}

fn report(label: &str, params: &PrcParams, m: usize, embed_lo: Option<f64>, spec: &str) {
    let mut rng = RandomSource::from_u64(0xde1e7e);
    let channel = ChannelSpec::parse(spec).unwrap();
    let agree =
        estimate_majority_agreement(params.n, m, &channel, 20, &mut rng).unwrap();
    let (unsat, sd) = measure_unsat(params, m, embed_lo, &channel, 20, &mut rng);
    let threshold = params.threshold() as f64 / params.r as f64;
    println!(
        "{label}: n={} m={m} t={} r={} zeta={} channel={spec}",
        params.n, params.t, params.r, params.zeta
    );
    println!("  majority agreement      = {agree:.4}");
    println!("  piling-up at that bias  = {:.4}", expected_unsat_fraction(params.t, 1.0 - agree));
    println!("  measured unsat fraction = {unsat:.4} (sd {sd:.4})");
    println!("  detection threshold     = {threshold:.4}  margin = {:.1} sd", (threshold - unsat) / sd.max(1e-9));
    println!("  soundness exponent 2rz^2 = {:.1}", 2.0 * params.r as f64 * params.zeta * params.zeta);
}

fn main() {
    // Unit-test scale: embedding p̂ ∈ [0.45, 0.55] plus BDC_0.1.
    report(
        "unit",
        &PrcParams { n: 256, g: 24, t: 1, r: 240, eta: 0.0, zeta: 0.2 },
        513,
        Some(0.45),
        "bdc:0.1",
    );
    // Acceptance: deletion PRC under BDC_0.3 ∘ BSC_0.05 (no embedding).
    report(
        "prc-del",
        &PrcParams { n: 1024, g: 48, t: 1, r: 973, eta: 0.0, zeta: 0.1 },
        8193,
        None,
        "bdc:0.3|bsc:0.05",
    );
    // Acceptance: deletion watermark under BDC_0.2 ∘ BSC_0.05 with the
    // constant-bias embedding model p̂ ∈ [0.45, 0.55].
    report(
        "wm-del",
        &PrcParams { n: 1024, g: 48, t: 1, r: 973, eta: 0.0, zeta: 0.1 },
        4097,
        Some(0.45),
        "bdc:0.2|bsc:0.05",
    );
}
