//! `prc` — command-line frontend for the PRC toolkit.
//!
//! Exit codes: 0 success (and positive verdicts), 1 negative verdict
//! (⊥ / not detected / not verified / battery failure), 2 usage or
//! input-format error, 3 internal error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use prc::attr::{attr_generate, attr_setup, attr_text, MacScheme};
use prc::channel::ChannelSpec;
use prc::constrate::{constrate_decode, constrate_encode, constrate_keygen};
use prc::ecc::RepetitionEcc;
use prc::f2::BitVec;
use prc::majority::{deletion_decode, deletion_encode, deletion_keygen, deletion_keygen_multi, DeletionInner};
use prc::multibit::{multibit_decode, multibit_encode, multibit_keygen};
use prc::prg::ShaPrg;
use prc::rng::RandomSource;
use prc::stats::{battery, sparse_parity_attack};
use prc::stego::{steg_decode, steg_encode, StegoCode, StegoKey};
use prc::watermark::{wm_detect, wm_detect_fast, wm_generate, wm_setup, wm_setup_deletion};
use prc::zero::{self, preset_lpn, preset_xor, PrcParams, Verdict};
use prc_cli::keyfile::{self, Key};
use prc_cli::{specs, suite};

#[derive(Parser)]
#[command(name = "prc", version, about = "Pseudorandom error-correcting code toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct KeygenArgs {
    /// zero | multi | constrate | deletion | watermark | attribution | stego
    #[arg(long)]
    kind: String,
    /// lpn | xor; omit to give --g/--t/--r/--zeta explicitly
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    zeta: Option<f64>,
    /// Advantage bound for the xor preset
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Sparsity scale for the lpn preset (t ≈ scale·log₂ n)
    #[arg(long, default_value_t = 1.0 / 3.0)]
    sparsity_scale: f64,
    /// Message bits (multi, attribution, stego multi)
    #[arg(long)]
    ell: Option<usize>,
    /// Seed bits (constrate, stego constrate)
    #[arg(long)]
    lambda: Option<usize>,
    /// Majority width (deletion, watermark deletion variant)
    #[arg(long)]
    m: Option<usize>,
    /// Detection horizon in tokens (watermark, attribution)
    #[arg(long)]
    lstar: Option<usize>,
    /// Rejection cap (stego)
    #[arg(long)]
    kappa: Option<usize>,
    /// Signature tag bits (attribution)
    #[arg(long, default_value_t = 64)]
    tag_bits: usize,
    /// ECC message length (constrate)
    #[arg(long)]
    ecc_k: Option<usize>,
    /// ECC repetitions, odd (constrate)
    #[arg(long)]
    ecc_t: Option<usize>,
    /// plain | deletion (watermark)
    #[arg(long, default_value = "plain")]
    variant: String,
    /// zero | multi (deletion inner code)
    #[arg(long, default_value = "zero")]
    inner: String,
    /// multi | constrate (stego embedded code)
    #[arg(long, default_value = "multi")]
    code: String,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key of any kind and write it as a text key file
    Keygen(KeygenArgs),
    /// Encode codewords with a zero/multi/constrate/deletion key
    Encode {
        #[arg(long)]
        key: PathBuf,
        /// Message as hex (kinds with a message space)
        #[arg(long)]
        message: Option<String>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode codeword lines and report verdicts
    Decode {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Apply a corruption channel to codeword lines
    Channel {
        /// e.g. "bsc:0.1", "bdc:0.3|bsc:0.05", "adv:0.1:subset"
        #[arg(long)]
        spec: String,
        #[arg(long)]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Watermarked generation and detection
    Watermark {
        #[command(subcommand)]
        cmd: WatermarkCmd,
    },
    /// Attribution generation and checking
    Attr {
        #[command(subcommand)]
        cmd: AttrCmd,
    },
    /// Steganographic embedding and extraction
    Stego {
        #[command(subcommand)]
        cmd: StegoCmd,
    },
    /// Statistical tools and the acceptance suite
    Stats {
        #[command(subcommand)]
        cmd: StatsCmd,
    },
}

#[derive(Subcommand)]
enum WatermarkCmd {
    Gen {
        #[arg(long)]
        key: PathBuf,
        /// const:P | hash:LO:HI[:SEED] | bursty:SPAN[:SEED]
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "")]
        prompt: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Detect {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Use the naive window scan instead of the fast one
        #[arg(long)]
        naive: bool,
    },
}

#[derive(Subcommand)]
enum AttrCmd {
    Gen {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "")]
        prompt: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Check {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum StegoCmd {
    Embed {
        #[arg(long)]
        key: PathBuf,
        /// uniform:K | skew:W1,W2,... | markov:FILE
        #[arg(long)]
        channel: String,
        /// parity | notsym:PIVOT:ALPHA
        #[arg(long)]
        hash: String,
        #[arg(long)]
        message: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Extract {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        hash: String,
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum StatsCmd {
    /// Run the pseudorandomness battery on codeword lines
    Battery {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Brute-force sparse parity search over codeword lines
    Attack {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        t_max: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Run a named suite ("acceptance")
    Suite { name: String },
}

/// Verdict-negative outcomes exit 1; usage/input problems exit 2;
/// anything else that errors exits 3.
enum Failure {
    Negative,
    Usage(String),
    Internal(String),
}

type CmdResult = Result<(), Failure>;

impl From<keyfile::KeyfileError> for Failure {
    fn from(e: keyfile::KeyfileError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<specs::SpecError> for Failure {
    fn from(e: specs::SpecError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cmd: Command) -> CmdResult {
    match cmd {
        Command::Keygen(args) => keygen(args),
        Command::Encode { key, message, count, seed, out } => encode(key, message, count, seed, out),
        Command::Decode { key, input, seed } => decode(key, input, seed),
        Command::Channel { spec, seed, input, out } => channel(spec, seed, input, out),
        Command::Watermark { cmd } => watermark(cmd),
        Command::Attr { cmd } => attr(cmd),
        Command::Stego { cmd } => stego(cmd),
        Command::Stats { cmd } => stats(cmd),
    }
}

fn build_params(a: &KeygenArgs) -> Result<PrcParams, Failure> {
    let params = match a.preset.as_deref() {
        Some("lpn") => preset_lpn(a.n, a.eta, a.sparsity_scale).map_err(internal)?,
        Some("xor") => preset_xor(a.n, a.epsilon, a.eta).map_err(internal)?,
        Some(other) => return Err(Failure::Usage(format!("unknown preset {other:?}"))),
        None => {
            let need = |v: Option<usize>, name: &str| {
                v.ok_or_else(|| Failure::Usage(format!("--{name} required without --preset")))
            };
            PrcParams {
                n: a.n,
                g: need(a.g, "g")?,
                t: need(a.t, "t")?,
                r: need(a.r, "r")?,
                eta: a.eta,
                zeta: a.zeta.ok_or_else(|| {
                    Failure::Usage("--zeta required without --preset".into())
                })?,
            }
        }
    };
    params.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(params)
}

fn keygen(a: KeygenArgs) -> CmdResult {
    let params = build_params(&a)?;
    let mut rng = RandomSource::from_u64(a.seed);
    let need = |v: Option<usize>, name: &str| {
        v.ok_or_else(|| Failure::Usage(format!("--{name} required for this kind")))
    };
    let key = match a.kind.as_str() {
        "zero" => {
            let (sk, pk) = zero::keygen(&params, &mut rng).map_err(internal)?;
            Key::Zero { sk, pk }
        }
        "multi" => Key::Multi(
            multibit_keygen(need(a.ell, "ell")?, &params, &mut rng).map_err(internal)?,
        ),
        "constrate" => Key::ConstRate(
            constrate_keygen(
                need(a.lambda, "lambda")?,
                &params,
                RepetitionEcc::new(need(a.ecc_k, "ecc-k")?, need(a.ecc_t, "ecc-t")?)
                    .map_err(|e| Failure::Usage(e.to_string()))?,
                ShaPrg,
                &mut rng,
            )
            .map_err(internal)?,
        ),
        "deletion" => {
            let m = need(a.m, "m")?;
            let key = match a.inner.as_str() {
                "zero" => deletion_keygen(&params, m, &mut rng),
                "multi" => deletion_keygen_multi(need(a.ell, "ell")?, &params, m, &mut rng),
                other => return Err(Failure::Usage(format!("unknown inner {other:?}"))),
            };
            Key::Deletion(key.map_err(|e| Failure::Usage(e.to_string()))?)
        }
        "watermark" => {
            let lstar = need(a.lstar, "lstar")?;
            let key = match a.variant.as_str() {
                "plain" => wm_setup(&params, lstar, &mut rng),
                "deletion" => wm_setup_deletion(&params, need(a.m, "m")?, lstar, &mut rng),
                other => return Err(Failure::Usage(format!("unknown variant {other:?}"))),
            };
            Key::Watermark(key.map_err(|e| Failure::Usage(e.to_string()))?)
        }
        "attribution" => {
            let (pk, sk) = attr_setup(
                &params,
                need(a.ell, "ell")?,
                need(a.lstar, "lstar")?,
                MacScheme { tag_bits: a.tag_bits },
                &mut rng,
            )
            .map_err(|e| Failure::Usage(e.to_string()))?;
            Key::Attribution { pk, sk }
        }
        "stego" => {
            let code = match a.code.as_str() {
                "multi" => StegoCode::Multi(
                    multibit_keygen(need(a.ell, "ell")?, &params, &mut rng).map_err(internal)?,
                ),
                "constrate" => StegoCode::ConstRate(
                    constrate_keygen(
                        need(a.lambda, "lambda")?,
                        &params,
                        RepetitionEcc::new(need(a.ecc_k, "ecc-k")?, need(a.ecc_t, "ecc-t")?)
                            .map_err(|e| Failure::Usage(e.to_string()))?,
                        ShaPrg,
                        &mut rng,
                    )
                    .map_err(internal)?,
                ),
                other => return Err(Failure::Usage(format!("unknown code {other:?}"))),
            };
            Key::Stego(StegoKey { code, kappa: need(a.kappa, "kappa")? })
        }
        other => return Err(Failure::Usage(format!("unknown kind {other:?}"))),
    };
    keyfile::save_to(&a.out, &key).map_err(internal)?;
    Ok(())
}

fn parse_message(hex: Option<&str>, len: usize) -> Result<BitVec, Failure> {
    let hex = hex.ok_or_else(|| Failure::Usage("--message required for this key kind".into()))?;
    BitVec::from_hex(hex, len)
        .map_err(|e| Failure::Usage(format!("bad message ({len} bits expected): {e}")))
}

fn encode(key: PathBuf, message: Option<String>, count: usize, seed: u64, out: PathBuf) -> CmdResult {
    let key = keyfile::load_from(&key)?;
    let mut rng = RandomSource::from_u64(seed);
    let msg = message.as_deref();
    let mut words = Vec::with_capacity(count);
    for _ in 0..count {
        let x = match &key {
            Key::Zero { pk, .. } => zero::encode(pk, &mut rng),
            Key::Multi(k) => {
                multibit_encode(k, &parse_message(msg, k.ell)?, &mut rng).map_err(internal)?
            }
            Key::ConstRate(k) => {
                constrate_encode(k, &parse_message(msg, k.message_len())?, &mut rng)
                    .map_err(internal)?
            }
            Key::Deletion(k) => {
                let m = match &k.inner {
                    DeletionInner::Zero { .. } => None,
                    DeletionInner::Multi(mk) => Some(parse_message(msg, mk.ell)?),
                };
                deletion_encode(k, m.as_ref(), &mut rng).map_err(internal)?
            }
            _ => {
                return Err(Failure::Usage(format!(
                    "`encode` does not apply to {} keys; use the dedicated subcommand",
                    key.kind()
                )))
            }
        };
        words.push(x);
    }
    keyfile::write_bits_file(&out, &words).map_err(internal)?;
    Ok(())
}

fn decode(key: PathBuf, input: PathBuf, seed: u64) -> CmdResult {
    let key = keyfile::load_from(&key)?;
    let mut rng = RandomSource::from_u64(seed);
    let mut all_positive = true;
    for x in keyfile::read_bits_file(&input)? {
        let line = match &key {
            Key::Zero { sk, .. } => {
                let d = zero::decode(sk, &x).map_err(internal)?;
                all_positive &= d.detected();
                format!(
                    "verdict={:?} unsat={} threshold={}",
                    d.verdict, d.unsat_count, d.threshold
                )
            }
            Key::Multi(k) => {
                let d = multibit_decode(k, &x).map_err(internal)?;
                match d.message {
                    Some(m) => format!("message={}", m.to_hex()),
                    None => {
                        all_positive = false;
                        format!("verdict={:?}", Verdict::Bot)
                    }
                }
            }
            Key::ConstRate(k) => match constrate_decode(k, &x).map_err(internal)? {
                Some(m) => format!("message={}", m.to_hex()),
                None => {
                    all_positive = false;
                    format!("verdict={:?}", Verdict::Bot)
                }
            },
            Key::Deletion(k) => {
                let d = deletion_decode(k, &x, &mut rng).map_err(internal)?;
                all_positive &= d.detected;
                match (d.detected, d.message, d.zero_outcome) {
                    (true, Some(m), _) => format!("detected=true message={}", m.to_hex()),
                    (det, _, Some(z)) => {
                        format!("detected={det} unsat={} threshold={}", z.unsat_count, z.threshold)
                    }
                    (det, _, _) => format!("detected={det}"),
                }
            }
            _ => {
                return Err(Failure::Usage(format!(
                    "`decode` does not apply to {} keys; use the dedicated subcommand",
                    key.kind()
                )))
            }
        };
        println!("{line}");
    }
    if all_positive {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn channel(spec: String, seed: u64, input: PathBuf, out: PathBuf) -> CmdResult {
    let spec = ChannelSpec::parse(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut rng = RandomSource::from_u64(seed);
    let outputs: Vec<BitVec> = keyfile::read_bits_file(&input)?
        .iter()
        .map(|x| spec.apply(x, &mut rng))
        .collect();
    keyfile::write_bits_file(&out, &outputs).map_err(internal)?;
    Ok(())
}

fn load_watermark(path: &PathBuf) -> Result<prc::watermark::WatermarkKey, Failure> {
    match keyfile::load_from(path)? {
        Key::Watermark(k) => Ok(k),
        other => Err(Failure::Usage(format!("expected a watermark key, got {}", other.kind()))),
    }
}

fn watermark(cmd: WatermarkCmd) -> CmdResult {
    match cmd {
        WatermarkCmd::Gen { key, model, prompt, seed, out } => {
            let key = load_watermark(&key)?;
            let model = specs::parse_model(&model)?;
            let mut rng = RandomSource::from_u64(seed);
            let resp = wm_generate(&key, &prompt, model.as_ref(), &mut rng)
                .map_err(internal)?;
            keyfile::write_bits_file(&out, &[resp.tokens]).map_err(internal)?;
            Ok(())
        }
        WatermarkCmd::Detect { key, input, naive } => {
            let key = load_watermark(&key)?;
            let mut any = false;
            for tokens in keyfile::read_bits_file(&input)? {
                let report = if naive {
                    wm_detect(&key, &tokens)
                } else {
                    wm_detect_fast(&key, &tokens)
                }
                .map_err(internal)?;
                any |= report.detected;
                println!(
                    "detected={} window_start={} window_len={} pad={} unsat={} threshold={}",
                    report.detected,
                    report.window_start,
                    report.window_len,
                    report.pad_index,
                    report.unsat_count,
                    report.threshold
                );
            }
            if any {
                Ok(())
            } else {
                Err(Failure::Negative)
            }
        }
    }
}

fn attr(cmd: AttrCmd) -> CmdResult {
    match cmd {
        AttrCmd::Gen { key, model, prompt, seed, out } => {
            let (pk, sk) = match keyfile::load_from(&key)? {
                Key::Attribution { pk, sk } => (pk, sk),
                other => {
                    return Err(Failure::Usage(format!(
                        "expected an attribution key, got {}",
                        other.kind()
                    )))
                }
            };
            let model = specs::parse_model(&model)?;
            let mut rng = RandomSource::from_u64(seed);
            let resp =
                attr_generate(&pk, &sk, &prompt, model.as_ref(), &mut rng).map_err(internal)?;
            keyfile::write_bits_file(&out, &[resp.tokens]).map_err(internal)?;
            Ok(())
        }
        AttrCmd::Check { key, input } => {
            let pk = match keyfile::load_from(&key)? {
                Key::Attribution { pk, .. } => pk,
                other => {
                    return Err(Failure::Usage(format!(
                        "expected an attribution key, got {}",
                        other.kind()
                    )))
                }
            };
            let mut any = false;
            for tokens in keyfile::read_bits_file(&input)? {
                let report = attr_text(&pk, &tokens).map_err(internal)?;
                any |= report.verified;
                println!(
                    "verified={} prefix_len={} window_start={} pad={}",
                    report.verified, report.prefix_len, report.window_start, report.pad_index
                );
            }
            if any {
                Ok(())
            } else {
                Err(Failure::Negative)
            }
        }
    }
}

fn load_stego(path: &PathBuf) -> Result<StegoKey, Failure> {
    match keyfile::load_from(path)? {
        Key::Stego(k) => Ok(k),
        other => Err(Failure::Usage(format!("expected a stego key, got {}", other.kind()))),
    }
}

fn stego(cmd: StegoCmd) -> CmdResult {
    match cmd {
        StegoCmd::Embed { key, channel, hash, message, seed, out } => {
            let key = load_stego(&key)?;
            let channel = specs::parse_covertext(&channel)?;
            let hash = specs::parse_hash(&hash)?;
            let msg = parse_message(Some(&message), key.code.message_len())?;
            let mut rng = RandomSource::from_u64(seed);
            let st = steg_encode(&key, channel.as_ref(), hash.as_ref(), &msg, &[], &mut rng)
                .map_err(internal)?;
            let body: String = st.docs.iter().map(|d| format!("{d}\n")).collect();
            std::fs::write(&out, body).map_err(internal)?;
            eprintln!("embedded_flips={} flip_rate={:.6}", st.embedded_flips, st.flip_rate);
            Ok(())
        }
        StegoCmd::Extract { key, hash, input } => {
            let key = load_stego(&key)?;
            let hash = specs::parse_hash(&hash)?;
            let docs: Vec<u32> = std::fs::read_to_string(&input)
                .map_err(internal)?
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    l.trim().parse().map_err(|_| Failure::Usage(format!("bad document line {l:?}")))
                })
                .collect::<Result<_, _>>()?;
            match steg_decode(&key, hash.as_ref(), &docs).map_err(internal)? {
                Some(m) => {
                    println!("message={}", m.to_hex());
                    Ok(())
                }
                None => {
                    println!("verdict=Bot");
                    Err(Failure::Negative)
                }
            }
        }
    }
}

fn stats(cmd: StatsCmd) -> CmdResult {
    match cmd {
        StatsCmd::Battery { input } => {
            let samples = keyfile::read_bits_file(&input)?;
            let reports = battery(&samples).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut all = true;
            for r in &reports {
                all &= r.pass;
                println!(
                    "test={} statistic={:.4} p_value={:.6} pass={} samples={}",
                    r.name, r.statistic, r.p_value, r.pass, r.samples
                );
            }
            if all {
                Ok(())
            } else {
                Err(Failure::Negative)
            }
        }
        StatsCmd::Attack { input, t_max, budget } => {
            let samples = keyfile::read_bits_file(&input)?;
            match sparse_parity_attack(&samples, t_max, budget)
                .map_err(|e| Failure::Usage(e.to_string()))?
            {
                Some(found) => println!(
                    "found indices={:?} zero_fraction={:.4}",
                    found.indices, found.zero_fraction
                ),
                None => println!("found=none"),
            }
            Ok(())
        }
        StatsCmd::Suite { name } => {
            if name != "acceptance" {
                return Err(Failure::Usage(format!("unknown suite {name:?}")));
            }
            let mut all = true;
            for i in 1..=suite::COUNT {
                let outcome = suite::cached(i);
                all &= outcome.pass;
                println!("{}", outcome.line());
            }
            if all {
                Ok(())
            } else {
                Err(Failure::Negative)
            }
        }
    }
}
