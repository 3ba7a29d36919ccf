//! Text serialization for every key kind.
//!
//! Format: a `prc-key v1` magic line, `name: value` header lines, then
//! named sections. `P:` holds one comma-separated index line per parity
//! row, `G:` one lowercase-hex line per generator column, `z:` a single
//! hex line, `pads:` one hex line per pad, `pi:` a permutation's forward
//! map on one comma-separated line, and `sig:` opaque hex key material.
//! A section name may repeat (the constant-rate kind has two
//! permutations); the loader consumes sections in order. Hex packs bits
//! per [`BitVec::to_hex`], so `load(save(k))` reproduces `k` bit-exactly.

use prc::attr::{AttrPublicKey, AttrSecretKey, MacScheme, SignKey, VerifyKey};
use prc::constrate::ConstRateKey;
use prc::ecc::{Ecc, RepetitionEcc};
use prc::f2::{BitVec, DenseMatrix, Permutation, SparseMatrix, SparseRow};
use prc::majority::{DeletionInner, DeletionKey};
use prc::multibit::MultiBitKey;
use prc::prg::ShaPrg;
use prc::stego::{StegoCode, StegoKey};
use prc::watermark::{WatermarkKey, WmCode};
use prc::zero::{PrcParams, ZeroBitPublicKey, ZeroBitSecretKey};
use thiserror::Error;

const MAGIC: &str = "prc-key v1";

#[derive(Debug, Error)]
pub enum KeyfileError {
    #[error("missing or wrong magic line (expected {MAGIC:?})")]
    BadMagic,
    #[error("unknown key kind {0:?}")]
    UnknownKind(String),
    #[error("missing header field {0:?}")]
    MissingField(&'static str),
    #[error("bad value for {field}: {value:?}")]
    BadValue { field: &'static str, value: String },
    #[error("missing section {0:?}")]
    MissingSection(&'static str),
    #[error("section {section:?}: expected {expected} lines, found {found}")]
    SectionLength { section: &'static str, expected: usize, found: usize },
    #[error("malformed line {0:?}")]
    BadLine(String),
    #[error(transparent)]
    F2(#[from] prc::f2::F2Error),
    #[error(transparent)]
    Zero(#[from] prc::zero::ZeroError),
    #[error(transparent)]
    Ecc(#[from] prc::ecc::EccError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Every key the CLI can hold. Secret and public halves travel together;
/// this is a desk tool, not a deployment format.
#[derive(Clone, Debug)]
pub enum Key {
    Zero { sk: ZeroBitSecretKey, pk: ZeroBitPublicKey },
    Multi(MultiBitKey),
    ConstRate(ConstRateKey<RepetitionEcc, ShaPrg>),
    Deletion(DeletionKey),
    Watermark(WatermarkKey),
    Attribution { pk: AttrPublicKey<MacScheme>, sk: AttrSecretKey },
    Stego(StegoKey),
}

impl Key {
    pub fn kind(&self) -> &'static str {
        match self {
            Key::Zero { .. } => "zero",
            Key::Multi(_) => "multi",
            Key::ConstRate(_) => "constrate",
            Key::Deletion(_) => "deletion",
            Key::Watermark(_) => "watermark",
            Key::Attribution { .. } => "attribution",
            Key::Stego(_) => "stego",
        }
    }
}

// --- saving ---------------------------------------------------------------

struct Writer {
    out: String,
}

impl Writer {
    fn new(kind: &str) -> Self {
        Writer { out: format!("{MAGIC}\nkind: {kind}\n") }
    }

    fn field(&mut self, name: &str, value: impl std::fmt::Display) {
        self.out.push_str(&format!("{name}: {value}\n"));
    }

    fn section(&mut self, name: &str, lines: impl IntoIterator<Item = String>) {
        self.out.push_str(name);
        self.out.push_str(":\n");
        for line in lines {
            self.out.push_str(&line);
            self.out.push('\n');
        }
    }
}

fn zero_fields(w: &mut Writer, params: &PrcParams, kernel_dim: usize) {
    w.field("n", params.n);
    w.field("g", params.g);
    w.field("t", params.t);
    w.field("r", params.r);
    w.field("eta", params.eta);
    w.field("zeta", params.zeta);
    w.field("kernel_dim", kernel_dim);
}

fn zero_sections(w: &mut Writer, sk: &ZeroBitSecretKey, pk: &ZeroBitPublicKey) {
    w.section(
        "P",
        sk.p.rows().iter().map(|row| {
            row.indices().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        }),
    );
    w.section("G", pk.g.columns().iter().map(BitVec::to_hex));
    w.section("z", [sk.z.to_hex()]);
}

fn perm_section(w: &mut Writer, pi: &Permutation) {
    let line = pi.forward_map().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    w.section("pi", [line]);
}

fn multi_body(w: &mut Writer, key: &MultiBitKey) {
    zero_fields(w, &key.inner_sk.params, key.inner_pk.kernel_dim);
    w.field("ell", key.ell);
}

fn multi_sections(w: &mut Writer, key: &MultiBitKey) {
    zero_sections(w, &key.inner_sk, &key.inner_pk);
    perm_section(w, &key.pi);
}

pub fn save(key: &Key) -> String {
    let mut w = Writer::new(key.kind());
    match key {
        Key::Zero { sk, pk } => {
            zero_fields(&mut w, &sk.params, pk.kernel_dim);
            zero_sections(&mut w, sk, pk);
        }
        Key::Multi(k) => {
            multi_body(&mut w, k);
            multi_sections(&mut w, k);
        }
        Key::ConstRate(k) => {
            multi_body(&mut w, &k.inner);
            w.field("lambda", k.lambda);
            w.field("ecc_k", k.ecc.message_len());
            w.field("ecc_t", k.ecc.repetitions());
            multi_sections(&mut w, &k.inner);
            perm_section(&mut w, &k.pi); // outer permutation, second pi
        }
        Key::Deletion(k) => {
            match &k.inner {
                DeletionInner::Zero { sk, pk } => {
                    zero_fields(&mut w, &sk.params, pk.kernel_dim);
                    w.field("inner", "zero");
                    w.field("m", k.m);
                    zero_sections(&mut w, sk, pk);
                }
                DeletionInner::Multi(mk) => {
                    multi_body(&mut w, mk);
                    w.field("inner", "multi");
                    w.field("m", k.m);
                    multi_sections(&mut w, mk);
                }
            };
        }
        Key::Watermark(k) => {
            let (sk, pk, variant, m) = match &k.code {
                WmCode::Plain { sk, pk } => (sk, pk, "plain", None),
                WmCode::Deletion { sk, pk, m } => (sk, pk, "deletion", Some(*m)),
            };
            zero_fields(&mut w, &sk.params, pk.kernel_dim);
            w.field("variant", variant);
            if let Some(m) = m {
                w.field("m", m);
            }
            w.field("lstar", k.lstar);
            zero_sections(&mut w, sk, pk);
            w.section("pads", k.pads.iter().map(BitVec::to_hex));
        }
        Key::Attribution { pk, sk } => {
            multi_body(&mut w, &pk.prc);
            w.field("lstar", pk.lstar);
            w.field("tag_bits", pk.scheme.tag_bits);
            multi_sections(&mut w, &pk.prc);
            w.section("pads", pk.pads.iter().map(BitVec::to_hex));
            w.section("sig", [hex::encode(&sk.sig_sk.0), hex::encode(&pk.sig_vk.0)]);
        }
        Key::Stego(k) => {
            match &k.code {
                StegoCode::Multi(mk) => {
                    multi_body(&mut w, mk);
                    w.field("code", "multi");
                    w.field("kappa", k.kappa);
                    multi_sections(&mut w, mk);
                }
                StegoCode::ConstRate(ck) => {
                    multi_body(&mut w, &ck.inner);
                    w.field("code", "constrate");
                    w.field("kappa", k.kappa);
                    w.field("lambda", ck.lambda);
                    w.field("ecc_k", ck.ecc.message_len());
                    w.field("ecc_t", ck.ecc.repetitions());
                    multi_sections(&mut w, &ck.inner);
                    perm_section(&mut w, &ck.pi);
                }
            };
        }
    }
    w.out
}

// --- loading --------------------------------------------------------------

struct Raw {
    header: Vec<(String, String)>,
    sections: Vec<(String, Vec<String>)>,
}

impl Raw {
    fn parse(text: &str) -> Result<Raw, KeyfileError> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(MAGIC) {
            return Err(KeyfileError::BadMagic);
        }
        let mut header = Vec::new();
        let mut sections: Vec<(String, Vec<String>)> = Vec::new();
        for line in lines {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_suffix(':') {
                // Bare `name:` opens a section.
                sections.push((name.to_string(), Vec::new()));
            } else if let Some((name, value)) = line.split_once(':') {
                if !sections.is_empty() {
                    return Err(KeyfileError::BadLine(line.to_string()));
                }
                header.push((name.trim().to_string(), value.trim().to_string()));
            } else if let Some((_, body)) = sections.last_mut() {
                body.push(line.to_string());
            } else {
                return Err(KeyfileError::BadLine(line.to_string()));
            }
        }
        Ok(Raw { header, sections })
    }

    fn str_field(&self, name: &'static str) -> Result<&str, KeyfileError> {
        self.header
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
            .ok_or(KeyfileError::MissingField(name))
    }

    fn num<T: std::str::FromStr>(&self, name: &'static str) -> Result<T, KeyfileError> {
        let v = self.str_field(name)?;
        v.parse().map_err(|_| KeyfileError::BadValue { field: name, value: v.to_string() })
    }

    /// Takes the next unconsumed section, which must be named `name`.
    fn take_section(
        &mut self,
        cursor: &mut usize,
        name: &'static str,
    ) -> Result<Vec<String>, KeyfileError> {
        let Some((found, body)) = self.sections.get(*cursor) else {
            return Err(KeyfileError::MissingSection(name));
        };
        if found != name {
            return Err(KeyfileError::MissingSection(name));
        }
        *cursor += 1;
        Ok(body.clone())
    }
}

fn parse_indices(line: &str) -> Result<Vec<usize>, KeyfileError> {
    line.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse().map_err(|_| KeyfileError::BadLine(line.to_string())))
        .collect()
}

fn load_params(raw: &Raw) -> Result<PrcParams, KeyfileError> {
    Ok(PrcParams {
        n: raw.num("n")?,
        g: raw.num("g")?,
        t: raw.num("t")?,
        r: raw.num("r")?,
        eta: raw.num("eta")?,
        zeta: raw.num("zeta")?,
    })
}

fn load_zero(
    raw: &mut Raw,
    cursor: &mut usize,
) -> Result<(ZeroBitSecretKey, ZeroBitPublicKey), KeyfileError> {
    let params = load_params(raw)?;
    let kernel_dim: usize = raw.num("kernel_dim")?;

    let p_lines = raw.take_section(cursor, "P")?;
    if p_lines.len() != params.r {
        return Err(KeyfileError::SectionLength {
            section: "P",
            expected: params.r,
            found: p_lines.len(),
        });
    }
    let rows = p_lines
        .iter()
        .map(|line| Ok(SparseRow::new(params.n, parse_indices(line)?)?))
        .collect::<Result<Vec<_>, KeyfileError>>()?;
    let p = SparseMatrix::new(params.n, rows)?;

    let g_lines = raw.take_section(cursor, "G")?;
    if g_lines.len() != params.g {
        return Err(KeyfileError::SectionLength {
            section: "G",
            expected: params.g,
            found: g_lines.len(),
        });
    }
    let columns = g_lines
        .iter()
        .map(|line| Ok(BitVec::from_hex(line, params.n)?))
        .collect::<Result<Vec<_>, KeyfileError>>()?;
    let g = DenseMatrix::from_columns(params.n, columns)?;

    let z_lines = raw.take_section(cursor, "z")?;
    if z_lines.len() != 1 {
        return Err(KeyfileError::SectionLength {
            section: "z",
            expected: 1,
            found: z_lines.len(),
        });
    }
    let z = BitVec::from_hex(&z_lines[0], params.n)?;

    let sk = ZeroBitSecretKey::new(p, z.clone(), params)?;
    let pk = ZeroBitPublicKey { g, z, params, kernel_dim };
    Ok((sk, pk))
}

fn load_perm(raw: &mut Raw, cursor: &mut usize) -> Result<Permutation, KeyfileError> {
    let lines = raw.take_section(cursor, "pi")?;
    if lines.len() != 1 {
        return Err(KeyfileError::SectionLength {
            section: "pi",
            expected: 1,
            found: lines.len(),
        });
    }
    let forward = parse_indices(&lines[0])?.into_iter().map(|i| i as u32).collect();
    Ok(Permutation::from_forward(forward)?)
}

fn load_multi(raw: &mut Raw, cursor: &mut usize) -> Result<MultiBitKey, KeyfileError> {
    let ell: usize = raw.num("ell")?;
    let (inner_sk, inner_pk) = load_zero(raw, cursor)?;
    let pi = load_perm(raw, cursor)?;
    Ok(MultiBitKey { inner_sk, inner_pk, ell, pi })
}

fn load_pads(
    raw: &mut Raw,
    cursor: &mut usize,
    pad_len: usize,
) -> Result<Vec<BitVec>, KeyfileError> {
    raw.take_section(cursor, "pads")?
        .iter()
        .map(|line| Ok(BitVec::from_hex(line, pad_len)?))
        .collect()
}

fn load_constrate(
    raw: &mut Raw,
    cursor: &mut usize,
) -> Result<ConstRateKey<RepetitionEcc, ShaPrg>, KeyfileError> {
    let lambda: usize = raw.num("lambda")?;
    let ecc_k: usize = raw.num("ecc_k")?;
    let ecc_t: usize = raw.num("ecc_t")?;
    let inner = load_multi(raw, cursor)?;
    let pi = load_perm(raw, cursor)?;
    Ok(ConstRateKey { inner, ecc: RepetitionEcc::new(ecc_k, ecc_t)?, prg: ShaPrg, pi, lambda })
}

pub fn load(text: &str) -> Result<Key, KeyfileError> {
    let mut raw = Raw::parse(text)?;
    let kind = raw.str_field("kind")?.to_string();
    let mut cursor = 0usize;
    match kind.as_str() {
        "zero" => {
            let (sk, pk) = load_zero(&mut raw, &mut cursor)?;
            Ok(Key::Zero { sk, pk })
        }
        "multi" => Ok(Key::Multi(load_multi(&mut raw, &mut cursor)?)),
        "constrate" => Ok(Key::ConstRate(load_constrate(&mut raw, &mut cursor)?)),
        "deletion" => {
            let m: usize = raw.num("m")?;
            let inner = match raw.str_field("inner")? {
                "zero" => {
                    let (sk, pk) = load_zero(&mut raw, &mut cursor)?;
                    DeletionInner::Zero { sk, pk }
                }
                "multi" => DeletionInner::Multi(load_multi(&mut raw, &mut cursor)?),
                other => {
                    return Err(KeyfileError::BadValue {
                        field: "inner",
                        value: other.to_string(),
                    })
                }
            };
            Ok(Key::Deletion(DeletionKey { inner, m }))
        }
        "watermark" => {
            let variant = raw.str_field("variant")?.to_string();
            let lstar: usize = raw.num("lstar")?;
            let (sk, pk) = load_zero(&mut raw, &mut cursor)?;
            let inner_n = sk.params.n;
            let code = match variant.as_str() {
                "plain" => WmCode::Plain { sk, pk },
                "deletion" => WmCode::Deletion { sk, pk, m: raw.num("m")? },
                other => {
                    return Err(KeyfileError::BadValue {
                        field: "variant",
                        value: other.to_string(),
                    })
                }
            };
            let pads = load_pads(&mut raw, &mut cursor, inner_n)?;
            Ok(Key::Watermark(WatermarkKey { code, pads, lstar }))
        }
        "attribution" => {
            let lstar: usize = raw.num("lstar")?;
            let tag_bits: usize = raw.num("tag_bits")?;
            let prc = load_multi(&mut raw, &mut cursor)?;
            let pads = load_pads(&mut raw, &mut cursor, prc.block_len())?;
            let sig = raw.take_section(&mut cursor, "sig")?;
            if sig.len() != 2 {
                return Err(KeyfileError::SectionLength {
                    section: "sig",
                    expected: 2,
                    found: sig.len(),
                });
            }
            let decode_hex = |s: &str| {
                hex::decode(s)
                    .map_err(|_| KeyfileError::BadValue { field: "sig", value: s.to_string() })
            };
            let sig_sk = SignKey(decode_hex(&sig[0])?);
            let sig_vk = VerifyKey(decode_hex(&sig[1])?);
            Ok(Key::Attribution {
                pk: AttrPublicKey { prc, scheme: MacScheme { tag_bits }, sig_vk, pads, lstar },
                sk: AttrSecretKey { sig_sk },
            })
        }
        "stego" => {
            let kappa: usize = raw.num("kappa")?;
            let code = match raw.str_field("code")? {
                "multi" => StegoCode::Multi(load_multi(&mut raw, &mut cursor)?),
                "constrate" => StegoCode::ConstRate(load_constrate(&mut raw, &mut cursor)?),
                other => {
                    return Err(KeyfileError::BadValue { field: "code", value: other.to_string() })
                }
            };
            Ok(Key::Stego(StegoKey { code, kappa }))
        }
        other => Err(KeyfileError::UnknownKind(other.to_string())),
    }
}

pub fn save_to(path: &std::path::Path, key: &Key) -> Result<(), KeyfileError> {
    Ok(std::fs::write(path, save(key))?)
}

pub fn load_from(path: &std::path::Path) -> Result<Key, KeyfileError> {
    load(&std::fs::read_to_string(path)?)
}

// --- codeword files -------------------------------------------------------

/// One bit string per line as `bitlen:hex`; the explicit length keeps
/// non-nibble-aligned strings (deletion-channel outputs) exact.
pub fn format_bits(x: &BitVec) -> String {
    format!("{}:{}", x.len(), x.to_hex())
}

pub fn parse_bits(line: &str) -> Result<BitVec, KeyfileError> {
    let (len, hex) =
        line.trim().split_once(':').ok_or_else(|| KeyfileError::BadLine(line.to_string()))?;
    let len: usize =
        len.parse().map_err(|_| KeyfileError::BadLine(line.to_string()))?;
    Ok(BitVec::from_hex(hex, len)?)
}

pub fn write_bits_file(path: &std::path::Path, xs: &[BitVec]) -> Result<(), KeyfileError> {
    let body: String = xs.iter().map(|x| format_bits(x) + "\n").collect();
    Ok(std::fs::write(path, body)?)
}

pub fn read_bits_file(path: &std::path::Path) -> Result<Vec<BitVec>, KeyfileError> {
    std::fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_bits)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use prc::attr::attr_setup;
    use prc::constrate::constrate_keygen;
    use prc::majority::{deletion_keygen, deletion_keygen_multi};
    use prc::multibit::multibit_keygen;
    use prc::rng::RandomSource;
    use prc::stego::StegoKey;
    use prc::watermark::{wm_setup, wm_setup_deletion};
    use prc::zero;

    fn small_params() -> PrcParams {
        PrcParams { n: 64, g: 8, t: 2, r: 40, eta: 0.05, zeta: 0.2 }
    }

    fn round_trip(key: &Key) {
        let text = save(key);
        let back = load(&text).expect("load(save(k))");
        assert_eq!(text, save(&back), "round trip must be bit-exact");
    }

    #[test]
    fn zero_round_trip() {
        let mut rng = RandomSource::from_u64(41);
        let (sk, pk) = zero::keygen(&small_params(), &mut rng).unwrap();
        round_trip(&Key::Zero { sk, pk });
    }

    #[test]
    fn multi_round_trip() {
        let mut rng = RandomSource::from_u64(42);
        let key = multibit_keygen(4, &small_params(), &mut rng).unwrap();
        round_trip(&Key::Multi(key));
    }

    #[test]
    fn constrate_round_trip() {
        let mut rng = RandomSource::from_u64(43);
        let key = constrate_keygen(
            8,
            &small_params(),
            RepetitionEcc::new(16, 3).unwrap(),
            ShaPrg,
            &mut rng,
        )
        .unwrap();
        round_trip(&Key::ConstRate(key));
    }

    #[test]
    fn deletion_round_trips_both_inners() {
        let mut rng = RandomSource::from_u64(44);
        let key = deletion_keygen(&small_params(), 5, &mut rng).unwrap();
        round_trip(&Key::Deletion(key));
        let key = deletion_keygen_multi(3, &small_params(), 5, &mut rng).unwrap();
        round_trip(&Key::Deletion(key));
    }

    #[test]
    fn watermark_round_trips_both_variants() {
        let mut rng = RandomSource::from_u64(45);
        let key = wm_setup(&small_params(), 200, &mut rng).unwrap();
        round_trip(&Key::Watermark(key));
        let key = wm_setup_deletion(&small_params(), 5, 700, &mut rng).unwrap();
        round_trip(&Key::Watermark(key));
    }

    #[test]
    fn attribution_round_trip() {
        let mut rng = RandomSource::from_u64(46);
        let (pk, sk) =
            attr_setup(&small_params(), 16, 64 * 17 * 2, MacScheme { tag_bits: 16 }, &mut rng)
                .unwrap();
        round_trip(&Key::Attribution { pk, sk });
    }

    #[test]
    fn stego_round_trip() {
        let mut rng = RandomSource::from_u64(47);
        let code = StegoCode::Multi(multibit_keygen(4, &small_params(), &mut rng).unwrap());
        round_trip(&Key::Stego(StegoKey { code, kappa: 8 }));
    }

    #[test]
    fn unknown_kind_rejected() {
        let mut rng = RandomSource::from_u64(48);
        let (sk, pk) = zero::keygen(&small_params(), &mut rng).unwrap();
        let text = save(&Key::Zero { sk, pk }).replace("kind: zero", "kind: turbo");
        assert!(matches!(load(&text), Err(KeyfileError::UnknownKind(k)) if k == "turbo"));
    }

    #[test]
    fn bad_magic_rejected() {
        assert!(matches!(load("prc-key v2\nkind: zero\n"), Err(KeyfileError::BadMagic)));
    }

    #[test]
    fn bits_line_round_trip_odd_length() {
        let mut rng = RandomSource::from_u64(49);
        for len in [1usize, 7, 63, 64, 65, 1000] {
            let x = BitVec::random(len, &mut rng);
            assert_eq!(parse_bits(&format_bits(&x)).unwrap(), x);
        }
    }
}
