//! Parsers for the small spec languages used on the command line:
//! mock-model specs (`const:0.5`, `hash:0.3:0.7`, `bursty:64`), document
//! hash specs (`parity`, `notsym:0:0.5`), and covertext channel specs
//! (`uniform:4`, `skew:0.5,0.25,0.25`, `markov:FILE`).

use prc::stego::{CovertextChannel, DocHash, MarkovText, NotSymbolHash, ParityHash, SkewedSymbols, UniformSymbols};
use prc::watermark::{BurstyModel, ConstantModel, HashDrivenModel, Model};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed model spec {0:?} (expected const:P | hash:LO:HI[:SEED] | bursty:SPAN[:SEED])")]
    BadModel(String),
    #[error("malformed hash spec {0:?} (expected parity | notsym:PIVOT:ALPHA)")]
    BadHash(String),
    #[error("malformed covertext spec {0:?} (expected uniform:K | skew:W1,W2,... | markov:FILE)")]
    BadCovertext(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Generation length cap for CLI-built models; effective lengths come
/// from the key's L*, so the cap just needs to be out of the way.
const MODEL_CAP: usize = 1 << 26;

pub fn parse_model(spec: &str) -> Result<Box<dyn Model>, SpecError> {
    let bad = || SpecError::BadModel(spec.to_string());
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let int = |s: &str| s.parse::<u64>().map_err(|_| bad());
    match parts.as_slice() {
        ["const", p] => Ok(Box::new(ConstantModel { phat: num(p)?, max_len: MODEL_CAP })),
        ["hash", lo, hi] => Ok(Box::new(HashDrivenModel {
            lo: num(lo)?,
            hi: num(hi)?,
            seed: 0,
            max_len: MODEL_CAP,
        })),
        ["hash", lo, hi, seed] => Ok(Box::new(HashDrivenModel {
            lo: num(lo)?,
            hi: num(hi)?,
            seed: int(seed)?,
            max_len: MODEL_CAP,
        })),
        ["bursty", span] => Ok(Box::new(BurstyModel {
            span: int(span)? as usize,
            seed: 0,
            max_len: MODEL_CAP,
        })),
        ["bursty", span, seed] => Ok(Box::new(BurstyModel {
            span: int(span)? as usize,
            seed: int(seed)?,
            max_len: MODEL_CAP,
        })),
        _ => Err(bad()),
    }
}

pub fn parse_hash(spec: &str) -> Result<Box<dyn DocHash>, SpecError> {
    let bad = || SpecError::BadHash(spec.to_string());
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["parity"] => Ok(Box::new(ParityHash)),
        ["notsym", pivot, alpha] => Ok(Box::new(NotSymbolHash {
            pivot: pivot.parse().map_err(|_| bad())?,
            alpha: alpha.parse().map_err(|_| bad())?,
        })),
        _ => Err(bad()),
    }
}

fn parse_weights(s: &str) -> Option<Vec<f64>> {
    s.split(',').map(|w| w.trim().parse().ok()).collect()
}

/// `markov:FILE` reads one comma-separated probability row per line:
/// the first line is the initial distribution, the rest the transition
/// rows in symbol order.
pub fn parse_covertext(spec: &str) -> Result<Box<dyn CovertextChannel>, SpecError> {
    let bad = || SpecError::BadCovertext(spec.to_string());
    match spec.split_once(':') {
        Some(("uniform", k)) => {
            Ok(Box::new(UniformSymbols { k: k.parse().map_err(|_| bad())? }))
        }
        Some(("skew", weights)) => {
            Ok(Box::new(SkewedSymbols::new(parse_weights(weights).ok_or_else(bad)?)))
        }
        Some(("markov", path)) => {
            let text = std::fs::read_to_string(path)?;
            let mut rows: Vec<Vec<f64>> = Vec::new();
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                rows.push(parse_weights(line).ok_or_else(bad)?);
            }
            if rows.len() < 2 {
                return Err(bad());
            }
            let init = rows.remove(0);
            if rows.len() != init.len() || rows.iter().any(|r| r.len() != init.len()) {
                return Err(bad());
            }
            Ok(Box::new(MarkovText::new(init, rows)))
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_specs_parse() {
        assert!(parse_model("const:0.5").is_ok());
        assert!(parse_model("hash:0.3:0.7").is_ok());
        assert!(parse_model("hash:0.45:0.55:9").is_ok());
        assert!(parse_model("bursty:64").is_ok());
        assert!(parse_model("markov:3").is_err());
        assert!(parse_model("hash:x:y").is_err());
    }

    #[test]
    fn hash_specs_parse() {
        assert!(parse_hash("parity").is_ok());
        assert!(parse_hash("notsym:0:0.5").is_ok());
        assert!(parse_hash("sha").is_err());
    }

    #[test]
    fn covertext_specs_parse() {
        assert!(parse_covertext("uniform:4").is_ok());
        assert!(parse_covertext("skew:0.5,0.25,0.25").is_ok());
        assert!(parse_covertext("zipf:9").is_err());
    }
}
