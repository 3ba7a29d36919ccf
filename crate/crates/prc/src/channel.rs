//! Corruption channels: binary symmetric, binary deletion, exact-weight
//! adversarial substitution, and composition.

use crate::f2::BitVec;
use crate::rng::RandomSource;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("channel is not length-preserving (contains a deletion channel)")]
    NotLengthPreserving,
    #[error("malformed channel spec: {0}")]
    BadSpec(String),
}

/// Placement strategy for the bounded adversary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdvStrategy {
    /// Uniform subset of exactly ⌊p·len⌋ positions.
    RandomSubset,
    /// Positions 0..⌊p·len⌋−1 — a worst-case burst that motivates the
    /// dispersing permutation of the multi-bit construction.
    PrefixBurst,
}

/// A composable corruption description.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelSpec {
    /// Flip each bit independently with probability p.
    Bsc(f64),
    /// Delete each bit independently with probability q (output shorter).
    Bdc(f64),
    /// Flip exactly ⌊p·len⌋ distinct positions.
    AdvBounded(f64, AdvStrategy),
    /// Apply `inner` first, then `outer`.
    Compose(Box<ChannelSpec>, Box<ChannelSpec>),
}

impl ChannelSpec {
    pub fn compose(outer: ChannelSpec, inner: ChannelSpec) -> ChannelSpec {
        ChannelSpec::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn is_length_preserving(&self) -> bool {
        match self {
            ChannelSpec::Bsc(_) | ChannelSpec::AdvBounded(..) => true,
            ChannelSpec::Bdc(_) => false,
            ChannelSpec::Compose(outer, inner) => {
                outer.is_length_preserving() && inner.is_length_preserving()
            }
        }
    }

    /// Applies the channel to `x`.
    pub fn apply(&self, x: &BitVec, rng: &mut RandomSource) -> BitVec {
        match self {
            ChannelSpec::Bsc(p) => {
                let mut out = x.clone();
                if *p > 0.0 {
                    let e = BitVec::bernoulli(x.len(), *p, rng);
                    out.xor_in_place(&e).expect("same length");
                }
                out
            }
            ChannelSpec::Bdc(q) => {
                let mut out = BitVec::zeros(0);
                for b in x.iter() {
                    if !rng.bernoulli(*q) {
                        out.push(b);
                    }
                }
                out
            }
            ChannelSpec::AdvBounded(p, strategy) => {
                let k = (p * x.len() as f64).floor() as usize;
                let mut out = x.clone();
                match strategy {
                    AdvStrategy::PrefixBurst => {
                        for i in 0..k {
                            out.flip(i);
                        }
                    }
                    AdvStrategy::RandomSubset => {
                        if k > 0 {
                            let row = crate::f2::sample_sparse_row(x.len(), k, rng)
                                .expect("k <= len by construction");
                            for &i in row.indices() {
                                out.flip(i);
                            }
                        }
                    }
                }
                out
            }
            ChannelSpec::Compose(outer, inner) => {
                let mid = inner.apply(x, rng);
                outer.apply(&mid, rng)
            }
        }
    }

    /// Parses the CLI grammar, e.g. `bsc:0.1`, `adv:0.1:subset`, and
    /// pipelines like `bsc:0.1|bdc:0.3` (rightmost applied first).
    pub fn parse(s: &str) -> Result<ChannelSpec, ChannelError> {
        let mut spec: Option<ChannelSpec> = None;
        // Rightmost stage applies first; fold left-to-right as outer-of.
        for stage in s.split('|').rev() {
            let stage = Self::parse_stage(stage.trim())?;
            spec = Some(match spec {
                None => stage,
                Some(inner) => ChannelSpec::compose(stage, inner),
            });
        }
        spec.ok_or_else(|| ChannelError::BadSpec("empty spec".into()))
    }

    fn parse_stage(s: &str) -> Result<ChannelSpec, ChannelError> {
        let parts: Vec<&str> = s.split(':').collect();
        let rate = |v: &str| -> Result<f64, ChannelError> {
            let p: f64 =
                v.parse().map_err(|_| ChannelError::BadSpec(format!("bad rate {v:?}")))?;
            if !(0.0..1.0).contains(&p) {
                return Err(ChannelError::BadSpec(format!("rate {p} out of [0, 1)")));
            }
            Ok(p)
        };
        match parts.as_slice() {
            ["bsc", p] => Ok(ChannelSpec::Bsc(rate(p)?)),
            ["bdc", q] => Ok(ChannelSpec::Bdc(rate(q)?)),
            ["adv", p, "subset"] => Ok(ChannelSpec::AdvBounded(rate(p)?, AdvStrategy::RandomSubset)),
            ["adv", p, "prefix"] => Ok(ChannelSpec::AdvBounded(rate(p)?, AdvStrategy::PrefixBurst)),
            _ => Err(ChannelError::BadSpec(format!("unrecognized stage {s:?}"))),
        }
    }
}

impl std::fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelSpec::Bsc(p) => write!(f, "bsc:{p}"),
            ChannelSpec::Bdc(q) => write!(f, "bdc:{q}"),
            ChannelSpec::AdvBounded(p, AdvStrategy::RandomSubset) => write!(f, "adv:{p}:subset"),
            ChannelSpec::AdvBounded(p, AdvStrategy::PrefixBurst) => write!(f, "adv:{p}:prefix"),
            ChannelSpec::Compose(outer, inner) => write!(f, "{outer}|{inner}"),
        }
    }
}

/// Empirical check of the p-bounded property on uniform inputs.
#[derive(Clone, Copy, Debug)]
pub struct BoundednessReport {
    pub trials: usize,
    pub violations: usize,
    pub violation_fraction: f64,
    pub max_flip_weight: usize,
}

/// Measures how often `ch` flips more than a p fraction of a uniform
/// length-n input over the given number of trials.
pub fn is_p_bounded_witness(
    ch: &ChannelSpec,
    p: f64,
    n: usize,
    trials: usize,
    rng: &mut RandomSource,
) -> Result<BoundednessReport, ChannelError> {
    if !ch.is_length_preserving() {
        return Err(ChannelError::NotLengthPreserving);
    }
    let bound = (p * n as f64) as usize;
    let mut violations = 0;
    let mut max_flip_weight = 0;
    for _ in 0..trials {
        let x = BitVec::random(n, rng);
        let y = ch.apply(&x, rng);
        let w = x.xor(&y).expect("length-preserving").hamming_weight();
        max_flip_weight = max_flip_weight.max(w);
        if w > bound {
            violations += 1;
        }
    }
    Ok(BoundednessReport {
        trials,
        violations,
        violation_fraction: violations as f64 / trials.max(1) as f64,
        max_flip_weight,
    })
}
