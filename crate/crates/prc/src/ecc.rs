//! Pluggable error-correcting-code interface with a repetition-code
//! default. Swapping in a stronger code upgrades the constant-rate
//! construction's rate without touching any other module.

use crate::f2::{BitVec, F2Error};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EccError {
    #[error("repetition width must be odd, got {0}")]
    EvenWidth(usize),
    #[error(transparent)]
    F2(#[from] F2Error),
}

/// A fixed-length binary code.
pub trait Ecc {
    fn message_len(&self) -> usize;
    fn block_len(&self) -> usize;
    /// Noiseless invariant: `decode(encode(m)) = Some(m)`.
    fn encode(&self, m: &BitVec) -> Result<BitVec, F2Error>;
    fn decode(&self, c: &BitVec) -> Result<Option<BitVec>, F2Error>;
    fn rate(&self) -> f64 {
        self.message_len() as f64 / self.block_len() as f64
    }
    /// Declared random-substitution rate the code corrects with
    /// per-message failure probability well below 10⁻⁴.
    fn tolerated_rate(&self) -> f64;
}

/// Each message bit repeated `t` times (t odd); majority decode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepetitionEcc {
    k: usize,
    t: usize,
}

impl RepetitionEcc {
    pub fn new(k: usize, t: usize) -> Result<Self, EccError> {
        if t % 2 == 0 {
            return Err(EccError::EvenWidth(t));
        }
        Ok(Self { k, t })
    }

    pub fn repetitions(&self) -> usize {
        self.t
    }
}

/// Pr[Bin(t, p) ≥ ceil(t/2)]: the per-bit majority failure rate.
fn majority_failure(t: usize, p: f64) -> f64 {
    let need = t / 2 + 1;
    let mut total = 0.0;
    // Binomial tail by direct summation; t is small.
    let mut log_c = 0.0; // log C(t, k) built incrementally
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    for k in 0..=t {
        if k >= need {
            total += (log_c + k as f64 * lp + (t - k) as f64 * lq).exp();
        }
        log_c += ((t - k) as f64).ln() - ((k + 1) as f64).ln();
    }
    total
}

impl Ecc for RepetitionEcc {
    fn message_len(&self) -> usize {
        self.k
    }

    fn block_len(&self) -> usize {
        self.k * self.t
    }

    fn encode(&self, m: &BitVec) -> Result<BitVec, F2Error> {
        if m.len() != self.k {
            return Err(F2Error::LengthMismatch { expected: self.k, actual: m.len() });
        }
        let mut out = BitVec::zeros(self.block_len());
        for i in 0..self.k {
            if m.get(i) {
                for j in 0..self.t {
                    out.set(i * self.t + j, true);
                }
            }
        }
        Ok(out)
    }

    fn decode(&self, c: &BitVec) -> Result<Option<BitVec>, F2Error> {
        if c.len() != self.block_len() {
            return Err(F2Error::LengthMismatch { expected: self.block_len(), actual: c.len() });
        }
        let mut m = BitVec::zeros(self.k);
        for i in 0..self.k {
            let ones = c.count_ones_range(i * self.t, (i + 1) * self.t);
            if 2 * ones > self.t {
                m.set(i, true);
            }
        }
        Ok(Some(m))
    }

    fn tolerated_rate(&self) -> f64 {
        // Largest grid rate with per-message failure ≤ 10⁻⁶.
        let mut best = 0.0;
        let mut p = 0.01;
        while p < 0.5 {
            if majority_failure(self.t, p) * self.k as f64 <= 1e-6 {
                best = p;
            }
            p += 0.01;
        }
        best
    }
}
