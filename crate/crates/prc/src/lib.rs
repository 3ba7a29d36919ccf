//! Pseudorandom error-correcting codes (PRCs) over GF(2).
//!
//! The crate is layered bottom-up:
//!
//! - [`f2`]: bit-packed GF(2) linear algebra and permutations.
//! - [`zero`]: the zero-bit LDPC PRC with its parameter presets.
//! - [`channel`]: substitution / deletion / bounded-adversary channels.
//! - [`multibit`], [`constrate`], [`majority`], [`permuted`]: the rate and
//!   robustness boosting transforms.
//! - [`watermark`], [`attr`], [`stego`]: the applications — language-model
//!   watermarking, public attribution, and stateless steganography.
//! - [`stats`]: the statistical verification harness.

pub mod f2;
pub mod rng;

pub mod channel;
pub mod zero;

pub mod attr;
pub mod constrate;
pub mod ecc;
pub mod majority;
pub mod multibit;
pub mod permuted;
pub mod prg;
pub mod scan;
pub mod stats;
pub mod stego;
pub mod watermark;

