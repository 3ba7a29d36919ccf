//! The zero-bit public-key LDPC PRC.
//!
//! KeyGen samples a parity-check matrix P of i.i.d. uniform t-sparse rows,
//! a generator G uniform subject to PG = 0, and a one-time pad z. Encode
//! outputs Gu ⊕ z ⊕ e with u uniform and e ← Ber(n, η); Decode counts
//! unsatisfied parity checks of x ⊕ z and detects when fewer than
//! ⌈(1/2 − ζ)·r⌉ fail. Both parameter presets (XOR and LPN regimes) are
//! provided along with the threshold/sparsity helper math.

use crate::f2::{
    sample_kernel_matrix, sample_sparse_row, BitVec, DenseMatrix, F2Error, SparseMatrix, SparseRow,
};
use crate::rng::RandomSource;
use thiserror::Error;

/// Default generator-width constant: g = ⌈c_g · (log₂ n)²⌉.
pub const DEFAULT_CG: f64 = 1.0;
/// Default α for the sparsity cap of [`max_sparsity_for`].
pub const DEFAULT_ALPHA_TARGET: f64 = 0.35;
/// Default scale for t = ⌊scale · log₂ n⌋.
pub const DEFAULT_SPARSITY_SCALE: f64 = 1.0 / 3.0;

/// Retry budget when the sampled P has a trivial kernel.
const DEGENERATE_KERNEL_RETRIES: usize = 16;

#[derive(Debug, Error)]
pub enum ZeroError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("kernel of P is trivial after {DEGENERATE_KERNEL_RETRIES} retries")]
    DegenerateKernel,
    #[error(transparent)]
    F2(#[from] F2Error),
}

/// LDPC-PRC₀ instance parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrcParams {
    /// Code length in bits.
    pub n: usize,
    /// Generator columns (message randomness width).
    pub g: usize,
    /// Parity-row sparsity.
    pub t: usize,
    /// Parity-check rows.
    pub r: usize,
    /// Encode noise rate η ∈ [0, 1/2).
    pub eta: f64,
    /// Decode threshold offset ζ ∈ (0, 1/2).
    pub zeta: f64,
}

impl PrcParams {
    pub fn validate(&self) -> Result<(), ZeroError> {
        if self.n == 0 {
            return Err(ZeroError::BadParams("n must be positive".into()));
        }
        if self.t == 0 || self.t > self.n {
            return Err(ZeroError::BadParams(format!("t={} out of range [1, {}]", self.t, self.n)));
        }
        if self.g == 0 || self.g > self.n {
            return Err(ZeroError::BadParams(format!("g={} out of range [1, {}]", self.g, self.n)));
        }
        if !(0.0..0.5).contains(&self.eta) {
            return Err(ZeroError::BadParams(format!("eta={} out of [0, 1/2)", self.eta)));
        }
        if !(0.0..0.5).contains(&self.zeta) || self.zeta == 0.0 {
            return Err(ZeroError::BadParams(format!("zeta={} out of (0, 1/2)", self.zeta)));
        }
        Ok(())
    }

    /// The decode bound ⌈(1/2 − ζ)·r⌉; detection is the strict comparison
    /// `unsat_count < threshold` so rounding never enlarges the ⊥ region.
    pub fn threshold(&self) -> usize {
        ((0.5 - self.zeta) * self.r as f64).ceil() as usize
    }
}

/// sk = (P, z).
#[derive(Clone, Debug)]
pub struct ZeroBitSecretKey {
    pub p: SparseMatrix,
    pub z: BitVec,
    pub params: PrcParams,
    /// Cached Pz; derivable, kept for the decode hot path.
    pz: BitVec,
}

impl ZeroBitSecretKey {
    pub fn new(p: SparseMatrix, z: BitVec, params: PrcParams) -> Result<Self, ZeroError> {
        if p.n() != params.n || z.len() != params.n {
            return Err(ZeroError::BadParams("P/z dimensions disagree with params".into()));
        }
        let pz = p.syndrome(&z)?;
        Ok(Self { p, z, params, pz })
    }

    pub fn pz(&self) -> &BitVec {
        &self.pz
    }
}

/// pk = (G, z).
#[derive(Clone, Debug)]
pub struct ZeroBitPublicKey {
    pub g: DenseMatrix,
    pub z: BitVec,
    pub params: PrcParams,
    /// Dimension of ker P observed at keygen.
    pub kernel_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Detected,
    Bot,
}

/// Decode report: verdict plus the compared quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub verdict: Verdict,
    pub unsat_count: usize,
    pub threshold: usize,
}

impl DecodeOutcome {
    pub fn detected(&self) -> bool {
        self.verdict == Verdict::Detected
    }
}

/// Samples (P, G, z) per the construction. Retries a bounded number of
/// times if ker P is trivial (negligible at paper parameters; failing
/// loudly beats silent degradation).
pub fn keygen(
    params: &PrcParams,
    rng: &mut RandomSource,
) -> Result<(ZeroBitSecretKey, ZeroBitPublicKey), ZeroError> {
    params.validate()?;
    for _ in 0..DEGENERATE_KERNEL_RETRIES {
        let rows: Result<Vec<SparseRow>, F2Error> =
            (0..params.r).map(|_| sample_sparse_row(params.n, params.t, rng)).collect();
        let p = SparseMatrix::new(params.n, rows?)?;
        let g = sample_kernel_matrix(&p, params.g, rng);
        let kernel_dim = crate::f2::kernel_basis(&p).num_cols();
        if kernel_dim == 0 && params.r > 0 {
            continue;
        }
        let z = BitVec::random(params.n, rng);
        let sk = ZeroBitSecretKey::new(p, z.clone(), *params)?;
        let pk = ZeroBitPublicKey { g, z, params: *params, kernel_dim };
        return Ok((sk, pk));
    }
    Err(ZeroError::DegenerateKernel)
}

/// Gu ⊕ z ⊕ e with u ← F₂^g and e ← Ber(n, η).
pub fn encode(pk: &ZeroBitPublicKey, rng: &mut RandomSource) -> BitVec {
    let u = BitVec::random(pk.params.g, rng);
    let mut x = pk.g.mat_vec(&u).expect("u has g bits");
    x.xor_in_place(&pk.z).expect("z has n bits");
    if pk.params.eta > 0.0 {
        let e = BitVec::bernoulli(pk.params.n, pk.params.eta, rng);
        x.xor_in_place(&e).expect("e has n bits");
    }
    x
}

/// Counts unsatisfied parity checks of x ⊕ z; Detected iff strictly below
/// the threshold. Strict about length: windowed decoding belongs to the
/// watermark layer.
pub fn decode(sk: &ZeroBitSecretKey, x: &BitVec) -> Result<DecodeOutcome, ZeroError> {
    if x.len() != sk.params.n {
        return Err(ZeroError::F2(F2Error::LengthMismatch {
            expected: sk.params.n,
            actual: x.len(),
        }));
    }
    let mut syn = sk.p.syndrome(x)?;
    syn.xor_in_place(sk.pz()).expect("syndrome lengths agree");
    let unsat_count = syn.hamming_weight();
    let threshold = sk.params.threshold();
    let verdict = if unsat_count < threshold { Verdict::Detected } else { Verdict::Bot };
    Ok(DecodeOutcome { verdict, unsat_count, threshold })
}

/// LPN-regime preset: r = ⌊0.99·n⌋, ζ = r^{−1/4}, g = ⌈c_g·(log₂ n)²⌉,
/// t = min(⌊sparsity_scale·log₂ n⌋, max_sparsity_for(r, α_target)).
pub fn preset_lpn(n: usize, eta: f64, sparsity_scale: f64) -> Result<PrcParams, ZeroError> {
    if n < 64 {
        return Err(ZeroError::BadParams(format!("preset_lpn needs n >= 64, got {n}")));
    }
    let r = (0.99 * n as f64).floor() as usize;
    let zeta = (r as f64).powf(-0.25);
    let log2n = (n as f64).log2();
    let g = (DEFAULT_CG * log2n * log2n).ceil() as usize;
    let t_scale = (sparsity_scale * log2n).floor() as usize;
    let t = t_scale.min(max_sparsity_for(r, DEFAULT_ALPHA_TARGET)?).max(1);
    let params = PrcParams { n, g, t, r, eta, zeta };
    params.validate()?;
    Ok(params)
}

/// XOR-regime preset: g = r = ⌈n^ε⌉, ζ = n^{−ε/4}, t as in the LPN preset.
pub fn preset_xor(n: usize, epsilon: f64, eta: f64) -> Result<PrcParams, ZeroError> {
    if !(0.0..1.0).contains(&epsilon) || epsilon == 0.0 {
        return Err(ZeroError::BadParams(format!("epsilon={epsilon} out of (0, 1)")));
    }
    let r = (n as f64).powf(epsilon).ceil() as usize;
    if r as f64 > 0.99 * n as f64 {
        return Err(ZeroError::BadParams(format!("n^epsilon = {r} exceeds 0.99·n guard")));
    }
    let zeta = (n as f64).powf(-epsilon / 4.0);
    let log2n = (n as f64).log2();
    let t_scale = (DEFAULT_SPARSITY_SCALE * log2n).floor() as usize;
    let t = t_scale.min(max_sparsity_for(r, DEFAULT_ALPHA_TARGET)?).max(1);
    let params = PrcParams { n, g: r, t, r, eta, zeta };
    params.validate()?;
    Ok(params)
}

/// Piling-up form: the expected fraction of unsatisfied weight-t parity
/// checks when each bit is flipped independently with probability δ.
pub fn expected_unsat_fraction(t: usize, delta: f64) -> f64 {
    0.5 - 0.5 * (1.0 - 2.0 * delta).powi(t as i32)
}

/// Largest t satisfying t ≤ (1/5)·log_{1/(2α)} r, floored at 1.
pub fn max_sparsity_for(r: usize, alpha: f64) -> Result<usize, ZeroError> {
    if !(0.0..0.5).contains(&alpha) || alpha == 0.0 {
        return Err(ZeroError::BadParams(format!("alpha={alpha} out of (0, 1/2)")));
    }
    if r < 2 {
        return Err(ZeroError::BadParams(format!("r={r} too small")));
    }
    let t = (0.2 * (r as f64).ln() / (1.0 / (2.0 * alpha)).ln()).floor() as usize;
    Ok(t.max(1))
}

/// The planted-XOR test distribution D₁(n, m, t): a matrix of m uniform
/// columns subject to sᵀG = 0 for a secret t-sparse s (returned for test
/// oracles), or a fully uniform matrix when `planted` is false.
pub fn sample_planted_xor(
    n: usize,
    m: usize,
    t: usize,
    planted: bool,
    rng: &mut RandomSource,
) -> Result<(DenseMatrix, Option<SparseRow>), ZeroError> {
    if m > n {
        return Err(ZeroError::BadParams(format!("m={m} exceeds n={n}")));
    }
    if planted {
        let s = sample_sparse_row(n, t, rng)?;
        let p = SparseMatrix::new(n, vec![s.clone()])?;
        let g = sample_kernel_matrix(&p, m, rng);
        Ok((g, Some(s)))
    } else {
        Ok((DenseMatrix::random(n, m, rng), None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params() -> PrcParams {
        PrcParams { n: 64, g: 8, t: 4, r: 48, eta: 0.0, zeta: 0.2 }
    }

    #[test]
    fn keygen_columns_in_kernel() {
        let mut rng = RandomSource::from_u64(51);
        let (sk, pk) = keygen(&small_params(), &mut rng).unwrap();
        for c in pk.g.columns() {
            assert_eq!(sk.p.syndrome(c).unwrap().hamming_weight(), 0);
        }
    }

    #[test]
    fn keygen_r_zero_gives_uniform_generator() {
        let params = PrcParams { n: 32, g: 4, t: 1, r: 0, eta: 0.0, zeta: 0.1 };
        let mut rng = RandomSource::from_u64(52);
        let (sk, pk) = keygen(&params, &mut rng).unwrap();
        assert_eq!(sk.p.num_rows(), 0);
        assert_eq!(pk.kernel_dim, 32);
        // Columns should look uniform: aggregate frequency over many keys.
        let mut ones = 0usize;
        let trials = 2000;
        for _ in 0..trials {
            let (_, pk) = keygen(&params, &mut rng).unwrap();
            ones += pk.g.column(0).hamming_weight();
        }
        let rate = ones as f64 / (trials * 32) as f64;
        assert!((rate - 0.5).abs() < 0.02, "rate {rate}");
    }

    #[test]
    fn keygen_full_rank_mostly() {
        // n=64, g=8, t=4, r=48: rank(P) = 48 on ≥ 95% of 200 trials.
        let mut rng = RandomSource::from_u64(53);
        let params = small_params();
        let mut full = 0;
        for _ in 0..200 {
            let (sk, _) = keygen(&params, &mut rng).unwrap();
            if crate::f2::rank_sparse(&sk.p) == 48 {
                full += 1;
            }
        }
        assert!(full >= 190, "full-rank count {full}/200");
    }

    #[test]
    fn encode_noiseless_has_zero_syndrome_and_detects() {
        let mut rng = RandomSource::from_u64(54);
        let (sk, pk) = keygen(&small_params(), &mut rng).unwrap();
        for _ in 0..50 {
            let x = encode(&pk, &mut rng);
            let out = decode(&sk, &x).unwrap();
            assert_eq!(out.unsat_count, 0);
            assert!(out.detected());
        }
    }

    #[test]
    fn decode_of_z_is_zero_unsat() {
        let mut rng = RandomSource::from_u64(55);
        let (sk, _) = keygen(&small_params(), &mut rng).unwrap();
        let out = decode(&sk, &sk.z.clone()).unwrap();
        assert_eq!(out.unsat_count, 0);
        assert!(out.detected());
    }

    #[test]
    fn decode_rejects_wrong_length() {
        let mut rng = RandomSource::from_u64(56);
        let (sk, _) = keygen(&small_params(), &mut rng).unwrap();
        assert!(decode(&sk, &BitVec::zeros(63)).is_err());
    }

    #[test]
    fn expected_unsat_fraction_endpoints() {
        for t in 1..8 {
            assert_eq!(expected_unsat_fraction(t, 0.0), 0.0);
            assert!((expected_unsat_fraction(t, 0.5) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn expected_unsat_fraction_matches_monte_carlo() {
        // t=4, δ=0.14: closed form 0.3657… vs parity-of-flips simulation.
        let formula = expected_unsat_fraction(4, 0.14);
        assert!((formula - 0.36570).abs() < 1e-4);
        let mut rng = RandomSource::from_u64(57);
        let trials = 1_000_000;
        let mut unsat = 0usize;
        for _ in 0..trials {
            let mut parity = false;
            for _ in 0..4 {
                parity ^= rng.bernoulli(0.14);
            }
            if parity {
                unsat += 1;
            }
        }
        let empirical = unsat as f64 / trials as f64;
        assert!((empirical - formula).abs() < 0.005, "{empirical} vs {formula}");
    }

    #[test]
    fn max_sparsity_values() {
        // Degenerate regime (bound below 1) floors at 1.
        assert_eq!(max_sparsity_for(4, 0.05).unwrap(), 1);
        // r=16220, α=0.35 → 5.
        assert_eq!(max_sparsity_for(16220, 0.35).unwrap(), 5);
        // Monotone nondecreasing in r.
        let mut last = 0;
        for r in (2..100_000).step_by(997) {
            let t = max_sparsity_for(r, 0.35).unwrap();
            assert!(t >= last);
            last = t;
        }
    }

    #[test]
    fn preset_lpn_values() {
        let p = preset_lpn(16384, 0.05, DEFAULT_SPARSITY_SCALE).unwrap();
        assert_eq!(p.r, 16220);
        assert!((p.zeta - 0.0886).abs() < 5e-4, "zeta {}", p.zeta);
        assert_eq!(p.g, 196);
        assert_eq!(p.t, 4);
        let p64 = preset_lpn(64, 0.05, DEFAULT_SPARSITY_SCALE).unwrap();
        assert_eq!(p64.g, 36);
        assert_eq!(p64.t, 2);
    }

    #[test]
    fn preset_lpn_respects_sparsity_cap() {
        for n in [64usize, 256, 1024, 4096, 16384, 65536] {
            let p = preset_lpn(n, 0.05, DEFAULT_SPARSITY_SCALE).unwrap();
            assert!(p.t <= max_sparsity_for(p.r, DEFAULT_ALPHA_TARGET).unwrap());
        }
    }

    #[test]
    fn preset_xor_values() {
        let p = preset_xor(4096, 0.5, 0.05).unwrap();
        assert_eq!(p.g, 64);
        assert_eq!(p.r, 64);
        // ζ = n^{−ε/4} = 4096^{−1/8} = 2^{−3/2}.
        assert!((p.zeta - 0.353553).abs() < 1e-5, "zeta {}", p.zeta);
        assert_eq!(p.g, p.r);
        // ε with n^ε ≈ n trips the r ≤ 0.99n guard.
        assert!(preset_xor(4096, 0.999, 0.05).is_err());
    }

    #[test]
    fn planted_xor_columns_orthogonal_to_s() {
        let mut rng = RandomSource::from_u64(58);
        let (g, s) = sample_planted_xor(24, 12, 2, true, &mut rng).unwrap();
        let s = s.unwrap();
        for c in g.columns() {
            assert!(!s.dot(c).unwrap());
        }
    }

    #[test]
    fn planted_xor_full_sparsity_even_columns() {
        let mut rng = RandomSource::from_u64(59);
        let (g, s) = sample_planted_xor(10, 6, 10, true, &mut rng).unwrap();
        assert_eq!(s.unwrap().weight(), 10);
        for c in g.columns() {
            assert_eq!(c.hamming_weight() % 2, 0);
        }
    }

    #[test]
    fn one_time_pad_transparency() {
        // Replacing z in both keys with any fixed vector leaves the
        // unsat distribution unchanged (paired-seed runs).
        let params = PrcParams { n: 128, g: 16, t: 3, r: 96, eta: 0.1, zeta: 0.1 };
        let mut rng = RandomSource::from_u64(60);
        let (sk, pk) = keygen(&params, &mut rng).unwrap();
        let z2 = BitVec::random(128, &mut rng);
        let sk2 = ZeroBitSecretKey::new(sk.p.clone(), z2.clone(), params).unwrap();
        let pk2 = ZeroBitPublicKey { g: pk.g.clone(), z: z2, params, kernel_dim: pk.kernel_dim };
        for seed in 0..100 {
            let mut ra = RandomSource::from_u64(1000 + seed);
            let mut rb = RandomSource::from_u64(1000 + seed);
            let a = decode(&sk, &encode(&pk, &mut ra)).unwrap();
            let b = decode(&sk2, &encode(&pk2, &mut rb)).unwrap();
            assert_eq!(a.unsat_count, b.unsat_count);
        }
    }

    #[test]
    fn determinism_byte_for_byte() {
        let params = small_params();
        let run = || {
            let mut rng = RandomSource::from_u64(61);
            let (sk, pk) = keygen(&params, &mut rng).unwrap();
            let x = encode(&pk, &mut rng);
            (format!("{:?}", sk.p.rows()), pk.z.to_hex(), x.to_hex())
        };
        assert_eq!(run(), run());
    }
}
