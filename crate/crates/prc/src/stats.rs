//! Statistical verification harness: a pseudorandomness battery of
//! necessary-condition tests, the brute-force sparse-parity attack, and
//! Monte Carlo rate estimation with confidence intervals.

use crate::f2::BitVec;
use crate::rng::RandomSource;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("battery needs at least 100 samples, got {0}")]
    TooFewSamples(usize),
    #[error("samples have unequal lengths ({0} vs {1})")]
    UnequalLengths(usize, usize),
    #[error("attack budget {budget} exceeded: {required} parity candidates")]
    BudgetExceeded { required: u64, budget: u64 },
    #[error("samples are empty")]
    Empty,
}

/// One battery entry. The p-value is already Bonferroni-adjusted for
/// any scan inside the test (e.g. max over positions); `pass` compares
/// it to the per-test significance.
#[derive(Clone, Debug)]
pub struct TestReport {
    pub name: &'static str,
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
    pub samples: usize,
}

fn normal_two_sided_p(z: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    2.0 * n.cdf(-z.abs())
}

fn chi2_upper_p(stat: f64, df: f64) -> f64 {
    let d = ChiSquared::new(df).expect("valid df");
    1.0 - d.cdf(stat)
}

/// Battery significance, applied per test after Bonferroni across the
/// five tests of the suite.
pub const BATTERY_SIGNIFICANCE: f64 = 0.001;
const BATTERY_TESTS: f64 = 5.0;

/// Necessary-condition pseudorandomness battery over fixed-length
/// samples: per-position monobit, aggregate frequency, within-sample
/// serial pairs, cross-sample adjacent-column correlation, and a runs
/// test. Not a security proof.
pub fn battery(samples: &[BitVec]) -> Result<Vec<TestReport>, StatsError> {
    if samples.len() < 100 {
        return Err(StatsError::TooFewSamples(samples.len()));
    }
    let len = samples[0].len();
    if len == 0 {
        return Err(StatsError::Empty);
    }
    for s in samples {
        if s.len() != len {
            return Err(StatsError::UnequalLengths(len, s.len()));
        }
    }
    let m = samples.len();
    let alpha = BATTERY_SIGNIFICANCE / BATTERY_TESTS;
    let mut reports = Vec::new();

    // Column one-counts feed the first two tests.
    let mut col_ones = vec![0usize; len];
    for s in samples {
        for (j, ones) in col_ones.iter_mut().enumerate() {
            *ones += usize::from(s.get(j));
        }
    }

    // 1. Per-position monobit: worst column z, Bonferroni over columns.
    let sigma = (m as f64 / 4.0).sqrt();
    let max_z = col_ones
        .iter()
        .map(|&c| ((c as f64 - m as f64 / 2.0) / sigma).abs())
        .fold(0.0f64, f64::max);
    let p = (normal_two_sided_p(max_z) * len as f64).min(1.0);
    reports.push(TestReport {
        name: "monobit-per-position",
        statistic: max_z,
        p_value: p,
        pass: p >= alpha,
        samples: m,
    });

    // 2. Aggregate frequency over all bits.
    let total_ones: usize = col_ones.iter().sum();
    let total = (m * len) as f64;
    let z = (total_ones as f64 - total / 2.0) / (total / 4.0).sqrt();
    let p = normal_two_sided_p(z);
    reports.push(TestReport {
        name: "aggregate-frequency",
        statistic: z,
        p_value: p,
        pass: p >= alpha,
        samples: m,
    });

    // 3. Serial test: non-overlapping adjacent pairs within samples.
    let mut pair_counts = [0usize; 4];
    for s in samples {
        let mut j = 0;
        while j + 1 < len {
            let idx = usize::from(s.get(j)) << 1 | usize::from(s.get(j + 1));
            pair_counts[idx] += 1;
            j += 2;
        }
    }
    let pairs: usize = pair_counts.iter().sum();
    let e = pairs as f64 / 4.0;
    let chi2: f64 = pair_counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let p = chi2_upper_p(chi2, 3.0);
    reports.push(TestReport {
        name: "serial-pairs",
        statistic: chi2,
        p_value: p,
        pass: p >= alpha,
        samples: m,
    });

    // 4. Cross-sample correlation between adjacent columns: agreement
    // counts should be Bin(m, 1/2); worst pair, Bonferroni.
    let mut max_z = 0.0f64;
    for j in 0..len - 1 {
        let agree = samples.iter().filter(|s| s.get(j) == s.get(j + 1)).count();
        let z = ((agree as f64 - m as f64 / 2.0) / sigma).abs();
        max_z = max_z.max(z);
    }
    let p = (normal_two_sided_p(max_z) * (len - 1) as f64).min(1.0);
    reports.push(TestReport {
        name: "column-correlation",
        statistic: max_z,
        p_value: p,
        pass: p >= alpha,
        samples: m,
    });

    // 5. Runs test, z-scores pooled across samples.
    let mut pooled = 0.0;
    for s in samples {
        let n1 = s.hamming_weight() as f64;
        let n0 = len as f64 - n1;
        if n1 == 0.0 || n0 == 0.0 {
            // Degenerate sample: no runs statistic; maximal evidence
            // against randomness is captured by the frequency tests.
            pooled += 0.0;
            continue;
        }
        let mut runs = 1usize;
        for j in 1..len {
            if s.get(j) != s.get(j - 1) {
                runs += 1;
            }
        }
        let nn = len as f64;
        let expected = 2.0 * n1 * n0 / nn + 1.0;
        let var = 2.0 * n1 * n0 * (2.0 * n1 * n0 - nn) / (nn * nn * (nn - 1.0));
        if var > 0.0 {
            pooled += (runs as f64 - expected) / var.sqrt();
        }
    }
    let z = pooled / (m as f64).sqrt();
    let p = normal_two_sided_p(z);
    reports.push(TestReport {
        name: "runs",
        statistic: z,
        p_value: p,
        pass: p >= alpha,
        samples: m,
    });

    Ok(reports)
}

/// A parity check found by the exhaustive attack.
#[derive(Clone, Debug, PartialEq)]
pub struct FoundParity {
    pub indices: Vec<usize>,
    /// Empirical Pr[s·x = 0] over the samples.
    pub zero_fraction: f64,
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut c = 1u64;
    for i in 0..k {
        c = c.saturating_mul(n - i) / (i + 1);
    }
    c
}

/// Exhaustively tests every s of weight ≤ t_max against the samples and
/// reports the most biased parity at or beyond the detection threshold
/// Pr[s·x = 0] ≥ 1/2 + 4/√N (or ≤ 1/2 − 4/√N: a complemented check is
/// as much structure). `budget` caps Σ C(n, k) candidate checks.
pub fn sparse_parity_attack(
    samples: &[BitVec],
    t_max: usize,
    budget: u64,
) -> Result<Option<FoundParity>, StatsError> {
    let Some(first) = samples.first() else {
        return Err(StatsError::Empty);
    };
    let n = first.len();
    for s in samples {
        if s.len() != n {
            return Err(StatsError::UnequalLengths(n, s.len()));
        }
    }
    let required: u64 = (1..=t_max).map(|k| binomial(n as u64, k as u64)).sum();
    if required > budget {
        return Err(StatsError::BudgetExceeded { required, budget });
    }
    // Transpose: column j packed across samples, so a candidate parity
    // is an XOR of column words plus a popcount.
    let m = samples.len();
    let columns: Vec<BitVec> = (0..n)
        .map(|j| {
            let mut c = BitVec::zeros(m);
            for (i, s) in samples.iter().enumerate() {
                c.set(i, s.get(j));
            }
            c
        })
        .collect();
    let threshold = 0.5 + 4.0 / (m as f64).sqrt();
    let mut best: Option<FoundParity> = None;

    let mut consider = |indices: &[usize], acc: &BitVec| {
        let ones = acc.hamming_weight();
        let zero_fraction = 1.0 - ones as f64 / m as f64;
        let bias = (zero_fraction - 0.5).abs() + 0.5;
        if bias >= threshold
            && best
                .as_ref()
                .is_none_or(|b| (b.zero_fraction - 0.5).abs() < (zero_fraction - 0.5).abs())
        {
            best = Some(FoundParity { indices: indices.to_vec(), zero_fraction });
        }
    };

    // Depth-first over index combinations, sharing XOR prefixes.
    fn walk(
        columns: &[BitVec],
        start: usize,
        depth_left: usize,
        indices: &mut Vec<usize>,
        acc: &BitVec,
        consider: &mut impl FnMut(&[usize], &BitVec),
    ) {
        for j in start..columns.len() {
            let next = acc.xor(&columns[j]).expect("equal lengths");
            indices.push(j);
            consider(indices, &next);
            if depth_left > 1 {
                walk(columns, j + 1, depth_left - 1, indices, &next, consider);
            }
            indices.pop();
        }
    }
    let mut indices = Vec::new();
    walk(&columns, 0, t_max, &mut indices, &BitVec::zeros(m), &mut consider);
    Ok(best)
}

/// Success rate with a Wilson 95% confidence interval.
#[derive(Clone, Copy, Debug)]
pub struct RateEstimate {
    pub successes: usize,
    pub trials: usize,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn estimate_rate(
    mut experiment: impl FnMut(&mut RandomSource) -> bool,
    trials: usize,
    rng: &mut RandomSource,
) -> RateEstimate {
    let successes = (0..trials).filter(|_| experiment(rng)).count();
    wilson_interval(successes, trials)
}

pub fn wilson_interval(successes: usize, trials: usize) -> RateEstimate {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = 1.959_963_984_540_054; // 97.5th normal percentile
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    RateEstimate { successes, trials, rate: p, lo: center - half, hi: center + half }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zero::{self, sample_planted_xor, PrcParams};

    fn uniform_samples(m: usize, len: usize, seed: u64) -> Vec<BitVec> {
        let mut rng = RandomSource::from_u64(seed);
        (0..m).map(|_| BitVec::random(len, &mut rng)).collect()
    }

    #[test]
    fn uniform_passes_battery() {
        let reports = battery(&uniform_samples(500, 128, 201)).unwrap();
        assert_eq!(reports.len(), 5);
        for r in &reports {
            assert!(r.pass, "{} failed: stat {} p {}", r.name, r.statistic, r.p_value);
        }
    }

    #[test]
    fn constant_samples_fail_frequency() {
        let samples: Vec<BitVec> = (0..200).map(|_| BitVec::ones(64)).collect();
        let reports = battery(&samples).unwrap();
        let agg = reports.iter().find(|r| r.name == "aggregate-frequency").unwrap();
        assert!(!agg.pass);
    }

    #[test]
    fn repetition_coded_samples_fail_serial() {
        // Naive 3x repetition of uniform bits: long runs, biased pairs.
        let mut rng = RandomSource::from_u64(202);
        let samples: Vec<BitVec> = (0..200)
            .map(|_| {
                let mut s = BitVec::zeros(0);
                for _ in 0..40 {
                    let b = rng.bit();
                    for _ in 0..3 {
                        s.push(b);
                    }
                }
                s
            })
            .collect();
        let reports = battery(&samples).unwrap();
        let serial = reports.iter().find(|r| r.name == "serial-pairs").unwrap();
        assert!(!serial.pass, "serial p = {}", serial.p_value);
    }

    #[test]
    fn battery_rejects_too_few() {
        assert!(matches!(
            battery(&uniform_samples(50, 32, 203)),
            Err(StatsError::TooFewSamples(50))
        ));
    }

    #[test]
    fn attack_recovers_planted_parity() {
        let mut rng = RandomSource::from_u64(204);
        let (g, s) = sample_planted_xor(24, 24, 2, true, &mut rng).unwrap();
        // Use the kernel-matrix columns as samples... they satisfy s·x = 0.
        let samples: Vec<BitVec> = (0..200)
            .map(|_| {
                // random combinations of the planted matrix columns
                let mut acc = BitVec::zeros(24);
                for c in g.columns() {
                    if rng.bit() {
                        acc.xor_in_place(c).unwrap();
                    }
                }
                acc
            })
            .collect();
        let found = sparse_parity_attack(&samples, 2, 1_000_000).unwrap().unwrap();
        assert_eq!(found.indices, s.unwrap().indices().to_vec());
        assert_eq!(found.zero_fraction, 1.0);
    }

    #[test]
    fn attack_finds_nothing_on_uniform() {
        let samples = uniform_samples(200, 24, 205);
        assert_eq!(sparse_parity_attack(&samples, 2, 1_000_000).unwrap(), None);
    }

    #[test]
    fn attack_finds_ldpc_row() {
        // t=2 checks at n=64: codewords satisfy every row of P exactly.
        let mut rng = RandomSource::from_u64(206);
        let params = PrcParams { n: 64, g: 8, t: 2, r: 48, eta: 0.0, zeta: 0.15 };
        let (sk, pk) = zero::keygen(&params, &mut rng).unwrap();
        let samples: Vec<BitVec> = (0..300).map(|_| zero::encode(&pk, &mut rng)).collect();
        let found = sparse_parity_attack(&samples, 2, 1_000_000).unwrap().unwrap();
        // Codewords are Gu ⊕ z, so a true check s of P is constantly
        // s·z — perfectly biased either way.
        assert!(found.zero_fraction == 1.0 || found.zero_fraction == 0.0);
        let is_row = sk.p.rows().iter().any(|r| r.indices() == found.indices.as_slice());
        // The recovered parity is a true check of the key: a row of P
        // or a weight-≤2 element of its row space.
        let dense = {
            let mut v = BitVec::zeros(64);
            for &i in &found.indices {
                v.set(i, true);
            }
            v
        };
        let in_row_space = pk.g.columns().iter().all(|c| {
            !c.and(&dense).map(|x| x.hamming_weight() % 2 == 1).unwrap_or(true)
        });
        assert!(is_row || in_row_space, "found {:?}", found.indices);
    }

    #[test]
    fn attack_budget_enforced() {
        let samples = uniform_samples(100, 64, 207);
        assert!(matches!(
            sparse_parity_attack(&samples, 3, 1000),
            Err(StatsError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn estimate_rate_always_true() {
        let mut rng = RandomSource::from_u64(208);
        let est = estimate_rate(|_| true, 1000, &mut rng);
        assert_eq!(est.rate, 1.0);
        assert!(est.lo > 0.99 && est.hi >= 1.0 - 1e-12);
    }

    #[test]
    fn estimate_rate_fair_coin_interval() {
        let mut rng = RandomSource::from_u64(209);
        let est = estimate_rate(|r| r.bit(), 10_000, &mut rng);
        assert!(est.lo < 0.5 && 0.5 < est.hi, "[{}, {}]", est.lo, est.hi);
        assert!((est.hi - est.lo) < 0.025);
    }

    #[test]
    fn wilson_matches_known_value() {
        // 50/100 → Wilson 95%: [0.4038, 0.5962].
        let est = wilson_interval(50, 100);
        assert!((est.lo - 0.4038).abs() < 5e-4, "{}", est.lo);
        assert!((est.hi - 0.5962).abs() < 5e-4, "{}", est.hi);
    }
}
