//! Rough timings of the operations that dominate the acceptance suite:
//! large-n key generation, encode/decode, and full-text window scans.

use prc::f2::BitVec;
use prc::rng::RandomSource;
use prc::scan::WindowScanner;
use prc::zero::{self, preset_lpn};
use std::time::Instant;

fn main() {
    let mut rng = RandomSource::from_u64(7);
    let params = preset_lpn(16384, 0.05, 1.0 / 3.0).unwrap();
    println!("params: n={} r={} g={} t={} zeta={:.4}", params.n, params.r, params.g, params.t, params.zeta);

    let t0 = Instant::now();
    let (sk, pk) = zero::keygen(&params, &mut rng).unwrap();
    println!("keygen: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let mut x = BitVec::zeros(0);
    for _ in 0..100 {
        x = zero::encode(&pk, &mut rng);
    }
    println!("encode x100: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let mut acc = 0usize;
    for _ in 0..100 {
        acc += zero::decode(&sk, &x).unwrap().unsat_count;
    }
    println!("decode x100: {:?} ({acc})", t0.elapsed());

    // Full scan: text 3n, window n, 3 pads.
    let text = BitVec::random(3 * params.n, &mut rng);
    let rows: Vec<Vec<u32>> = sk
        .p
        .rows()
        .iter()
        .map(|r| r.indices().iter().map(|&i| i as u32).collect())
        .collect();
    let scanner = WindowScanner::new(params.n, rows);
    let constants = BitVec::random(params.r, &mut rng);
    let t0 = Instant::now();
    let mut total = 0u64;
    for _ in 0..3 {
        total += scanner.scan(&text, &constants).iter().map(|&c| c as u64).sum::<u64>();
    }
    println!("scan (3 pads, text 3n): {:?} (checksum {total})", t0.elapsed());
}
