//! The fifteen acceptance criteria, one test each. Criteria share the
//! expensive fixed-seed keys through the suite's memoization, and the
//! libtest harness runs tests in name order on a single thread pool, so
//! the numbered prefixes keep the cheap-to-expensive ordering stable.
//! Each test prints its one-line verdict (visible with --nocapture).

use prc_cli::suite;

fn check(index: usize) {
    let outcome = suite::cached(index);
    println!("{}", outcome.line());
    assert!(outcome.pass, "{}", outcome.line());
}

#[test]
fn criterion_01_zero_bit_completeness() {
    check(1);
}

#[test]
fn criterion_02_zero_bit_soundness() {
    check(2);
}

#[test]
fn criterion_03_codeword_randomness_battery() {
    check(3);
}

#[test]
fn criterion_04_sparsity_attack_demo() {
    check(4);
}

#[test]
fn criterion_05_multibit_round_trip() {
    check(5);
}

#[test]
fn criterion_06_constant_rate_round_trip() {
    check(6);
}

#[test]
fn criterion_07_majority_code_agreement() {
    check(7);
}

#[test]
fn criterion_08_deletion_round_trip() {
    check(8);
}

#[test]
fn criterion_09_watermark_undetectability() {
    check(9);
}

#[test]
fn criterion_10_watermark_substring_robustness() {
    check(10);
}

#[test]
fn criterion_11_watermark_deletion_robustness() {
    check(11);
}

#[test]
fn criterion_12_binarization_exactness() {
    check(12);
}

#[test]
fn criterion_13_attribution() {
    check(13);
}

#[test]
fn criterion_14_stego_exactness_and_robustness() {
    check(14);
}

#[test]
fn criterion_15_determinism() {
    check(15);
}
