//! Sliding-window parity scanning.
//!
//! Detection over a long text evaluates, for every window start s, the
//! number of unsatisfied parity checks of the windowed bits. Doing this
//! one window at a time costs O(L·r·t); this module instead computes,
//! for each check, its parity at *all* starts at once as an XOR of
//! shifted copies of the text, and accumulates the r parity streams in
//! bit-sliced counters. The result is a vector of unsat counts indexed
//! by window start, at roughly word-parallel speed.

use crate::f2::BitVec;

/// Copies `count` bits of `src` starting at `bit_offset` into `out`
/// (word-aligned at the destination).
fn copy_shifted(src: &[u64], bit_offset: usize, out: &mut [u64], count: usize) {
    let words = count.div_ceil(64);
    let w = bit_offset / 64;
    let b = bit_offset % 64;
    if b == 0 {
        out[..words].copy_from_slice(&src[w..w + words]);
    } else {
        for i in 0..words {
            let lo = src[w + i] >> b;
            let hi = if w + i + 1 < src.len() { src[w + i + 1] << (64 - b) } else { 0 };
            out[i] = lo | hi;
        }
    }
    if count % 64 != 0 {
        out[words - 1] &= (1u64 << (count % 64)) - 1;
    }
    for word in out[words..].iter_mut() {
        *word = 0;
    }
}

/// Precomputed scan structure: a fixed window length and one offset
/// list per parity check (offsets are positions within the window).
#[derive(Clone, Debug)]
pub struct WindowScanner {
    window: usize,
    rows: Vec<Vec<u32>>,
}

impl WindowScanner {
    pub fn new(window: usize, rows: Vec<Vec<u32>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.iter().all(|&o| (o as usize) < window)));
        Self { window, rows }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Unsat counts for every window start `s ∈ 0..=L−window`.
    /// `constants[i]` is XORed into check i's parity (the key- and
    /// pad-dependent term that does not move with the window).
    pub fn scan(&self, text: &BitVec, constants: &BitVec) -> Vec<u32> {
        assert_eq!(constants.len(), self.rows.len(), "one constant per check");
        if text.len() < self.window {
            return Vec::new();
        }
        let starts = text.len() - self.window + 1;
        let words = starts.div_ceil(64);
        let src = text.words();
        let mut stream = vec![0u64; words];
        let mut scratch = vec![0u64; words];
        // planes[p] holds bit p of the per-start counters.
        let mut planes: Vec<Vec<u64>> = Vec::new();
        let tail_mask = if starts % 64 != 0 { (1u64 << (starts % 64)) - 1 } else { u64::MAX };
        for (i, row) in self.rows.iter().enumerate() {
            stream.iter_mut().for_each(|w| *w = 0);
            for &offset in row {
                copy_shifted(src, offset as usize, &mut scratch, starts);
                for (s, w) in stream.iter_mut().zip(&scratch) {
                    *s ^= w;
                }
            }
            if constants.get(i) {
                stream.iter_mut().for_each(|w| *w = !*w);
                if let Some(last) = stream.last_mut() {
                    *last &= tail_mask;
                }
            }
            // Ripple-carry add of the 0/1 stream into the bit planes.
            let mut carry = &mut stream;
            let mut depth = 0;
            loop {
                if carry.iter().all(|&w| w == 0) {
                    break;
                }
                if depth == planes.len() {
                    planes.push(vec![0u64; words]);
                }
                let plane = &mut planes[depth];
                for (p, c) in plane.iter_mut().zip(carry.iter_mut()) {
                    let new_carry = *p & *c;
                    *p ^= *c;
                    *c = new_carry;
                }
                depth += 1;
                carry = &mut stream;
            }
        }
        let mut counts = vec![0u32; starts];
        for (p, plane) in planes.iter().enumerate() {
            for s in 0..starts {
                counts[s] += (((plane[s / 64] >> (s % 64)) & 1) as u32) << p;
            }
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;

    /// Direct per-window recomputation.
    fn naive(window: usize, rows: &[Vec<u32>], text: &BitVec, constants: &BitVec) -> Vec<u32> {
        let mut out = Vec::new();
        for s in 0..=text.len().saturating_sub(window) {
            let mut unsat = 0;
            for (i, row) in rows.iter().enumerate() {
                let mut parity = constants.get(i);
                for &o in row {
                    parity ^= text.get(s + o as usize);
                }
                unsat += u32::from(parity);
            }
            out.push(unsat);
        }
        out
    }

    #[test]
    fn matches_naive_small() {
        let mut rng = RandomSource::from_u64(141);
        for _ in 0..20 {
            let window = 8 + rng.index(40);
            let text = BitVec::random(window + rng.index(200), &mut rng);
            let rows: Vec<Vec<u32>> = (0..1 + rng.index(60))
                .map(|_| (0..1 + rng.index(4)).map(|_| rng.index(window) as u32).collect())
                .collect();
            let constants = BitVec::random(rows.len(), &mut rng);
            let scanner = WindowScanner::new(window, rows.clone());
            assert_eq!(scanner.scan(&text, &constants), naive(window, &rows, &text, &constants));
        }
    }

    #[test]
    fn matches_naive_word_boundaries() {
        let mut rng = RandomSource::from_u64(142);
        for window in [63, 64, 65, 128] {
            let text = BitVec::random(window + 130, &mut rng);
            let rows: Vec<Vec<u32>> =
                (0..200).map(|_| (0..3).map(|_| rng.index(window) as u32).collect()).collect();
            let constants = BitVec::random(200, &mut rng);
            let scanner = WindowScanner::new(window, rows.clone());
            assert_eq!(scanner.scan(&text, &constants), naive(window, &rows, &text, &constants));
        }
    }

    #[test]
    fn text_shorter_than_window_is_empty() {
        let scanner = WindowScanner::new(16, vec![vec![0, 5]]);
        let text = BitVec::zeros(15);
        assert!(scanner.scan(&text, &BitVec::zeros(1)).is_empty());
    }

    #[test]
    fn exact_length_single_start() {
        let mut rng = RandomSource::from_u64(143);
        let text = BitVec::random(100, &mut rng);
        let rows: Vec<Vec<u32>> =
            (0..300).map(|_| (0..4).map(|_| rng.index(100) as u32).collect()).collect();
        let constants = BitVec::random(300, &mut rng);
        let scanner = WindowScanner::new(100, rows.clone());
        let got = scanner.scan(&text, &constants);
        assert_eq!(got.len(), 1);
        assert_eq!(got, naive(100, &rows, &text, &constants));
    }
}
