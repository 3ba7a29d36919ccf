//! Packed bit vectors over GF(2).

use super::F2Error;
use crate::rng::RandomSource;

/// A length-`len` vector over F₂, packed 64 bits per word.
///
/// Word `i / 64` holds bit `i` at position `i % 64`; serialized little-endian
/// this is exactly the byte-level packing rule (bit `i` at byte `i / 8`,
/// position `i % 8`). Trailing padding bits of the last word are kept zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self { len, words: vec![!0u64; words_for(len)] };
        v.mask_tail();
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.words[i / 64] |= 1u64 << (i % 64);
            }
        }
        v
    }

    /// Uniform random vector.
    pub fn random(len: usize, rng: &mut RandomSource) -> Self {
        let mut v = Self::zeros(len);
        rng.fill_words(&mut v.words);
        v.mask_tail();
        v
    }

    /// Independent Bernoulli(p) bits — the error vector `e ← Ber(n, η)`.
    pub fn bernoulli(len: usize, p: f64, rng: &mut RandomSource) -> Self {
        let mut v = Self::zeros(len);
        if p <= 0.0 {
            return v;
        }
        for i in 0..len {
            if rng.bernoulli(p) {
                v.words[i / 64] |= 1u64 << (i % 64);
            }
        }
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn push(&mut self, b: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        self.len += 1;
        if b {
            let i = self.len - 1;
            self.words[i / 64] |= 1u64 << (i % 64);
        }
    }

    pub fn hamming_weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set bits in positions `[a, b)`.
    pub fn count_ones_range(&self, a: usize, b: usize) -> usize {
        debug_assert!(a <= b && b <= self.len);
        if a == b {
            return 0;
        }
        let (wa, wb) = (a / 64, (b - 1) / 64);
        if wa == wb {
            let mask = (!0u64 << (a % 64)) & (!0u64 >> (63 - (b - 1) % 64));
            return (self.words[wa] & mask).count_ones() as usize;
        }
        let mut total = (self.words[wa] & (!0u64 << (a % 64))).count_ones() as usize;
        for w in &self.words[wa + 1..wb] {
            total += w.count_ones() as usize;
        }
        total += (self.words[wb] & (!0u64 >> (63 - (b - 1) % 64))).count_ones() as usize;
        total
    }

    pub fn xor(&self, other: &BitVec) -> Result<BitVec, F2Error> {
        let mut out = self.clone();
        out.xor_in_place(other)?;
        Ok(out)
    }

    pub fn xor_in_place(&mut self, other: &BitVec) -> Result<(), F2Error> {
        if self.len != other.len {
            return Err(F2Error::LengthMismatch { expected: self.len, actual: other.len });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn and(&self, other: &BitVec) -> Result<BitVec, F2Error> {
        if self.len != other.len {
            return Err(F2Error::LengthMismatch { expected: self.len, actual: other.len });
        }
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Ok(BitVec { len: self.len, words })
    }

    /// Copy of positions `[a, b)`.
    pub fn slice(&self, a: usize, b: usize) -> BitVec {
        debug_assert!(a <= b && b <= self.len);
        let mut out = BitVec::zeros(b - a);
        // Word-level shifted copy.
        let shift = a % 64;
        let base = a / 64;
        for (k, w) in out.words.iter_mut().enumerate() {
            let lo = self.words.get(base + k).copied().unwrap_or(0) >> shift;
            let hi = if shift == 0 {
                0
            } else {
                self.words.get(base + k + 1).copied().unwrap_or(0) << (64 - shift)
            };
            *w = lo | hi;
        }
        out.mask_tail();
        out
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        let shift = self.len % 64;
        let base = self.len / 64;
        if shift == 0 {
            out.words[base..base + other.words.len()].copy_from_slice(&other.words);
        } else {
            for (k, &w) in other.words.iter().enumerate() {
                out.words[base + k] |= w << shift;
                if base + k + 1 < out.words.len() {
                    out.words[base + k + 1] |= w >> (64 - shift);
                }
            }
        }
        out.mask_tail();
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let n_bytes = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(n_bytes);
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(n_bytes);
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self, F2Error> {
        if bytes.len() != len.div_ceil(8) {
            return Err(F2Error::LengthMismatch { expected: len.div_ceil(8), actual: bytes.len() });
        }
        let mut v = Self::zeros(len);
        for (i, &b) in bytes.iter().enumerate() {
            v.words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        v.mask_tail();
        Ok(v)
    }

    /// Lowercase hex of the packed bytes.
    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self, F2Error> {
        if hex.len() % 2 != 0 {
            return Err(F2Error::BadHex("odd number of hex digits".into()));
        }
        let bytes: Result<Vec<u8>, _> = (0..hex.len() / 2)
            .map(|i| u8::from_str_radix(&hex[2 * i..2 * i + 2], 16))
            .collect();
        let bytes = bytes.map_err(|e| F2Error::BadHex(e.to_string()))?;
        Self::from_bytes(&bytes, len)
    }

    /// ASCII bit string, e.g. "01101".
    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_bit_string(s: &str) -> Result<Self, F2Error> {
        let mut v = BitVec::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(F2Error::BadHex(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(v)
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.len <= 64 {
            write!(f, "BitVec({})", self.to_bit_string())
        } else {
            write!(f, "BitVec(len={}, {}…)", self.len, self.slice(0, 64).to_bit_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_weight(v: &BitVec) -> usize {
        (0..v.len()).filter(|&i| v.get(i)).count()
    }

    #[test]
    fn weight_zero_and_saturated() {
        assert_eq!(BitVec::zeros(100).hamming_weight(), 0);
        assert_eq!(BitVec::ones(8).hamming_weight(), 8);
        assert_eq!(BitVec::ones(130).hamming_weight(), 130);
    }

    #[test]
    fn weight_matches_naive_loop() {
        let mut rng = RandomSource::from_u64(1);
        for _ in 0..200 {
            let len = 1 + rng.index(300);
            let v = BitVec::random(len, &mut rng);
            assert_eq!(v.hamming_weight(), naive_weight(&v));
        }
    }

    #[test]
    fn xor_self_inverse_and_identity() {
        let mut rng = RandomSource::from_u64(2);
        let v = BitVec::random(97, &mut rng);
        assert_eq!(v.xor(&v).unwrap(), BitVec::zeros(97));
        assert_eq!(v.xor(&BitVec::zeros(97)).unwrap(), v);
    }

    #[test]
    fn xor_matches_per_bit_oracle() {
        let mut rng = RandomSource::from_u64(3);
        for _ in 0..100 {
            let len = 1 + rng.index(200);
            let v = BitVec::random(len, &mut rng);
            let w = BitVec::random(len, &mut rng);
            let x = v.xor(&w).unwrap();
            for i in 0..len {
                assert_eq!(x.get(i), v.get(i) ^ w.get(i));
            }
        }
    }

    #[test]
    fn xor_length_mismatch() {
        let v = BitVec::zeros(5);
        let w = BitVec::zeros(6);
        assert_eq!(v.xor(&w), Err(F2Error::LengthMismatch { expected: 5, actual: 6 }));
    }

    #[test]
    fn weight_inclusion_exclusion() {
        // wt(v ⊕ w) = wt(v) + wt(w) − 2·wt(v AND w)
        let mut rng = RandomSource::from_u64(4);
        for _ in 0..100 {
            let len = 1 + rng.index(500);
            let v = BitVec::random(len, &mut rng);
            let w = BitVec::random(len, &mut rng);
            let lhs = v.xor(&w).unwrap().hamming_weight() as isize;
            let rhs = v.hamming_weight() as isize + w.hamming_weight() as isize
                - 2 * v.and(&w).unwrap().hamming_weight() as isize;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn slice_concat_round_trip() {
        let mut rng = RandomSource::from_u64(5);
        for _ in 0..100 {
            let len = 2 + rng.index(300);
            let v = BitVec::random(len, &mut rng);
            let cut = rng.index(len);
            let joined = v.slice(0, cut).concat(&v.slice(cut, len));
            assert_eq!(joined, v);
        }
    }

    #[test]
    fn count_ones_range_matches_slice_weight() {
        let mut rng = RandomSource::from_u64(6);
        for _ in 0..200 {
            let len = 2 + rng.index(400);
            let v = BitVec::random(len, &mut rng);
            let a = rng.index(len);
            let b = a + rng.index(len - a + 1);
            assert_eq!(v.count_ones_range(a, b), v.slice(a, b).hamming_weight());
        }
    }

    #[test]
    fn byte_packing_rule() {
        // Bit i lives at byte i/8, position i%8 (little-endian in byte).
        let mut v = BitVec::zeros(16);
        v.set(0, true);
        v.set(9, true);
        assert_eq!(v.to_bytes(), vec![0b0000_0001, 0b0000_0010]);
        assert_eq!(v.to_hex(), "0102");
        assert_eq!(BitVec::from_hex("0102", 16).unwrap(), v);
    }

    #[test]
    fn hex_round_trip_random() {
        let mut rng = RandomSource::from_u64(7);
        for _ in 0..100 {
            let len = 1 + rng.index(500);
            let v = BitVec::random(len, &mut rng);
            assert_eq!(BitVec::from_hex(&v.to_hex(), len).unwrap(), v);
        }
    }

    #[test]
    fn bit_string_round_trip() {
        let v = BitVec::from_bit_string("0110100101").unwrap();
        assert_eq!(v.to_bit_string(), "0110100101");
        assert!(BitVec::from_bit_string("01x").is_err());
    }

    #[test]
    fn push_grows() {
        let mut v = BitVec::zeros(0);
        for i in 0..200 {
            v.push(i % 3 == 0);
        }
        assert_eq!(v.len(), 200);
        for i in 0..200 {
            assert_eq!(v.get(i), i % 3 == 0);
        }
    }

    #[test]
    fn bernoulli_rate_sane() {
        let mut rng = RandomSource::from_u64(8);
        let v = BitVec::bernoulli(100_000, 0.05, &mut rng);
        let rate = v.hamming_weight() as f64 / 100_000.0;
        assert!((rate - 0.05).abs() < 0.005, "rate {rate}");
    }
}
