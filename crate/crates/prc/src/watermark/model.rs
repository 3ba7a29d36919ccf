//! Deterministic mock language models over the binary alphabet.
//!
//! A model is queried one token at a time through a session: `phat()`
//! reports p̂ = Pr[next token = 1] given the prompt and the tokens
//! pushed so far, and `push()` commits the realized token. Sessions are
//! pure functions of (prompt, prefix), which is the determinism contract
//! the undetectability argument rests on.

/// Per-generation model state.
pub trait ModelSession {
    /// p̂ for the next token given the pushed prefix.
    fn phat(&self) -> f64;
    /// Commit the realized next token.
    fn push(&mut self, bit: bool);
}

/// A deterministic binary language model with a hard length cap.
pub trait Model {
    fn start(&self, prompt: &str) -> Box<dyn ModelSession>;
    /// The model's own stopping point ("done" is length-based here).
    fn max_len(&self) -> usize;
}

fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn hash_prompt(seed: u64, prompt: &str) -> u64 {
    let mut h = mix64(seed ^ 0x243f6a8885a308d3);
    for b in prompt.bytes() {
        h = mix64(h ^ u64::from(b));
    }
    h
}

/// p̂ ≡ c regardless of context.
#[derive(Clone, Debug)]
pub struct ConstantModel {
    pub phat: f64,
    pub max_len: usize,
}

struct ConstantSession {
    phat: f64,
}

impl ModelSession for ConstantSession {
    fn phat(&self) -> f64 {
        self.phat
    }

    fn push(&mut self, _bit: bool) {}
}

impl Model for ConstantModel {
    fn start(&self, _prompt: &str) -> Box<dyn ModelSession> {
        Box::new(ConstantSession { phat: self.phat })
    }

    fn max_len(&self) -> usize {
        self.max_len
    }
}

/// p̂ ∈ [lo, hi] derived from a keyed hash of (prompt, prefix); the
/// rolling state makes each query O(1) in the prefix length.
#[derive(Clone, Debug)]
pub struct HashDrivenModel {
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
    pub max_len: usize,
}

struct HashDrivenSession {
    lo: f64,
    hi: f64,
    state: u64,
}

impl ModelSession for HashDrivenSession {
    fn phat(&self) -> f64 {
        let u = (mix64(self.state) >> 11) as f64 / (1u64 << 53) as f64;
        self.lo + (self.hi - self.lo) * u
    }

    fn push(&mut self, bit: bool) {
        self.state = mix64(self.state.rotate_left(1) ^ (2 | u64::from(bit)));
    }
}

impl Model for HashDrivenModel {
    fn start(&self, prompt: &str) -> Box<dyn ModelSession> {
        Box::new(HashDrivenSession {
            lo: self.lo,
            hi: self.hi,
            state: hash_prompt(self.seed, prompt),
        })
    }

    fn max_len(&self) -> usize {
        self.max_len
    }
}

/// Alternates spans of maximal entropy (p̂ = 1/2) with deterministic
/// spans (p̂ ∈ {0, 1} from a hash of the position), `span` tokens each.
#[derive(Clone, Debug)]
pub struct BurstyModel {
    pub span: usize,
    pub seed: u64,
    pub max_len: usize,
}

struct BurstySession {
    span: usize,
    base: u64,
    pos: usize,
}

impl ModelSession for BurstySession {
    fn phat(&self) -> f64 {
        if (self.pos / self.span) % 2 == 0 {
            0.5
        } else if mix64(self.base ^ self.pos as u64) & 1 == 1 {
            1.0
        } else {
            0.0
        }
    }

    fn push(&mut self, _bit: bool) {
        self.pos += 1;
    }
}

impl Model for BurstyModel {
    fn start(&self, prompt: &str) -> Box<dyn ModelSession> {
        Box::new(BurstySession { span: self.span, base: hash_prompt(self.seed, prompt), pos: 0 })
    }

    fn max_len(&self) -> usize {
        self.max_len
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_constant() {
        let m = ConstantModel { phat: 0.3, max_len: 10 };
        let mut s = m.start("x");
        for bit in [true, false, true] {
            assert_eq!(s.phat(), 0.3);
            s.push(bit);
        }
    }

    #[test]
    fn hash_driven_deterministic_and_in_range() {
        let m = HashDrivenModel { lo: 0.3, hi: 0.7, seed: 7, max_len: 100 };
        let mut a = m.start("prompt");
        let mut b = m.start("prompt");
        for i in 0..50 {
            let pa = a.phat();
            assert_eq!(pa, b.phat());
            assert!((0.3..=0.7).contains(&pa));
            let bit = i % 3 == 0;
            a.push(bit);
            b.push(bit);
        }
    }

    #[test]
    fn hash_driven_depends_on_prefix_and_prompt() {
        let m = HashDrivenModel { lo: 0.0, hi: 1.0, seed: 7, max_len: 100 };
        let mut a = m.start("prompt");
        let mut b = m.start("prompt");
        a.push(true);
        b.push(false);
        assert_ne!(a.phat(), b.phat());
        assert_ne!(m.start("p1").phat(), m.start("p2").phat());
    }

    #[test]
    fn bursty_spans() {
        let m = BurstyModel { span: 4, seed: 1, max_len: 100 };
        let mut s = m.start("x");
        for i in 0..16 {
            let p = s.phat();
            if (i / 4) % 2 == 0 {
                assert_eq!(p, 0.5);
            } else {
                assert!(p == 0.0 || p == 1.0);
            }
            s.push(true);
        }
    }
}
