//! Deterministic, splittable randomness.
//!
//! Every stochastic operation in this crate takes a [`SplitRng`] explicitly.
//! A `SplitRng` is a ChaCha8 stream addressed by a logical 64-bit seed;
//! [`SplitRng::child`] derives an independent stream from the parent's seed
//! and an index without consuming any parent state, so parallel trials can
//! be given streams `root.child(0)`, `root.child(1)`, ... and produce the
//! same draws regardless of scheduling.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Splittable seeded random stream. Fixed seed implies a bit-identical
/// draw sequence across runs and platforms.
#[derive(Debug, Clone)]
pub struct SplitRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SplitRng {
    pub fn new(seed: u64) -> Self {
        SplitRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The logical seed this stream was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derive the `index`-th child stream. Does not consume parent state:
    /// `rng.child(i)` is the same stream no matter how much the parent has
    /// been used.
    pub fn child(&self, index: u64) -> Self {
        SplitRng::new(mix(self.seed, index))
    }

    /// Uniform draw in `[0, bound)`. Rejection over full 64-bit words, so
    /// it is exactly uniform.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below() requires a positive bound");
        // Widening multiply trick with rejection on the biased zone.
        let zone = bound.wrapping_neg() % bound;
        loop {
            let raw = self.next_u64();
            let wide = (raw as u128) * (bound as u128);
            if (wide as u64) >= zone || zone == 0 {
                return (wide >> 64) as u64;
            }
        }
    }

    /// Uniform draw in `[0, bound)` for 128-bit bounds.
    pub fn below_u128(&mut self, bound: u128) -> u128 {
        assert!(bound > 0, "below_u128() requires a positive bound");
        if bound <= u64::MAX as u128 {
            return self.below(bound as u64) as u128;
        }
        // Plain rejection from the smallest covering power of two.
        let bits = 128 - bound.leading_zeros();
        loop {
            let hi = self.next_u64() as u128;
            let lo = self.next_u64() as u128;
            let raw = ((hi << 64) | lo) >> (128 - bits);
            if raw < bound {
                return raw;
            }
        }
    }
}

impl RngCore for SplitRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// SplitMix64-style seed derivation for child streams.
fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ splitmix(index.wrapping_add(0xA0761D6478BD642F));
    z = splitmix(z);
    z
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SplitRng::new(42);
        let mut b = SplitRng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn children_are_independent_of_parent_state() {
        let mut parent = SplitRng::new(7);
        let child_before = parent.child(3);
        parent.next_u64();
        parent.next_u64();
        let child_after = parent.child(3);
        let mut x = child_before;
        let mut y = child_after;
        for _ in 0..10 {
            assert_eq!(x.next_u64(), y.next_u64());
        }
    }

    #[test]
    fn distinct_children_differ() {
        let parent = SplitRng::new(7);
        let mut a = parent.child(0);
        let mut b = parent.child(1);
        let same = (0..32).filter(|_| a.next_u64() == b.next_u64()).count();
        assert!(same < 2);
    }

    #[test]
    fn below_covers_range_uniformly() {
        let mut rng = SplitRng::new(1);
        let mut counts = [0usize; 7];
        for _ in 0..70_000 {
            counts[rng.below(7) as usize] += 1;
        }
        for &c in &counts {
            // each bin ~10000, 5-sigma band ~ 480
            assert!((c as i64 - 10_000).abs() < 500, "counts {counts:?}");
        }
    }

    #[test]
    fn below_u128_wide_bound() {
        let mut rng = SplitRng::new(9);
        let bound = (u64::MAX as u128) * 3;
        for _ in 0..1000 {
            assert!(rng.below_u128(bound) < bound);
        }
    }
}
