//! Sources of protocol randomness.
//!
//! Every scheme draws its randomness as a fixed sequence of uniform choices
//! `choose(n)`. Driving that sequence from a seeded generator gives a sampled
//! run; driving it from a mixed-radix index gives one element of the exhaustive
//! enumeration, so the same code path serves both transcripts and exact audits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub trait Choices {
    /// A uniform element of `0..n`.
    fn choose(&mut self, n: usize) -> usize;

    /// An independent sub-stream identified by `key`.
    fn split(&mut self, key: u64) -> Box<dyn Choices + '_>;
}

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a key path.
pub fn derive_seed(seed: u64, key: u64) -> u64 {
    mix(seed ^ mix(key.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

pub struct SeededChoices {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SeededChoices {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Choices for SeededChoices {
    fn choose(&mut self, n: usize) -> usize {
        assert!(n > 0, "choose from an empty range");
        self.rng.gen_range(0..n)
    }

    fn split(&mut self, key: u64) -> Box<dyn Choices + '_> {
        Box::new(SeededChoices::new(derive_seed(self.seed, key)))
    }
}

/// Decodes a realization index digit by digit. Splits share the parent's
/// digit stream, so a scheme that consumes a fixed radix sequence enumerates
/// its whole domain as the index runs over `0..size`.
pub struct IndexedChoices {
    rest: u128,
    consumed: u128,
}

impl IndexedChoices {
    pub fn new(index: u64) -> Self {
        Self {
            rest: index as u128,
            consumed: 1,
        }
    }

    /// Product of all radices drawn so far.
    pub fn consumed(&self) -> u128 {
        self.consumed
    }

    /// True when every digit of the index was used by some draw.
    pub fn exhausted(&self) -> bool {
        self.rest == 0
    }
}

impl Choices for IndexedChoices {
    fn choose(&mut self, n: usize) -> usize {
        assert!(n > 0, "choose from an empty range");
        let d = (self.rest % n as u128) as usize;
        self.rest /= n as u128;
        self.consumed = self.consumed.saturating_mul(n as u128);
        d
    }

    fn split(&mut self, _key: u64) -> Box<dyn Choices + '_> {
        Box::new(Borrowed(self))
    }
}

struct Borrowed<'a>(&'a mut IndexedChoices);

impl Choices for Borrowed<'_> {
    fn choose(&mut self, n: usize) -> usize {
        self.0.choose(n)
    }

    fn split(&mut self, key: u64) -> Box<dyn Choices + '_> {
        self.0.split(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_is_deterministic() {
        let a: Vec<usize> = {
            let mut c = SeededChoices::new(9);
            (0..20).map(|_| c.choose(7)).collect()
        };
        let b: Vec<usize> = {
            let mut c = SeededChoices::new(9);
            (0..20).map(|_| c.choose(7)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn splits_do_not_depend_on_draw_order() {
        let mut c = SeededChoices::new(1);
        let first: Vec<usize> = {
            let mut s = c.split(5);
            (0..8).map(|_| s.choose(100)).collect()
        };
        let _ = c.choose(3);
        let mut c2 = SeededChoices::new(1);
        let second: Vec<usize> = {
            let mut s = c2.split(5);
            (0..8).map(|_| s.choose(100)).collect()
        };
        assert_eq!(first, second);
        let other: Vec<usize> = {
            let mut s = c2.split(6);
            (0..8).map(|_| s.choose(100)).collect()
        };
        assert_ne!(first, other);
    }

    #[test]
    fn indexed_enumerates_mixed_radix() {
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..12 {
            let mut c = IndexedChoices::new(i);
            let a = c.choose(3);
            let b = c.split(0).choose(4);
            assert!(c.exhausted());
            assert_eq!(c.consumed(), 12);
            seen.insert((a, b));
        }
        assert_eq!(seen.len(), 12);
    }
}
