//! Deterministic 64-bit PRNG used by every randomized operation.
//!
//! The generator is SplitMix64. It is pinned here (rather than pulled from a
//! crate) so that seeded outputs stay byte-identical across toolchain and
//! dependency upgrades. Sub-streams are split per left node: the substream
//! seed is `mix(seed ^ fnv1a(len, bits))`, which keeps graph generation
//! stable under reordering and parallel generation.

use crate::bits::BitString;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n`, unbiased via rejection. Panics if n == 0.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        if n.is_power_of_two() {
            return self.next_u64() & (n - 1);
        }
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    pub fn below_usize(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    /// Uniform bit string of the given width.
    pub fn bits(&mut self, width: usize) -> BitString {
        let mut out = BitString::empty();
        for _ in 0..width {
            out.push((self.next_u64() & 1) as u8);
        }
        out
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below_usize(i + 1);
            xs.swap(i, j);
        }
    }

    /// `count` distinct indices drawn from `0..n`, in sorted order.
    pub fn distinct_sorted(&mut self, n: u64, count: usize) -> Vec<u64> {
        assert!(count as u64 <= n);
        // Floyd's sampling keeps the draw count at `count` regardless of n.
        let mut chosen = std::collections::BTreeSet::new();
        for j in (n - count as u64)..n {
            let t = self.below(j + 1);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        chosen.into_iter().collect()
    }
}

fn fnv1a(len: u64, bits: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for byte in len.to_be_bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    for &b in bits {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Per-node substream of a graph-level seed.
pub fn substream(seed: u64, node: &BitString) -> SplitMix64 {
    SplitMix64::new(mix(seed ^ fnv1a(node.len() as u64, node.bits())))
}
