//! Seeded, splittable random streams.
//!
//! A stream is identified by a 64-bit key. Children are derived from the
//! parent's key and a child index only, never from the parent's consumed
//! state, so replication `r` sees the same numbers regardless of which
//! worker runs it or in which order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of a byte string (FNV-1a followed by a mix), used to
/// key experiment cells by their description.
pub fn hash_label(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    mix64(h)
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    key: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream { key: seed, rng: ChaCha8Rng::seed_from_u64(mix64(seed)) }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Independent child stream number `index`.
    pub fn child(&self, index: u64) -> RandomStream {
        RandomStream::new(mix64(self.key ^ mix64(index.wrapping_add(0x5851_F42D_4C95_7F2D))))
    }

    /// Stream for replication `rep` of the experiment cell `cell`.
    pub fn for_replication(master_seed: u64, cell: u64, rep: u64) -> RandomStream {
        RandomStream::new(master_seed).child(cell).child(rep)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_key_same_numbers() {
        let mut a = RandomStream::new(42).child(3);
        let mut b = RandomStream::new(42).child(3);
        let xa: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_eq!(xa, xb);
    }

    #[test]
    fn children_ignore_parent_consumption() {
        let mut parent = RandomStream::new(7);
        let before = parent.child(1).gen::<u64>();
        let _ = parent.gen::<u64>();
        assert_eq!(parent.child(1).gen::<u64>(), before);
    }

    #[test]
    fn siblings_differ() {
        let p = RandomStream::new(7);
        assert_ne!(p.child(0).gen::<u64>(), p.child(1).gen::<u64>());
        assert_ne!(hash_label("a"), hash_label("b"));
    }
}
