//! Deterministic RNG substreams.
//!
//! Every random quantity in an experiment is drawn from a stream derived
//! from one master seed and a human-readable label (cell, replicate, chain).
//! Streams are stable across platforms and independent of execution order,
//! so replicates can run in parallel without changing any draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a, used as a stable label hash. Not cryptographic; collisions across
/// the handful of labels in one experiment are not a practical concern.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Derive the substream seed for a label under a master seed.
pub fn substream_seed(master: u64, label: &str) -> u64 {
    let mut bytes = Vec::with_capacity(8 + label.len());
    bytes.extend_from_slice(&master.to_le_bytes());
    bytes.extend_from_slice(label.as_bytes());
    fnv1a(&bytes)
}

/// A fresh deterministic generator for (master seed, label).
pub fn substream(master: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(master, label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_label_same_stream() {
        let a: Vec<u64> = (0..4).map(|_| substream(42, "x/1").random()).collect();
        let b: Vec<u64> = {
            let mut rng = substream(42, "x/1");
            (0..4).map(|_| rng.random()).collect()
        };
        // First draws of fresh streams with the same label agree...
        assert_eq!(a[0], b[0]);
        // ...and a persistent stream keeps advancing.
        assert_ne!(b[0], b[1]);
    }

    #[test]
    fn labels_and_masters_separate_streams() {
        assert_ne!(substream_seed(42, "a"), substream_seed(42, "b"));
        assert_ne!(substream_seed(42, "a"), substream_seed(43, "a"));
    }
}
