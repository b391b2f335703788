//! Hash commitment `f(alpha, r) = SHA-256("Commit-v1" || <alpha>_32 || r)`.
//!
//! Hiding is only heuristic for a hash commitment; binding rests on collision
//! resistance. Any statistically hiding, binding commitment could be dropped
//! in behind [`commit`] and [`verify_opening`].

use crate::encoding::{core_hash, Hash};
use crate::error::{Error, Result};

pub const COMMIT_TAG: &[u8] = b"Commit-v1";

/// Randomness and digest lengths in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommitmentParams {
    pub r_bits: usize,
    pub s_bits: usize,
}

impl Default for CommitmentParams {
    fn default() -> Self {
        CommitmentParams {
            r_bits: 128,
            s_bits: 256,
        }
    }
}

/// Length of the commitment randomness in bytes.
pub const RANDOMNESS_LEN: usize = 16;

pub type Randomness = [u8; RANDOMNESS_LEN];

/// A revealed `(alpha, r)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Opening {
    pub alpha: u8,
    pub randomness: Randomness,
}

impl Opening {
    pub fn commit(&self) -> Hash {
        commit_fixed(self.alpha, &self.randomness)
    }
}

fn commit_fixed(alpha: u8, randomness: &Randomness) -> Hash {
    core_hash(&[COMMIT_TAG, &u32::from(alpha).to_be_bytes(), randomness])
}

/// Commit to color `alpha` with `randomness` (must be 16 bytes).
pub fn commit(alpha: u8, randomness: &[u8]) -> Result<Hash> {
    let r: &Randomness = randomness
        .try_into()
        .map_err(|_| Error::BadRandomnessLength {
            expected: RANDOMNESS_LEN,
            got: randomness.len(),
        })?;
    Ok(commit_fixed(alpha, r))
}

pub fn verify_opening(digest: &[u8], opening: &Opening) -> bool {
    digest == opening.commit()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    #[test]
    fn deterministic() {
        let r = [7u8; 16];
        assert_eq!(commit(2, &r).unwrap(), commit(2, &r).unwrap());
    }

    #[test]
    fn golden_zero_commitment() {
        let digest = commit(0, &[0u8; 16]).unwrap();
        assert_eq!(
            hex(&digest),
            "7a711c9ee650c04a84fc3c9de1e0f6ce1bbd76ae5e14c97d3f638cf9191a60bc"
        );
    }

    fn hex(b: &[u8]) -> String {
        b.iter().map(|x| format!("{x:02x}")).collect()
    }

    #[test]
    fn bad_length() {
        assert_eq!(
            commit(0, &[0u8; 15]),
            Err(Error::BadRandomnessLength {
                expected: 16,
                got: 15
            })
        );
    }

    #[test]
    fn distinct_randomness_distinct_digests() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut seen = HashSet::new();
        for _ in 0..10_000 {
            let r: Randomness = rng.gen();
            seen.insert(commit(1, &r).unwrap());
        }
        assert_eq!(seen.len(), 10_000);
    }

    #[test]
    fn openings() {
        let r = [0x5au8; 16];
        let c = commit(2, &r).unwrap();
        assert!(verify_opening(&c, &Opening { alpha: 2, randomness: r }));
        assert!(!verify_opening(&c, &Opening { alpha: 3, randomness: r }));
        for bit in 0..128 {
            let mut r2 = r;
            r2[bit / 8] ^= 0x80 >> (bit % 8);
            assert!(!verify_opening(&c, &Opening { alpha: 2, randomness: r2 }));
        }
        assert!(!verify_opening(&c[..31], &Opening { alpha: 2, randomness: r }));
    }

    #[test]
    fn single_bit_tamper_sweep() {
        let r = [0x13u8; 16];
        let alpha = 5u8;
        let c = commit(alpha, &r).unwrap();
        for bit in 0..8 {
            let o = Opening { alpha: alpha ^ (1 << bit), randomness: r };
            assert!(!verify_opening(&c, &o));
        }
        for bit in 0..256 {
            let mut d = c;
            d[bit / 8] ^= 0x80 >> (bit % 8);
            assert!(!verify_opening(&d, &Opening { alpha, randomness: r }));
        }
    }
}
