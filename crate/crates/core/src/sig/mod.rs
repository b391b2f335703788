//! The signature scheme: key generation, per-round color permutations,
//! Fiat–Shamir signing and verification (plain and Merkle-compressed),
//! size accounting, and the key/signature file formats.

mod sign;
mod size;
mod wire;

use hmac::{Hmac, Mac};
use rand::Rng;
use sha2::Sha256;

use crate::error::{Error, Result};
use crate::graph::{generate_planted, is_valid_coloring, Coloring, Graph, PartitionSpec};

pub use sign::{
    sign_merkle, sign_merkle_unchecked, sign_merkle_with, sign_plain, sign_plain_with,
    verify_merkle, verify_plain, MerklePaths, Rejection, RoundOpenings, Signature,
    SignatureMerkle, SignaturePlain, Variant,
};
pub use size::{signature_size_bits, SizeParams};
pub use wire::{HEADER_LEN, KEY_MAGIC, SIG_MAGIC, VERSION};

/// Hash output length in bits.
pub const LAMBDA_BITS: u64 = 256;
/// Commitment digest length in bits.
pub const S_BITS: u64 = 256;
/// Commitment randomness length in bits.
pub const R_BITS: u64 = 128;
/// Wire width of a revealed color.
pub const ALPHA_BITS: u64 = 8;

pub const NONCE_LEN: usize = 16;
pub type Nonce = [u8; NONCE_LEN];
pub type MasterSeed = [u8; 32];

/// Largest palette representable in an 8-bit color.
pub const MAX_K: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub graph: Graph,
    pub k: usize,
}

#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey {
    pub coloring: Coloring,
    pub master_seed: MasterSeed,
}

impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SecretKey")
            .field("k", &self.coloring.k())
            .field("n", &self.coloring.len())
            .finish_non_exhaustive()
    }
}

impl PublicKey {
    pub fn new(graph: Graph, k: usize) -> Result<Self> {
        if !(3..=MAX_K).contains(&k) {
            return Err(Error::ParameterRange(format!("k = {k} must lie in 3..=256")));
        }
        if graph.m() == 0 {
            return Err(Error::EmptyEdgeSet);
        }
        Ok(PublicKey { graph, k })
    }
}

impl SecretKey {
    /// Check that this key is a valid coloring of `pk`'s graph.
    pub fn matches(&self, pk: &PublicKey) -> Result<()> {
        if self.coloring.k() != pk.k {
            return Err(Error::ParameterRange(format!(
                "secret key has {} colors, public key {}",
                self.coloring.k(),
                pk.k
            )));
        }
        let (valid, conflicts) = is_valid_coloring(&pk.graph, &self.coloring)?;
        if !valid {
            return Err(Error::InvalidColoring {
                conflicts: conflicts.len(),
            });
        }
        Ok(())
    }
}

/// Generate a planted instance with balanced classes. Draws again while the
/// graph comes out edgeless.
pub fn keygen<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    density: f64,
    rng: &mut R,
) -> Result<(PublicKey, SecretKey)> {
    if k < 3 || n < k || k > MAX_K {
        return Err(Error::ParameterRange(format!(
            "need 3 <= k <= min(n, 256), got n = {n}, k = {k}"
        )));
    }
    if density <= 0.0 {
        return Err(Error::ParameterRange(format!(
            "density {density} yields no edges"
        )));
    }
    let spec = PartitionSpec::balanced(n, k)?;
    for _ in 0..1000 {
        let (graph, coloring) = generate_planted(&spec, density, rng)?;
        if graph.m() == 0 {
            continue;
        }
        let master_seed: MasterSeed = rng.gen();
        return Ok((
            PublicKey { graph, k },
            SecretKey {
                coloring,
                master_seed,
            },
        ));
    }
    Err(Error::ParameterRange(format!(
        "density {density} kept producing edgeless graphs"
    )))
}

/// Per-round color permutation from HMAC-SHA256 keyed with the master seed.
/// Each color gets the 128-bit tag `HMAC(nonce || <round>_32 || <color>_32)`;
/// colors are ranked by tag (ties by color) and `result[c]` is the rank of `c`.
pub fn derive_round_permutation(
    master_seed: &MasterSeed,
    nonce: &Nonce,
    round: u32,
    k: usize,
) -> Vec<usize> {
    let base = <Hmac<Sha256> as Mac>::new_from_slice(master_seed).expect("hmac accepts any key");
    let mut tagged: Vec<(u128, usize)> = (0..k)
        .map(|c| {
            let mut mac = base.clone();
            mac.update(nonce);
            mac.update(&round.to_be_bytes());
            mac.update(&(c as u32).to_be_bytes());
            let out = mac.finalize().into_bytes();
            let tag = u128::from_be_bytes(out[..16].try_into().unwrap());
            (tag, c)
        })
        .collect();
    tagged.sort_unstable();
    let mut perm = vec![0; k];
    for (rank, &(_, c)) in tagged.iter().enumerate() {
        perm[c] = rank;
    }
    perm
}
