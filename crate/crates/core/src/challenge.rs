//! Fiat–Shamir challenge derivation: map a digest to `t` edge indices,
//! uniformly and with replacement, by rejection sampling.

use crate::encoding::{core_hash, Hash, HASH_LEN};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

pub const EDGE_DERIVE_TAG: &[u8] = b"EdgeDerive-v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChallengeSet {
    pub edges: Vec<Edge>,
    pub indices: Vec<usize>,
    /// Rejected blocks before acceptance, per challenge index.
    pub rejection_counts: Vec<u32>,
}

/// Derive `t` challenge edges of `g` from `digest`.
pub fn hash_to_edges(digest: &Hash, t: usize, g: &Graph) -> Result<ChallengeSet> {
    derive(digest, t, g.edges(), HASH_LEN)
}

/// `2^(8 * width) mod m`.
fn pow2_mod(width: usize, m: u64) -> u64 {
    let m = m as u128;
    let mut r = 1u128 % m;
    for _ in 0..8 * width {
        r = (r << 1) % m;
    }
    r as u64
}

fn mod_small(bytes: &[u8], m: u64) -> u64 {
    let m = m as u128;
    bytes
        .iter()
        .fold(0u128, |acc, &b| ((acc << 8) | b as u128) % m) as u64
}

/// `x >= 2^(8w) - r`, i.e. the bitwise complement of `x` is below `r`.
fn in_biased_tail(x: &[u8], r: u64) -> bool {
    let split = x.len().saturating_sub(8);
    if x[..split].iter().any(|&b| b != 0xff) {
        return false;
    }
    let low = x[split..]
        .iter()
        .fold(0u64, |acc, &b| (acc << 8) | u64::from(!b));
    low < r
}

/// Rejection sampling on the leading `width` bytes of each block; the
/// protocol always uses the full digest width.
pub(crate) fn derive(digest: &Hash, t: usize, edges: &[Edge], width: usize) -> Result<ChallengeSet> {
    if edges.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    u32::try_from(t).map_err(|_| Error::Overflow("t exceeds 32 bits"))?;
    let m = edges.len() as u64;
    let tail = pow2_mod(width, m);
    let mut out = ChallengeSet {
        edges: Vec::with_capacity(t),
        indices: Vec::with_capacity(t),
        rejection_counts: Vec::with_capacity(t),
    };
    for i in 0..t as u32 {
        let mut j = 0u32;
        let idx = loop {
            let block = core_hash(&[EDGE_DERIVE_TAG, digest, &i.to_be_bytes(), &j.to_be_bytes()]);
            let x = &block[..width];
            if !in_biased_tail(x, tail) {
                break mod_small(x, m) as usize;
            }
            j = j.checked_add(1).ok_or(Error::Overflow("rejection counter"))?;
        };
        out.edges.push(edges[idx]);
        out.indices.push(idx);
        out.rejection_counts.push(j);
    }
    Ok(out)
}
