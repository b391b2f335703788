use super::{Signature, SignatureMerkle, SignaturePlain, Variant, ALPHA_BITS, LAMBDA_BITS, R_BITS, S_BITS};
use crate::encoding::ceil_log2;

/// Parameters of the size formulas, all in bits except `n` and `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeParams {
    pub n: u64,
    pub t: u64,
    pub lambda: u64,
    pub s: u64,
    pub r: u64,
    pub alpha: u64,
}

impl SizeParams {
    /// The scheme's fixed widths: 256-bit hashes and digests, 128-bit
    /// randomness, 8-bit colors.
    pub fn standard(n: u64, t: u64) -> Self {
        SizeParams {
            n,
            t,
            lambda: LAMBDA_BITS,
            s: S_BITS,
            r: R_BITS,
            alpha: ALPHA_BITS,
        }
    }
}

/// Signature body size in bits.
///
/// * plain: `t n s + 2t(alpha + r)`
/// * merkle: `t lambda + 2t(alpha + r + lambda ceil(log2 n))`
/// * merkle-shared: `t lambda + 2t(alpha + r) + t lambda (2 ceil(log2 n) - s_bar)`,
///   rounded to the nearest bit, where `s_bar` is the mean number of sibling
///   hashes saved per round.
pub fn signature_size_bits(p: SizeParams, variant: Variant, s_bar: f64) -> u64 {
    let depth = u64::from(ceil_log2(p.n as usize));
    let openings = 2 * p.t * (p.alpha + p.r);
    match variant {
        Variant::Plain => p.t * p.n * p.s + openings,
        Variant::Merkle => p.t * p.lambda + 2 * p.t * (p.alpha + p.r + p.lambda * depth),
        Variant::MerkleShared => {
            let paths = (p.t * p.lambda) as f64 * (2.0 * depth as f64 - s_bar);
            p.t * p.lambda + openings + paths.round() as u64
        }
    }
}

impl SignaturePlain {
    pub fn body_bits(&self) -> u64 {
        let commitments: usize = self.commitments.iter().map(Vec::len).sum();
        commitments as u64 * S_BITS + 2 * self.openings.len() as u64 * (ALPHA_BITS + R_BITS)
    }
}

impl SignatureMerkle {
    pub fn body_bits(&self) -> u64 {
        let t = self.roots.len() as u64;
        t * LAMBDA_BITS + 2 * t * (ALPHA_BITS + R_BITS) + self.path_hash_count() as u64 * LAMBDA_BITS
    }

    /// Mean sibling hashes saved per round against two full paths, for a tree
    /// over `n` leaves.
    pub fn mean_saved(&self, n: usize) -> f64 {
        let t = self.roots.len();
        let full = 2 * t * ceil_log2(n) as usize;
        (full - self.path_hash_count()) as f64 / t as f64
    }
}

impl Signature {
    pub fn body_bits(&self) -> u64 {
        match self {
            Signature::Plain(s) => s.body_bits(),
            Signature::Merkle(s) => s.body_bits(),
        }
    }
}
