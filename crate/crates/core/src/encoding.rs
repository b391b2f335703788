//! Canonical byte encodings shared by signer and verifier.
//!
//! All integers are big-endian. Vertex indices are packed MSB-first into
//! `ceil(log2 n)` bits; the edge block is zero-padded to a byte boundary at
//! its end only.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// 256-bit digest of the core hash.
pub type Hash = [u8; 32];

pub const HASH_LEN: usize = 32;

/// Domain-separation tag opening every Fiat–Shamir context.
pub const CONTEXT_TAG: &[u8] = b"FS-GkColor-v1";

/// SHA-256 over the concatenation of `parts`.
pub fn core_hash(parts: &[&[u8]]) -> Hash {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part);
    }
    hasher.finalize().into()
}

/// `ceil(log2 n)`, with `0` for `n <= 1`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// MSB-first bit writer.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    used: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append the low `width` bits of `value`, most significant first.
    pub fn write(&mut self, value: u64, width: u32) -> Result<()> {
        if width > 64 || (width < 64 && value >> width != 0) {
            return Err(Error::ValueTooWide { value, width });
        }
        for bit in (0..width).rev() {
            if self.used.is_multiple_of(8) {
                self.bytes.push(0);
            }
            if (value >> bit) & 1 == 1 {
                let last = self.bytes.len() - 1;
                self.bytes[last] |= 0x80 >> (self.used % 8);
            }
            self.used += 1;
        }
        Ok(())
    }

    pub fn write_field(&mut self, field: BitField) -> Result<()> {
        self.write(field.value, field.width)
    }

    pub fn bit_len(&self) -> u64 {
        self.used as u64
    }

    /// Zero-pad to a byte boundary and return the bytes.
    pub fn finish(self) -> Vec<u8> {
        self.bytes
    }
}

/// MSB-first bit reader over a byte slice, the inverse of [`BitWriter`].
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    /// Read `width` bits; `None` past the end.
    pub fn read(&mut self, width: u32) -> Option<u64> {
        if width > 64 || self.pos + width as usize > self.bytes.len() * 8 {
            return None;
        }
        let mut value = 0u64;
        for _ in 0..width {
            let bit = (self.bytes[self.pos / 8] >> (7 - self.pos % 8)) & 1;
            value = (value << 1) | u64::from(bit);
            self.pos += 1;
        }
        Some(value)
    }

    pub fn bit_position(&self) -> usize {
        self.pos
    }
}

/// A value together with its fixed bit width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitField {
    pub value: u64,
    pub width: u32,
}

impl BitField {
    /// Bits as a `0`/`1` string, for diagnostics and tests.
    pub fn to_bit_string(self) -> String {
        (0..self.width)
            .rev()
            .map(|b| if (self.value >> b) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// `enc(v)`: the vertex index in `ceil(log2 n)` bits.
pub fn encode_vertex(v: usize, n: usize) -> Result<BitField> {
    if v >= n {
        return Err(Error::IndexOutOfRange { index: v, len: n });
    }
    Ok(BitField {
        value: v as u64,
        width: ceil_log2(n),
    })
}

/// `enc(v)` left-padded with zero bits to whole bytes, as used in leaf hashes.
pub fn vertex_bytes(v: usize, n: usize) -> Vec<u8> {
    let len = (ceil_log2(n) as usize).div_ceil(8).max(1);
    let be = (v as u64).to_be_bytes();
    be[8 - len.min(8)..].to_vec()
}

/// `Edges(E) = <m>_64 || enc(u) || enc(v) || ...`, padded at the end.
pub fn encode_edges(g: &Graph) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + g.m() * 2);
    out.extend_from_slice(&(g.m() as u64).to_be_bytes());
    let width = ceil_log2(g.n());
    let mut bits = BitWriter::new();
    for &(u, v) in g.edges() {
        // Endpoints of a canonical graph are < n, so they always fit.
        bits.write(u as u64, width).expect("vertex fits width");
        bits.write(v as u64, width).expect("vertex fits width");
    }
    out.extend(bits.finish());
    out
}

/// `Encode(G, k, X_0..X_{t-1}, M)`.
pub fn encode_context<P: AsRef<[u8]>>(
    g: &Graph,
    k: usize,
    payloads: &[P],
    message: &[u8],
) -> Result<Vec<u8>> {
    let k = u32::try_from(k).map_err(|_| Error::Overflow("k exceeds 32 bits"))?;
    let t = u32::try_from(payloads.len()).map_err(|_| Error::Overflow("t exceeds 32 bits"))?;
    let payload_len: usize = payloads.iter().map(|p| p.as_ref().len()).sum();
    let mut out = Vec::with_capacity(
        CONTEXT_TAG.len() + 8 + 4 + 8 + 8 + g.m() * 2 + 4 + payload_len + 8 + message.len(),
    );
    out.extend_from_slice(CONTEXT_TAG);
    out.extend_from_slice(&(g.n() as u64).to_be_bytes());
    out.extend_from_slice(&k.to_be_bytes());
    out.extend_from_slice(&(g.m() as u64).to_be_bytes());
    out.extend(encode_edges(g));
    out.extend_from_slice(&t.to_be_bytes());
    for p in payloads {
        out.extend_from_slice(p.as_ref());
    }
    out.extend_from_slice(&(message.len() as u64).to_be_bytes());
    out.extend_from_slice(message);
    Ok(out)
}
