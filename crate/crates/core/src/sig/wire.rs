//! Key and signature files. All integers big-endian.
//!
//! Public key: `"EIDK" | version | 0x00 | <n>_64 | <k>_32 | Edges(E)`.
//! Secret key: `"EIDK" | version | 0x01 | <n>_64 | <k>_32 | colors (1 byte each) | seed (32)`.
//! Signature: a 20-byte header
//! `"EIDS" | version | variant | 0x0000 | <t>_32 | <n>_32 | <path hashes>_32`,
//! the 16-byte nonce, then the body:
//!
//! * plain: per round, the `n` commitments then `alpha_u | r_u | alpha_v | r_v`;
//! * merkle: per round, the root then the two openings; after all rounds, the
//!   authentication hashes in round order (`u` path then `v` path, or the
//!   shared opening's `own_u | own_v | common`).

use super::{
    MerklePaths, PublicKey, RoundOpenings, SecretKey, Signature, SignatureMerkle, SignaturePlain,
    Variant, NONCE_LEN,
};
use crate::commitment::{Opening, RANDOMNESS_LEN};
use crate::encoding::{ceil_log2, encode_edges, BitReader, Hash, HASH_LEN};
use crate::error::{Error, Result};
use crate::graph::{Coloring, Graph};

pub const KEY_MAGIC: &[u8; 4] = b"EIDK";
pub const SIG_MAGIC: &[u8; 4] = b"EIDS";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 20;

const PK_KIND: u8 = 0;
const SK_KIND: u8 = 1;
const OPENING_LEN: usize = 1 + RANDOMNESS_LEN;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(Error::malformed(
                self.pos,
                format!("truncated {what}: need {len} bytes, {} left", self.bytes.len() - self.pos),
            ));
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        Ok(self.take(N, what)?.try_into().unwrap())
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_be_bytes(self.array(what)?))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_be_bytes(self.array(what)?))
    }

    fn hash(&mut self, what: &str) -> Result<Hash> {
        self.array(what)
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::malformed(
                self.pos,
                format!("{} trailing bytes", self.bytes.len() - self.pos),
            ));
        }
        Ok(())
    }

    fn expect_magic(&mut self, magic: &[u8; 4]) -> Result<()> {
        let got = self.take(4, "magic")?;
        if got != magic {
            return Err(Error::malformed(0, format!("bad magic {got:02x?}")));
        }
        let version = self.u8("version")?;
        if version != VERSION {
            return Err(Error::malformed(4, format!("unsupported version {version}")));
        }
        Ok(())
    }
}

fn key_header(kind: u8, n: usize, k: usize) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(KEY_MAGIC);
    out.push(VERSION);
    out.push(kind);
    out.extend_from_slice(&(n as u64).to_be_bytes());
    out.extend_from_slice(&(k as u32).to_be_bytes());
    out
}

fn read_key_header(r: &mut Reader<'_>, kind: u8) -> Result<(usize, usize)> {
    r.expect_magic(KEY_MAGIC)?;
    let got = r.u8("key kind")?;
    if got != kind {
        return Err(Error::malformed(5, format!("expected key kind {kind}, found {got}")));
    }
    let at = r.pos;
    let n = usize::try_from(r.u64("n")?).map_err(|_| Error::malformed(at, "n too large"))?;
    let k = r.u32("k")? as usize;
    Ok((n, k))
}

impl PublicKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = key_header(PK_KIND, self.graph.n(), self.k);
        out.extend(encode_edges(&self.graph));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let (n, k) = read_key_header(&mut r, PK_KIND)?;
        let at = r.pos;
        let m = r.u64("edge count")?;
        let width = ceil_log2(n);
        let bits = m
            .checked_mul(2 * u64::from(width))
            .ok_or_else(|| Error::malformed(at, "edge count overflows"))?;
        let packed = r.take(bits.div_ceil(8) as usize, "edge list")?;
        r.finish()?;
        let mut bits = BitReader::new(packed);
        let mut edges = Vec::with_capacity(m as usize);
        for i in 0..m {
            let u = bits.read(width).unwrap() as usize;
            let v = bits.read(width).unwrap() as usize;
            let canonical = u < v && v < n && edges.last().is_none_or(|&last| last < (u, v));
            if !canonical {
                return Err(Error::malformed(at + 8, format!("edge {i} ({u}, {v}) out of canonical order")));
            }
            edges.push((u, v));
        }
        let pad = (packed.len() * 8 - bits.bit_position()) as u32;
        if bits.read(pad) != Some(0) {
            return Err(Error::malformed(bytes.len() - 1, "nonzero padding bits"));
        }
        let graph = Graph::new(n, edges)?;
        PublicKey::new(graph, k).map_err(|e| Error::malformed(6, e.to_string()))
    }
}

impl SecretKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = key_header(SK_KIND, self.coloring.len(), self.coloring.k());
        out.extend(self.coloring.colors().iter().map(|&c| c as u8));
        out.extend_from_slice(&self.master_seed);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let (n, k) = read_key_header(&mut r, SK_KIND)?;
        if !(1..=super::MAX_K).contains(&k) {
            return Err(Error::malformed(14, format!("k = {k} out of range")));
        }
        let at = r.pos;
        let colors: Vec<usize> = r.take(n, "coloring")?.iter().map(|&c| c as usize).collect();
        let coloring = Coloring::new(colors, k).map_err(|e| Error::malformed(at, e.to_string()))?;
        let master_seed = r.array("master seed")?;
        r.finish()?;
        Ok(SecretKey {
            coloring,
            master_seed,
        })
    }
}

fn push_opening(out: &mut Vec<u8>, o: &Opening) {
    out.push(o.alpha);
    out.extend_from_slice(&o.randomness);
}

fn read_opening(r: &mut Reader<'_>) -> Result<Opening> {
    Ok(Opening {
        alpha: r.u8("color")?,
        randomness: r.array("randomness")?,
    })
}

fn read_openings(r: &mut Reader<'_>) -> Result<RoundOpenings> {
    Ok(RoundOpenings {
        u: read_opening(r)?,
        v: read_opening(r)?,
    })
}

fn sig_header(variant: Variant, t: usize, n: usize, path_hashes: usize, nonce: &[u8; NONCE_LEN]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(SIG_MAGIC);
    out.push(VERSION);
    out.push(variant as u8);
    out.extend_from_slice(&[0, 0]);
    out.extend_from_slice(&(t as u32).to_be_bytes());
    out.extend_from_slice(&(n as u32).to_be_bytes());
    // At most 2 t ceil(log2 n) with t and n below 2^32; practical sizes fit.
    let path_hashes = u32::try_from(path_hashes).expect("path hash count fits 32 bits");
    out.extend_from_slice(&path_hashes.to_be_bytes());
    out.extend_from_slice(nonce);
    out
}

impl SignaturePlain {
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.commitments.first().map_or(0, Vec::len);
        let mut out = sig_header(Variant::Plain, self.openings.len(), n, 0, &self.nonce);
        for (commits, open) in self.commitments.iter().zip(&self.openings) {
            commits.iter().for_each(|c| out.extend_from_slice(c));
            push_opening(&mut out, &open.u);
            push_opening(&mut out, &open.v);
        }
        out
    }
}

impl SignatureMerkle {
    pub fn to_bytes(&self, n: usize) -> Vec<u8> {
        let mut out = sig_header(self.variant(), self.roots.len(), n, self.path_hash_count(), &self.nonce);
        for (root, open) in self.roots.iter().zip(&self.openings) {
            out.extend_from_slice(root);
            push_opening(&mut out, &open.u);
            push_opening(&mut out, &open.v);
        }
        match &self.paths {
            MerklePaths::Separate(paths) => {
                for (pu, pv) in paths {
                    pu.iter().chain(pv).for_each(|h| out.extend_from_slice(h));
                }
            }
            MerklePaths::Shared(pool) => pool.iter().for_each(|h| out.extend_from_slice(h)),
        }
        out
    }
}

impl Signature {
    /// Serialize; `n` is recorded in the header (Merkle bodies do not imply it).
    pub fn to_bytes(&self, n: usize) -> Vec<u8> {
        match self {
            Signature::Plain(s) => s.to_bytes(),
            Signature::Merkle(s) => s.to_bytes(n),
        }
    }

    /// Parse a signature file; returns the signature and the header's `n`.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Self, usize)> {
        let mut r = Reader::new(bytes);
        r.expect_magic(SIG_MAGIC)?;
        let vb = r.u8("variant")?;
        let variant = Variant::from_byte(vb).ok_or_else(|| Error::malformed(5, format!("unknown variant {vb}")))?;
        if r.take(2, "flags")? != [0, 0] {
            return Err(Error::malformed(6, "nonzero flags"));
        }
        let t = r.u32("t")? as usize;
        let n = r.u32("n")? as usize;
        let path_hashes = r.u32("path hash count")? as usize;
        if t == 0 {
            return Err(Error::malformed(8, "zero rounds"));
        }
        if n < 2 {
            return Err(Error::malformed(12, format!("n = {n} too small")));
        }
        let depth = ceil_log2(n) as usize;
        // Each shared opening carries between D - 1 and 2D - 2 hashes.
        let expected_paths = match variant {
            Variant::Plain => 0..=0,
            Variant::Merkle => 2 * t * depth..=2 * t * depth,
            Variant::MerkleShared => t * (depth - 1)..=t * (2 * depth - 2),
        };
        if !expected_paths.contains(&path_hashes) {
            return Err(Error::malformed(16, format!("path hash count {path_hashes} impossible for t = {t}, n = {n}")));
        }
        let nonce = r.array("nonce")?;
        let per_round_fixed = match variant {
            Variant::Plain => n.checked_mul(HASH_LEN).map(|c| c + 2 * OPENING_LEN),
            _ => Some(HASH_LEN + 2 * OPENING_LEN),
        };
        let fixed = per_round_fixed
            .and_then(|p| p.checked_mul(t))
            .filter(|&f| f <= r.remaining())
            .ok_or_else(|| Error::malformed(r.pos, "truncated signature body"))?;
        let sig = match variant {
            Variant::Plain => {
                let mut commitments = Vec::with_capacity(t);
                let mut openings = Vec::with_capacity(t);
                for _ in 0..t {
                    commitments.push((0..n).map(|_| r.hash("commitment")).collect::<Result<Vec<_>>>()?);
                    openings.push(read_openings(&mut r)?);
                }
                Signature::Plain(SignaturePlain {
                    nonce,
                    commitments,
                    openings,
                })
            }
            Variant::Merkle | Variant::MerkleShared => {
                let mut roots = Vec::with_capacity(t);
                let mut openings = Vec::with_capacity(t);
                for _ in 0..t {
                    roots.push(r.hash("root")?);
                    openings.push(read_openings(&mut r)?);
                }
                let need = path_hashes * HASH_LEN;
                if r.remaining() != need {
                    return Err(Error::malformed(
                        r.pos,
                        format!("expected {need} bytes of paths, found {}", r.remaining()),
                    ));
                }
                let paths = if variant == Variant::Merkle {
                    let mut read_path = || (0..depth).map(|_| r.hash("sibling")).collect::<Result<Vec<_>>>();
                    let mut paths = Vec::with_capacity(t);
                    for _ in 0..t {
                        let pu = read_path()?;
                        let pv = read_path()?;
                        paths.push((pu, pv));
                    }
                    MerklePaths::Separate(paths)
                } else {
                    MerklePaths::Shared((0..path_hashes).map(|_| r.hash("sibling")).collect::<Result<_>>()?)
                };
                Signature::Merkle(SignatureMerkle {
                    nonce,
                    roots,
                    openings,
                    paths,
                })
            }
        };
        debug_assert!(fixed <= bytes.len());
        r.finish()?;
        Ok((sig, n))
    }
}
