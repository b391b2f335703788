//! Binary Merkle tree over per-vertex commitments.
//!
//! Leaves are `H(0x00 || enc(v) || c_v)`, padded to the next power of two with
//! `H(0x02 || "pad")`; internal nodes are `H(0x01 || left || right)`. Every
//! authentication path therefore has exactly `ceil(log2 n)` siblings, and the
//! left/right order at level `b` is bit `b` of the leaf index.

use crate::encoding::{ceil_log2, core_hash, vertex_bytes, Hash};
use crate::error::{Error, Result};

const LEAF_PREFIX: u8 = 0x00;
const NODE_PREFIX: u8 = 0x01;
const PAD_PREFIX: u8 = 0x02;

pub fn leaf_hash(v: usize, n: usize, commitment: &Hash) -> Hash {
    core_hash(&[&[LEAF_PREFIX], &vertex_bytes(v, n), commitment])
}

pub fn pad_leaf() -> Hash {
    core_hash(&[&[PAD_PREFIX], b"pad"])
}

pub fn node_hash(left: &Hash, right: &Hash) -> Hash {
    core_hash(&[&[NODE_PREFIX], left, right])
}

/// Combine `node` at `level` with its sibling, ordering by bit `level` of `index`.
fn parent(index: usize, level: u32, node: &Hash, sibling: &Hash) -> Hash {
    if (index >> level) & 1 == 0 {
        node_hash(node, sibling)
    } else {
        node_hash(sibling, node)
    }
}

/// Hash `node` (which sits at `start_level` on `index`'s path) up through `siblings`.
fn fold(index: usize, start_level: u32, mut node: Hash, siblings: &[Hash]) -> Hash {
    for (offset, sib) in siblings.iter().enumerate() {
        node = parent(index, start_level + offset as u32, &node, sib);
    }
    node
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleTree {
    leaf_count: usize,
    /// `levels[0]` holds the padded leaves, the last level the root.
    levels: Vec<Vec<Hash>>,
}

/// Sibling hashes from the leaf level up to just below the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthPath {
    pub leaf_index: usize,
    pub siblings: Vec<Hash>,
}

/// Union of two authentication paths in one tree.
///
/// Let `h` be the height of the lowest common ancestor of `u` and `v`. Below
/// level `h - 1` each leaf keeps its own siblings; at level `h - 1` each
/// path's sibling is the other leaf's ancestor, recomputable from the other
/// opening, so it is not stored; from level `h` upward both paths need the
/// same siblings, which are stored once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedPath {
    pub u: usize,
    pub v: usize,
    pub own_u: Vec<Hash>,
    pub own_v: Vec<Hash>,
    pub common: Vec<Hash>,
}

/// Height of the lowest common ancestor of two distinct leaves.
pub fn lca_height(u: usize, v: usize) -> u32 {
    usize::BITS - (u ^ v).leading_zeros()
}

impl MerkleTree {
    pub fn build(commitments: &[Hash]) -> Result<Self> {
        let n = commitments.len();
        if n < 2 {
            return Err(Error::TooFewLeaves(n));
        }
        let width = n.next_power_of_two();
        let mut leaves: Vec<Hash> = commitments
            .iter()
            .enumerate()
            .map(|(v, c)| leaf_hash(v, n, c))
            .collect();
        leaves.resize(width, pad_leaf());
        let mut levels = vec![leaves];
        while levels.last().map_or(0, Vec::len) > 1 {
            let next = levels
                .last()
                .unwrap()
                .chunks_exact(2)
                .map(|pair| node_hash(&pair[0], &pair[1]))
                .collect();
            levels.push(next);
        }
        Ok(MerkleTree {
            leaf_count: n,
            levels,
        })
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn depth(&self) -> u32 {
        ceil_log2(self.leaf_count)
    }

    pub fn root(&self) -> Hash {
        self.levels[self.levels.len() - 1][0]
    }

    pub fn leaf(&self, v: usize) -> Hash {
        self.levels[0][v]
    }

    fn sibling(&self, index: usize, level: u32) -> Hash {
        self.levels[level as usize][(index >> level) ^ 1]
    }

    pub fn open(&self, v: usize) -> Result<AuthPath> {
        if v >= self.leaf_count {
            return Err(Error::IndexOutOfRange {
                index: v,
                len: self.leaf_count,
            });
        }
        Ok(AuthPath {
            leaf_index: v,
            siblings: (0..self.depth()).map(|l| self.sibling(v, l)).collect(),
        })
    }

    pub fn shared_open(&self, u: usize, v: usize) -> Result<SharedPath> {
        if u == v {
            return Err(Error::IdenticalIndices(u));
        }
        for x in [u, v] {
            if x >= self.leaf_count {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    len: self.leaf_count,
                });
            }
        }
        let h = lca_height(u, v);
        Ok(SharedPath {
            u,
            v,
            own_u: (0..h - 1).map(|l| self.sibling(u, l)).collect(),
            own_v: (0..h - 1).map(|l| self.sibling(v, l)).collect(),
            common: (h..self.depth()).map(|l| self.sibling(u, l)).collect(),
        })
    }
}

pub fn build_tree(commitments: &[Hash]) -> Result<MerkleTree> {
    MerkleTree::build(commitments)
}

/// Recompute the root from `(v, c)` and `path`, compare with `root`.
pub fn verify_path(root: &Hash, v: usize, n: usize, c: &Hash, path: &AuthPath) -> bool {
    if v >= n || path.leaf_index != v || path.siblings.len() != ceil_log2(n) as usize {
        return false;
    }
    fold(v, 0, leaf_hash(v, n, c), &path.siblings) == *root
}

impl SharedPath {
    /// Strictly shared siblings: levels at or above the LCA.
    pub fn shared_count(&self) -> usize {
        self.common.len()
    }

    /// Siblings saved against two full paths, counting the two that are
    /// recomputed from the openings.
    pub fn saved_count(&self) -> usize {
        self.common.len() + 2
    }

    pub fn hash_count(&self) -> usize {
        self.own_u.len() + self.own_v.len() + self.common.len()
    }

    /// Hashes in wire order: `own_u`, `own_v`, `common`.
    pub fn hashes(&self) -> impl Iterator<Item = &Hash> {
        self.own_u.iter().chain(&self.own_v).chain(&self.common)
    }

    /// Number of hashes a shared opening of `(u, v)` carries in a tree over `n` leaves.
    pub fn len_for(u: usize, v: usize, n: usize) -> usize {
        let h = lca_height(u, v) as usize;
        2 * (h - 1) + (ceil_log2(n) as usize - h)
    }

    /// Rebuild from a wire-order hash list; `hashes.len()` must equal [`Self::len_for`].
    pub fn from_hashes(u: usize, v: usize, n: usize, hashes: &[Hash]) -> Result<Self> {
        if u == v {
            return Err(Error::IdenticalIndices(u));
        }
        let d = ceil_log2(n) as usize;
        let h = lca_height(u, v) as usize;
        if h > d || hashes.len() != Self::len_for(u, v, n) {
            return Err(Error::ParameterRange(format!(
                "shared path for ({u}, {v}) over {n} leaves has wrong length {}",
                hashes.len()
            )));
        }
        Ok(SharedPath {
            u,
            v,
            own_u: hashes[..h - 1].to_vec(),
            own_v: hashes[h - 1..2 * (h - 1)].to_vec(),
            common: hashes[2 * (h - 1)..].to_vec(),
        })
    }

    fn lower_nodes(&self, n: usize, cu: &Hash, cv: &Hash) -> (Hash, Hash) {
        let a = fold(self.u, 0, leaf_hash(self.u, n, cu), &self.own_u);
        let b = fold(self.v, 0, leaf_hash(self.v, n, cv), &self.own_v);
        (a, b)
    }

    fn well_formed(&self, n: usize) -> bool {
        if self.u == self.v || self.u >= n || self.v >= n {
            return false;
        }
        let h = lca_height(self.u, self.v) as usize;
        let d = ceil_log2(n) as usize;
        h <= d && self.own_u.len() == h - 1 && self.own_v.len() == h - 1 && self.common.len() == d - h
    }

    /// Expand into the two full authentication paths.
    pub fn expand(&self, n: usize, cu: &Hash, cv: &Hash) -> Result<(AuthPath, AuthPath)> {
        if !self.well_formed(n) {
            return Err(Error::ParameterRange("malformed shared path".into()));
        }
        let (node_u, node_v) = self.lower_nodes(n, cu, cv);
        let full = |own: &[Hash], other: Hash| -> Vec<Hash> {
            own.iter()
                .copied()
                .chain(std::iter::once(other))
                .chain(self.common.iter().copied())
                .collect()
        };
        Ok((
            AuthPath {
                leaf_index: self.u,
                siblings: full(&self.own_u, node_v),
            },
            AuthPath {
                leaf_index: self.v,
                siblings: full(&self.own_v, node_u),
            },
        ))
    }
}

/// Verify both leaves of a shared opening against `root`.
pub fn verify_shared(root: &Hash, n: usize, path: &SharedPath, cu: &Hash, cv: &Hash) -> bool {
    if !path.well_formed(n) {
        return false;
    }
    let h = lca_height(path.u, path.v);
    let (node_u, node_v) = path.lower_nodes(n, cu, cv);
    let joined = parent(path.u, h - 1, &node_u, &node_v);
    fold(path.u, h, joined, &path.common) == *root
}

/// Mean savings per shared opening over all unordered pairs of distinct
/// leaves among `n`, as `(strictly shared, including the two recomputed)`.
pub fn expected_shared(n: usize) -> (f64, f64) {
    if n < 2 {
        return (0.0, 0.0);
    }
    let d = ceil_log2(n) as u64;
    let mut pairs = 0u64;
    let mut strict = 0u64;
    for h in 1..=d {
        let block = 1usize << h;
        let half = block / 2;
        let mut count = 0u64;
        let mut start = 0;
        while start < n {
            let left = half.min(n - start) as u64;
            let right = n.saturating_sub(start + half).min(half) as u64;
            count += left * right;
            start += block;
        }
        pairs += count;
        strict += count * (d - h);
    }
    let mean = strict as f64 / pairs as f64;
    (mean, mean + 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn commitments(n: usize) -> Vec<Hash> {
        (0..n).map(|i| core_hash(&[&(i as u64).to_be_bytes()])).collect()
    }

    #[test]
    fn two_leaves_identical_commitments() {
        let c = [9u8; 32];
        let t = build_tree(&[c, c]).unwrap();
        assert_ne!(t.leaf(0), t.leaf(1));
        assert_ne!(t.root(), t.leaf(0));
        assert_ne!(t.root(), t.leaf(1));
        assert_eq!(t.open(0).unwrap().siblings, vec![t.leaf(1)]);
    }

    #[test]
    fn too_few_leaves() {
        assert_eq!(build_tree(&[[0; 32]]), Err(Error::TooFewLeaves(1)));
    }

    #[test]
    fn padding_three_leaves() {
        let t = build_tree(&commitments(3)).unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(t.leaf(3), pad_leaf());
        assert_eq!(t.open(2).unwrap().siblings.len(), 2);
    }

    #[test]
    fn hand_built_four_leaf_path() {
        let cs = commitments(4);
        let t = build_tree(&cs).unwrap();
        let l: Vec<Hash> = (0..4).map(|v| leaf_hash(v, 4, &cs[v])).collect();
        let path = t.open(2).unwrap();
        assert_eq!(path.siblings, vec![l[3], node_hash(&l[0], &l[1])]);
        let root = node_hash(&node_hash(&l[0], &l[1]), &node_hash(&l[2], &l[3]));
        assert_eq!(t.root(), root);
    }

    #[test]
    fn all_paths_verify_seven_leaves() {
        let cs = commitments(7);
        let t = build_tree(&cs).unwrap();
        for v in 0..7 {
            assert!(verify_path(&t.root(), v, 7, &cs[v], &t.open(v).unwrap()));
        }
        assert!(t.open(7).is_err());
    }

    #[test]
    fn wrong_leaf_paths_rejected() {
        let cs = commitments(8);
        let t = build_tree(&cs).unwrap();
        for v in 0..8 {
            for w in 0..8 {
                if v == w {
                    continue;
                }
                let mut p = t.open(w).unwrap();
                assert!(!verify_path(&t.root(), v, 8, &cs[v], &p));
                p.leaf_index = v;
                assert!(!verify_path(&t.root(), v, 8, &cs[v], &p));
            }
        }
    }

    #[test]
    fn commitment_bit_flips_rejected() {
        let cs = commitments(5);
        let t = build_tree(&cs).unwrap();
        let p = t.open(3).unwrap();
        for bit in 0..256 {
            let mut c = cs[3];
            c[bit / 8] ^= 0x80 >> (bit % 8);
            assert!(!verify_path(&t.root(), 3, 5, &c, &p));
        }
    }

    #[test]
    fn root_depends_on_every_leaf() {
        let cs = commitments(16);
        let root = build_tree(&cs).unwrap().root();
        for i in 0..16 {
            let mut alt = cs.clone();
            alt[i][0] ^= 1;
            assert_ne!(build_tree(&alt).unwrap().root(), root);
        }
    }

    #[test]
    fn shared_counts_hand_tree() {
        let t = build_tree(&commitments(4)).unwrap();
        let s01 = t.shared_open(0, 1).unwrap();
        assert_eq!(s01.shared_count(), 1);
        assert_eq!(s01.hash_count(), 1);
        let s02 = t.shared_open(0, 2).unwrap();
        assert_eq!(s02.shared_count(), 0);
        assert_eq!(s02.hash_count(), 2);
        assert_eq!(t.shared_open(1, 1), Err(Error::IdenticalIndices(1)));
    }

    #[test]
    fn shared_paths_expand_and_verify() {
        for n in [2usize, 3, 5, 8, 13] {
            let cs = commitments(n);
            let t = build_tree(&cs).unwrap();
            for u in 0..n {
                for v in 0..n {
                    if u == v {
                        continue;
                    }
                    let s = t.shared_open(u, v).unwrap();
                    assert!(verify_shared(&t.root(), n, &s, &cs[u], &cs[v]));
                    let (pu, pv) = s.expand(n, &cs[u], &cs[v]).unwrap();
                    assert_eq!(pu, t.open(u).unwrap());
                    assert_eq!(pv, t.open(v).unwrap());
                    let flat: Vec<Hash> = s.hashes().copied().collect();
                    assert_eq!(flat.len(), SharedPath::len_for(u, v, n));
                    assert_eq!(SharedPath::from_hashes(u, v, n, &flat).unwrap(), s);
                    assert!(!verify_shared(&t.root(), n, &s, &cs[v], &cs[u]) || cs[u] == cs[v]);
                }
            }
        }
    }

    #[test]
    fn expected_shared_small_tree() {
        // n = 4: pairs (0,1),(2,3) share 1, the other four share 0.
        let (strict, union) = expected_shared(4);
        assert!((strict - 2.0 / 6.0).abs() < 1e-12);
        assert!((union - (2.0 + 2.0 / 6.0)).abs() < 1e-12);
    }
}
