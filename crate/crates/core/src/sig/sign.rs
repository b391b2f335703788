use rand::Rng;

use super::{derive_round_permutation, Nonce, PublicKey, SecretKey};
use crate::challenge::hash_to_edges;
use crate::commitment::{Opening, Randomness, RANDOMNESS_LEN};
use crate::encoding::{ceil_log2, core_hash, encode_context, Hash};
use crate::error::{Error, Result};
use crate::graph::{Coloring, Edge};
use crate::merkle::{verify_path, verify_shared, AuthPath, MerkleTree, SharedPath};
use crate::par::Execution;
use crate::protocol::{check_colors, verify_round, RejectReason, RoundCommitmentSet, RoundResponse, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Plain = 0,
    Merkle = 1,
    MerkleShared = 2,
}

impl Variant {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Variant::Plain),
            1 => Some(Variant::Merkle),
            2 => Some(Variant::MerkleShared),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Merkle => "merkle",
            Variant::MerkleShared => "merkle-shared",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Variant::Plain),
            "merkle" => Ok(Variant::Merkle),
            "merkle-shared" => Ok(Variant::MerkleShared),
            other => Err(Error::ParameterRange(format!("unknown variant {other:?}"))),
        }
    }
}

/// Openings of the challenged edge's endpoints in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundOpenings {
    pub u: Opening,
    pub v: Opening,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignaturePlain {
    pub nonce: Nonce,
    /// `commitments[i][v]`: round `i`, vertex `v`.
    pub commitments: Vec<Vec<Hash>>,
    pub openings: Vec<RoundOpenings>,
}

/// Authentication data of a Merkle signature. Leaf indices are never stored;
/// the verifier takes them from the re-derived challenge edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MerklePaths {
    /// Two full sibling lists per round, `(u path, v path)`.
    Separate(Vec<(Vec<Hash>, Vec<Hash>)>),
    /// Shared openings of all rounds concatenated in round order; each round
    /// consumes [`SharedPath::len_for`] hashes.
    Shared(Vec<Hash>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMerkle {
    pub nonce: Nonce,
    pub roots: Vec<Hash>,
    pub openings: Vec<RoundOpenings>,
    pub paths: MerklePaths,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Signature {
    Plain(SignaturePlain),
    Merkle(SignatureMerkle),
}

/// A failed verification: the offending round (if any) and why.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rejection {
    pub round: Option<usize>,
    pub reason: RejectReason,
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.round {
            Some(i) => write!(f, "round {i}: {}", self.reason),
            None => write!(f, "{}", self.reason),
        }
    }
}

fn reject(round: Option<usize>, reason: RejectReason) -> Rejection {
    Rejection { round, reason }
}

/// Fiat–Shamir digest: `H(Encode(G, k, X_0..X_{t-1}, M) || nonce)`.
fn challenge_digest<P: AsRef<[u8]>>(
    pk: &PublicKey,
    payloads: &[P],
    message: &[u8],
    nonce: &Nonce,
) -> Result<Hash> {
    let ctx = encode_context(&pk.graph, pk.k, payloads, message)?;
    Ok(core_hash(&[&ctx, nonce]))
}

struct Round {
    alphas: Vec<u8>,
    randomness: Vec<Randomness>,
    digests: Vec<Hash>,
}

impl Round {
    fn opening(&self, v: usize) -> Opening {
        Opening {
            alpha: self.alphas[v],
            randomness: self.randomness[v],
        }
    }
}

/// Draw the nonce and all randomness sequentially from `rng`, then commit the
/// rounds under `exec`.
fn commit_rounds<R: Rng + ?Sized>(
    coloring: &Coloring,
    master_seed: &super::MasterSeed,
    k: usize,
    t: usize,
    rng: &mut R,
    exec: Execution,
) -> Result<(Nonce, Vec<Round>)> {
    if t == 0 {
        return Err(Error::ParameterRange("need at least one round".into()));
    }
    let t32 = u32::try_from(t).map_err(|_| Error::Overflow("t exceeds 32 bits"))?;
    let n = coloring.len();
    let nonce: Nonce = rng.gen();
    let mut pool = vec![[0u8; RANDOMNESS_LEN]; t * n];
    pool.iter_mut().for_each(|r| rng.fill(r));
    let rounds = exec.map_range(t32 as usize, |i| {
        let perm = derive_round_permutation(master_seed, &nonce, i as u32, k);
        let randomness = pool[i * n..(i + 1) * n].to_vec();
        let alphas: Vec<u8> = coloring.colors().iter().map(|&c| perm[c] as u8).collect();
        let digests = alphas
            .iter()
            .zip(&randomness)
            .map(|(&alpha, &randomness)| Opening { alpha, randomness }.commit())
            .collect();
        Round {
            alphas,
            randomness,
            digests,
        }
    });
    Ok((nonce, rounds))
}

pub fn sign_plain<R: Rng + ?Sized>(
    pk: &PublicKey,
    sk: &SecretKey,
    message: &[u8],
    t: usize,
    rng: &mut R,
) -> Result<SignaturePlain> {
    sign_plain_with(pk, sk, message, t, rng, Execution::default())
}

pub fn sign_plain_with<R: Rng + ?Sized>(
    pk: &PublicKey,
    sk: &SecretKey,
    message: &[u8],
    t: usize,
    rng: &mut R,
    exec: Execution,
) -> Result<SignaturePlain> {
    sk.matches(pk)?;
    let (nonce, rounds) = commit_rounds(&sk.coloring, &sk.master_seed, pk.k, t, rng, exec)?;
    let payloads: Vec<Vec<u8>> = rounds.iter().map(|r| r.digests.concat()).collect();
    let h = challenge_digest(pk, &payloads, message, &nonce)?;
    let challenges = hash_to_edges(&h, t, &pk.graph)?;
    let openings = rounds
        .iter()
        .zip(&challenges.edges)
        .map(|(round, &(u, v))| RoundOpenings {
            u: round.opening(u),
            v: round.opening(v),
        })
        .collect();
    Ok(SignaturePlain {
        nonce,
        commitments: rounds.into_iter().map(|r| r.digests).collect(),
        openings,
    })
}

pub fn verify_plain(pk: &PublicKey, message: &[u8], sig: &SignaturePlain) -> Result<(), Rejection> {
    let t = sig.openings.len();
    let n = pk.graph.n();
    if t == 0 || sig.commitments.len() != t || sig.commitments.iter().any(|c| c.len() != n) {
        return Err(reject(None, RejectReason::ChallengeMismatch));
    }
    let payloads: Vec<Vec<u8>> = sig.commitments.iter().map(|c| c.concat()).collect();
    let h = challenge_digest(pk, &payloads, message, &sig.nonce)
        .map_err(|_| reject(None, RejectReason::ChallengeMismatch))?;
    let challenges = hash_to_edges(&h, t, &pk.graph)
        .map_err(|_| reject(None, RejectReason::ChallengeMismatch))?;
    for (i, (&edge, open)) in challenges.edges.iter().zip(&sig.openings).enumerate() {
        let commitments = RoundCommitmentSet {
            digests: sig.commitments[i].clone(),
        };
        let response = RoundResponse {
            u: open.u,
            v: open.v,
        };
        if let Verdict::Reject(reason) = verify_round(&pk.graph, pk.k, &commitments, edge, &response) {
            return Err(reject(Some(i), reason));
        }
    }
    Ok(())
}

pub fn sign_merkle<R: Rng + ?Sized>(
    pk: &PublicKey,
    sk: &SecretKey,
    message: &[u8],
    t: usize,
    rng: &mut R,
    shared_paths: bool,
) -> Result<SignatureMerkle> {
    sign_merkle_with(pk, sk, message, t, rng, shared_paths, Execution::default())
}

pub fn sign_merkle_with<R: Rng + ?Sized>(
    pk: &PublicKey,
    sk: &SecretKey,
    message: &[u8],
    t: usize,
    rng: &mut R,
    shared_paths: bool,
    exec: Execution,
) -> Result<SignatureMerkle> {
    sk.matches(pk)?;
    merkle_inner(pk, &sk.coloring, &sk.master_seed, message, t, rng, shared_paths, exec)
}

/// Merkle signing without checking that the coloring is proper for the
/// public graph. A cheating signer for exercising the verifier; an improper
/// coloring yields signatures that fail verification.
pub fn sign_merkle_unchecked<R: Rng + ?Sized>(
    pk: &PublicKey,
    coloring: &Coloring,
    master_seed: &super::MasterSeed,
    message: &[u8],
    t: usize,
    rng: &mut R,
    shared_paths: bool,
) -> Result<SignatureMerkle> {
    if coloring.len() != pk.graph.n() || coloring.k() > pk.k {
        return Err(Error::LengthMismatch {
            expected: pk.graph.n(),
            got: coloring.len(),
        });
    }
    merkle_inner(pk, coloring, master_seed, message, t, rng, shared_paths, Execution::default())
}

#[allow(clippy::too_many_arguments)]
fn merkle_inner<R: Rng + ?Sized>(
    pk: &PublicKey,
    coloring: &Coloring,
    master_seed: &super::MasterSeed,
    message: &[u8],
    t: usize,
    rng: &mut R,
    shared_paths: bool,
    exec: Execution,
) -> Result<SignatureMerkle> {
    let (nonce, rounds) = commit_rounds(coloring, master_seed, pk.k, t, rng, exec)?;
    let trees: Vec<MerkleTree> = exec
        .map_slice(&rounds, |r| MerkleTree::build(&r.digests))
        .into_iter()
        .collect::<Result<_>>()?;
    let roots: Vec<Hash> = trees.iter().map(MerkleTree::root).collect();
    let h = challenge_digest(pk, &roots, message, &nonce)?;
    let challenges = hash_to_edges(&h, t, &pk.graph)?;
    let mut openings = Vec::with_capacity(t);
    let mut separate = Vec::new();
    let mut pool = Vec::new();
    for ((round, tree), &(u, v)) in rounds.iter().zip(&trees).zip(&challenges.edges) {
        openings.push(RoundOpenings {
            u: round.opening(u),
            v: round.opening(v),
        });
        if shared_paths {
            pool.extend(tree.shared_open(u, v)?.hashes().copied());
        } else {
            separate.push((tree.open(u)?.siblings, tree.open(v)?.siblings));
        }
    }
    Ok(SignatureMerkle {
        nonce,
        roots,
        openings,
        paths: if shared_paths {
            MerklePaths::Shared(pool)
        } else {
            MerklePaths::Separate(separate)
        },
    })
}

pub fn verify_merkle(pk: &PublicKey, message: &[u8], sig: &SignatureMerkle) -> Result<(), Rejection> {
    let t = sig.roots.len();
    let n = pk.graph.n();
    if t == 0 || sig.openings.len() != t {
        return Err(reject(None, RejectReason::ChallengeMismatch));
    }
    let h = challenge_digest(pk, &sig.roots, message, &sig.nonce)
        .map_err(|_| reject(None, RejectReason::ChallengeMismatch))?;
    let challenges = hash_to_edges(&h, t, &pk.graph)
        .map_err(|_| reject(None, RejectReason::ChallengeMismatch))?;
    let edges: &[Edge] = &challenges.edges;
    let depth = ceil_log2(n) as usize;
    match &sig.paths {
        MerklePaths::Separate(paths) => {
            if paths.len() != t {
                return Err(reject(None, RejectReason::BadPath));
            }
            for i in 0..t {
                let (u, v) = edges[i];
                let open = &sig.openings[i];
                let (pu, pv) = &paths[i];
                if pu.len() != depth || pv.len() != depth {
                    return Err(reject(Some(i), RejectReason::BadPath));
                }
                let ok = |x: usize, o: &Opening, p: &Vec<Hash>| {
                    let path = AuthPath {
                        leaf_index: x,
                        siblings: p.clone(),
                    };
                    verify_path(&sig.roots[i], x, n, &o.commit(), &path)
                };
                if !ok(u, &open.u, pu) || !ok(v, &open.v, pv) {
                    return Err(reject(Some(i), RejectReason::BadPath));
                }
                round_colors(pk.k, i, open)?;
            }
        }
        MerklePaths::Shared(pool) => {
            let needed: usize = edges.iter().map(|&(u, v)| SharedPath::len_for(u, v, n)).sum();
            if pool.len() != needed {
                return Err(reject(None, RejectReason::BadPath));
            }
            let mut offset = 0;
            for i in 0..t {
                let (u, v) = edges[i];
                let len = SharedPath::len_for(u, v, n);
                let path = SharedPath::from_hashes(u, v, n, &pool[offset..offset + len])
                    .map_err(|_| reject(Some(i), RejectReason::BadPath))?;
                offset += len;
                let open = &sig.openings[i];
                if !verify_shared(&sig.roots[i], n, &path, &open.u.commit(), &open.v.commit()) {
                    return Err(reject(Some(i), RejectReason::BadPath));
                }
                round_colors(pk.k, i, open)?;
            }
        }
    }
    Ok(())
}

fn round_colors(k: usize, i: usize, open: &RoundOpenings) -> Result<(), Rejection> {
    match check_colors(k, &open.u, &open.v) {
        Verdict::Accept => Ok(()),
        Verdict::Reject(reason) => Err(reject(Some(i), reason)),
    }
}

impl SignatureMerkle {
    pub fn variant(&self) -> Variant {
        match self.paths {
            MerklePaths::Separate(_) => Variant::Merkle,
            MerklePaths::Shared(_) => Variant::MerkleShared,
        }
    }

    pub fn rounds(&self) -> usize {
        self.roots.len()
    }

    /// Hash count of all authentication data.
    pub fn path_hash_count(&self) -> usize {
        match &self.paths {
            MerklePaths::Separate(p) => p.iter().map(|(a, b)| a.len() + b.len()).sum(),
            MerklePaths::Shared(pool) => pool.len(),
        }
    }
}

impl Signature {
    pub fn variant(&self) -> Variant {
        match self {
            Signature::Plain(_) => Variant::Plain,
            Signature::Merkle(s) => s.variant(),
        }
    }

    pub fn rounds(&self) -> usize {
        match self {
            Signature::Plain(s) => s.openings.len(),
            Signature::Merkle(s) => s.rounds(),
        }
    }

    pub fn verify(&self, pk: &PublicKey, message: &[u8]) -> Result<(), Rejection> {
        match self {
            Signature::Plain(s) => verify_plain(pk, message, s),
            Signature::Merkle(s) => verify_merkle(pk, message, s),
        }
    }
}
