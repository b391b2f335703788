//! One round of the GMW-style identification protocol for graph k-coloring,
//! as pure state transitions, plus an empirical soundness simulator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::commitment::{Opening, Randomness};
use crate::encoding::Hash;
use crate::error::{Error, Result};
use crate::graph::{conflicts, Coloring, Edge, Graph};
use crate::par::Execution;

/// Why a verifier rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    BadEdge,
    BadOpening,
    BadPath,
    ColorRange,
    Monochromatic,
    /// The digest-derived challenges do not line up with the signature.
    ChallengeMismatch,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RejectReason::BadEdge => "bad-edge",
            RejectReason::BadOpening => "bad-opening",
            RejectReason::BadPath => "bad-path",
            RejectReason::ColorRange => "color-range",
            RejectReason::Monochromatic => "monochromatic",
            RejectReason::ChallengeMismatch => "challenge-mismatch",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

/// Prover's secret state for one round.
#[derive(Debug, Clone)]
pub struct RoundState {
    permutation: Vec<usize>,
    randomness: Vec<Randomness>,
    permuted: Vec<u8>,
    consumed: bool,
}

impl RoundState {
    /// `pi` as a lookup table: color `c` is shown as `permutation()[c]`.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn opening(&self, v: usize) -> Opening {
        Opening {
            alpha: self.permuted[v],
            randomness: self.randomness[v],
        }
    }

    /// Open the two endpoints of the challenged edge. A state answers once.
    pub fn respond(&mut self, g: &Graph, edge: Edge) -> Result<RoundResponse> {
        if self.consumed {
            return Err(Error::StateReused);
        }
        if !g.has_edge(edge.0, edge.1) {
            return Err(Error::EdgeNotInGraph(edge.0, edge.1));
        }
        self.consumed = true;
        Ok(RoundResponse {
            u: self.opening(edge.0),
            v: self.opening(edge.1),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundCommitmentSet {
    pub digests: Vec<Hash>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundResponse {
    pub u: Opening,
    pub v: Opening,
}

fn check_palette(k: usize) -> Result<()> {
    if k == 0 || k > 256 {
        return Err(Error::ParameterRange(format!("k = {k} must lie in 1..=256")));
    }
    Ok(())
}

/// Commit to `coloring` under a fresh permutation without checking validity.
/// Cheating provers in the soundness simulation go through here.
pub(crate) fn commit_round<R: Rng + ?Sized>(
    coloring: &Coloring,
    rng: &mut R,
) -> Result<(RoundState, RoundCommitmentSet)> {
    let k = coloring.k();
    check_palette(k)?;
    let mut permutation: Vec<usize> = (0..k).collect();
    permutation.shuffle(rng);
    let n = coloring.len();
    let mut randomness = Vec::with_capacity(n);
    let mut permuted = Vec::with_capacity(n);
    let mut digests = Vec::with_capacity(n);
    for &c in coloring.colors() {
        let r: Randomness = rng.gen();
        let alpha = permutation[c] as u8;
        let o = Opening {
            alpha,
            randomness: r,
        };
        digests.push(o.commit());
        randomness.push(r);
        permuted.push(alpha);
    }
    Ok((
        RoundState {
            permutation,
            randomness,
            permuted,
            consumed: false,
        },
        RoundCommitmentSet { digests },
    ))
}

/// Prover's first move: fresh permutation, fresh randomness, one commitment
/// per vertex.
pub fn prove_round<R: Rng + ?Sized>(
    g: &Graph,
    coloring: &Coloring,
    rng: &mut R,
) -> Result<(RoundState, RoundCommitmentSet)> {
    let bad = conflicts(g, coloring)?;
    if !bad.is_empty() {
        return Err(Error::InvalidColoring {
            conflicts: bad.len(),
        });
    }
    commit_round(coloring, rng)
}

/// Shared color checks of a pair of openings.
pub(crate) fn check_colors(k: usize, u: &Opening, v: &Opening) -> Verdict {
    if usize::from(u.alpha) >= k || usize::from(v.alpha) >= k {
        Verdict::Reject(RejectReason::ColorRange)
    } else if u.alpha == v.alpha {
        Verdict::Reject(RejectReason::Monochromatic)
    } else {
        Verdict::Accept
    }
}

pub fn verify_round(
    g: &Graph,
    k: usize,
    commitments: &RoundCommitmentSet,
    edge: Edge,
    response: &RoundResponse,
) -> Verdict {
    let (u, v) = edge;
    if !g.has_edge(u, v) {
        return Verdict::Reject(RejectReason::BadEdge);
    }
    let (Some(cu), Some(cv)) = (commitments.digests.get(u), commitments.digests.get(v)) else {
        return Verdict::Reject(RejectReason::BadOpening);
    };
    if response.u.commit() != *cu || response.v.commit() != *cv {
        return Verdict::Reject(RejectReason::BadOpening);
    }
    check_colors(k, &response.u, &response.v)
}

/// `rounds` sequential rounds with uniformly random edge challenges; stops at
/// the first rejection.
fn interact<R: Rng + ?Sized>(
    g: &Graph,
    coloring: &Coloring,
    k: usize,
    rounds: usize,
    rng: &mut R,
) -> Result<Verdict> {
    if g.m() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    for _ in 0..rounds {
        let (mut state, commitments) = commit_round(coloring, rng)?;
        let edge = g.edges()[rng.gen_range(0..g.m())];
        let response = state.respond(g, edge)?;
        let verdict = verify_round(g, k, &commitments, edge, &response);
        if !verdict.is_accept() {
            return Ok(verdict);
        }
    }
    Ok(Verdict::Accept)
}

/// Honest `rounds`-round identification with a valid coloring.
pub fn run_identification<R: Rng + ?Sized>(
    g: &Graph,
    coloring: &Coloring,
    rounds: usize,
    rng: &mut R,
) -> Result<Verdict> {
    let bad = conflicts(g, coloring)?;
    if !bad.is_empty() {
        return Err(Error::InvalidColoring {
            conflicts: bad.len(),
        });
    }
    interact(g, coloring, coloring.k(), rounds, rng)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoundnessReport {
    pub trials: usize,
    pub escaped: usize,
    pub bad_edges: usize,
    pub m: usize,
    pub rounds: usize,
}

impl SoundnessReport {
    pub fn escape_rate(&self) -> f64 {
        self.escaped as f64 / self.trials as f64
    }

    pub fn analytic(&self) -> f64 {
        escape_probability(self.bad_edges, self.m, self.rounds)
    }
}

/// `(1 - t_bad / m)^rounds`.
pub fn escape_probability(bad_edges: usize, m: usize, rounds: usize) -> f64 {
    (1.0 - bad_edges as f64 / m as f64).powi(rounds as i32)
}

/// Fraction of `trials` independent `rounds`-round interactions in which a
/// prover committing honestly to `bad_coloring` is never caught. Trial `i`
/// draws from its own ChaCha stream, so the result does not depend on how
/// trials are scheduled.
pub fn simulate_soundness<R: Rng + ?Sized>(
    g: &Graph,
    bad_coloring: &Coloring,
    rounds: usize,
    trials: usize,
    rng: &mut R,
    exec: Execution,
) -> Result<SoundnessReport> {
    let bad = conflicts(g, bad_coloring)?;
    if bad.is_empty() {
        return Err(Error::ColoringActuallyValid);
    }
    check_palette(bad_coloring.k())?;
    let master: u64 = rng.gen();
    let escaped = exec.count_range(trials, |trial| {
        let mut trial_rng = ChaCha20Rng::seed_from_u64(master);
        trial_rng.set_stream(trial as u64);
        matches!(
            interact(g, bad_coloring, bad_coloring.k(), rounds, &mut trial_rng),
            Ok(Verdict::Accept)
        )
    });
    Ok(SoundnessReport {
        trials,
        escaped,
        bad_edges: bad.len(),
        m: g.m(),
        rounds,
    })
}

/// Add the first `count` same-colored non-adjacent pairs (lexicographic
/// order) to `g`, so that `coloring` has exactly `count` more conflicts.
pub fn plant_conflicts(g: &Graph, coloring: &Coloring, count: usize) -> Result<Graph> {
    if coloring.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: coloring.len(),
        });
    }
    let n = g.n();
    let extra: Vec<Edge> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| coloring.color(u) == coloring.color(v) && !g.has_edge(u, v))
        .take(count)
        .collect();
    if extra.len() < count {
        return Err(Error::ParameterRange(format!(
            "only {} same-colored pairs available, wanted {count}",
            extra.len()
        )));
    }
    Graph::new(n, g.edges().iter().copied().chain(extra))
}
