use std::collections::{BTreeSet, HashSet};
use std::time::Duration;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use eidolon::attacks::{dsatur, exact_chromatic, exact_k_coloring, Chromatic, KColoring};
use eidolon::challenge::hash_to_edges;
use eidolon::commitment::{commit, verify_opening, Opening};
use eidolon::encoding::{ceil_log2, encode_context, BitReader, CONTEXT_TAG};
use eidolon::graph::{conflicts, generate_er, generate_planted, is_valid_coloring};
use eidolon::io::{read_coloring, read_graph, write_coloring, write_graph};
use eidolon::merkle::{verify_path, verify_shared, AuthPath, MerkleTree};
use eidolon::protocol::{prove_round, verify_round, Verdict};
use eidolon::{Coloring, Graph, PartitionSpec};

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, any::<u64>(), 0.0..=1.0f64)
        .prop_map(|(n, seed, p)| generate_er(n, p, &mut rng(seed)).unwrap())
}

fn arb_spec() -> impl Strategy<Value = PartitionSpec> {
    prop::collection::vec(1..8usize, 2..6).prop_map(|sizes| PartitionSpec::new(sizes).unwrap())
}

/// Fields of an encoded context, recovered by the declared widths.
#[derive(Debug, PartialEq)]
struct Decoded {
    n: u64,
    k: u32,
    m: u64,
    edges: Vec<(usize, usize)>,
    t: u32,
    payloads: Vec<u8>,
    message: Vec<u8>,
}

fn decode(bytes: &[u8], payload_len: usize) -> Decoded {
    let (tag, mut rest) = bytes.split_at(CONTEXT_TAG.len());
    assert_eq!(tag, CONTEXT_TAG);
    let mut take = |len: usize| {
        let (head, tail) = rest.split_at(len);
        rest = tail;
        head
    };
    let be = |b: &[u8]| b.iter().fold(0u64, |acc, &x| acc << 8 | u64::from(x));
    let n = be(take(8));
    let k = be(take(4)) as u32;
    let m = be(take(8));
    assert_eq!(be(take(8)), m, "edge block repeats m");
    let width = ceil_log2(n as usize);
    let packed = take((2 * m as usize * width as usize).div_ceil(8));
    let mut bits = BitReader::new(packed);
    let edges = (0..m)
        .map(|_| (bits.read(width).unwrap() as usize, bits.read(width).unwrap() as usize))
        .collect();
    let t = be(take(4)) as u32;
    let payloads = take(payload_len).to_vec();
    let len = be(take(8)) as usize;
    let message = take(len).to_vec();
    assert!(rest.is_empty());
    Decoded {
        n,
        k,
        m,
        edges,
        t,
        payloads,
        message,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn graph_normalizes(n in 2..30usize, raw in prop::collection::vec((0..30usize, 0..30usize), 0..80)) {
        let raw: Vec<_> = raw.into_iter().map(|(a, b)| (a % n, b % n)).filter(|(a, b)| a != b).collect();
        let g = Graph::new(n, raw.clone()).unwrap();
        let oracle: BTreeSet<_> = raw.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let oracle: Vec<_> = oracle.into_iter().collect();
        prop_assert_eq!(g.edges(), oracle.as_slice());
    }

    #[test]
    fn planted_is_valid_and_reproducible(spec in arb_spec(), frac in 0.0..=1.0f64, seed: u64) {
        // Any fraction of the largest feasible density.
        let s = frac * spec.allowed_pairs() as f64 / eidolon::graph::pairs(spec.n()) as f64;
        let (g, c) = generate_planted(&spec, s, &mut rng(seed)).unwrap();
        prop_assert!(is_valid_coloring(&g, &c).unwrap().0);
        prop_assert!(g.edges().iter().all(|&(u, v)| c.color(u) != c.color(v)));
        let (g2, c2) = generate_planted(&spec, s, &mut rng(seed)).unwrap();
        prop_assert_eq!(g, g2);
        prop_assert_eq!(c, c2);
    }

    #[test]
    fn er_reproducible(n in 1..40usize, p in 0.0..=1.0f64, seed: u64) {
        prop_assert_eq!(generate_er(n, p, &mut rng(seed)).unwrap(), generate_er(n, p, &mut rng(seed)).unwrap());
    }

    #[test]
    fn commitment_round_trip(alpha: u8, randomness: [u8; 16]) {
        let digest = commit(alpha, &randomness).unwrap();
        let opening = Opening { alpha, randomness };
        prop_assert!(verify_opening(&digest, &opening));
    }

    #[test]
    fn context_decodes(g in arb_graph(40), k in 1..300usize,
                       payloads in prop::collection::vec(prop::collection::vec(any::<u8>(), 32), 0..5),
                       message in prop::collection::vec(any::<u8>(), 0..64)) {
        let bytes = encode_context(&g, k, &payloads, &message).unwrap();
        let d = decode(&bytes, payloads.len() * 32);
        prop_assert_eq!(d, Decoded {
            n: g.n() as u64,
            k: k as u32,
            m: g.m() as u64,
            edges: g.edges().to_vec(),
            t: payloads.len() as u32,
            payloads: payloads.concat(),
            message,
        });
    }

    #[test]
    fn dsatur_is_proper(g in arb_graph(40)) {
        let c = dsatur(&g);
        prop_assert!(conflicts(&g, &c).unwrap().is_empty());
    }

    #[test]
    fn exact_bounded_by_dsatur(g in arb_graph(14)) {
        let Chromatic::Exact { chi, witness } = exact_chromatic(&g, Duration::from_secs(30)) else {
            return Err(TestCaseError::fail("timeout"));
        };
        prop_assert!(chi <= dsatur(&g).colors_used());
        prop_assert!(is_valid_coloring(&g, &witness).unwrap().0);
    }

    #[test]
    fn planted_never_impossible(spec in arb_spec(), seed: u64) {
        let s = 0.9 * spec.allowed_pairs() as f64 / eidolon::graph::pairs(spec.n()) as f64;
        let (g, c) = generate_planted(&spec, s, &mut rng(seed)).unwrap();
        match exact_k_coloring(&g, c.k(), Duration::from_secs(30)) {
            KColoring::Found(found) => prop_assert!(is_valid_coloring(&g, &found).unwrap().0),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn graph_file_round_trip(g in arb_graph(30), k in 1..10usize) {
        let (back, k2) = read_graph(&write_graph(&g, k)).unwrap();
        prop_assert_eq!(back, g);
        prop_assert_eq!(k2, k);
    }

    #[test]
    fn coloring_file_round_trip(colors in prop::collection::vec(0..9usize, 1..30)) {
        let c = Coloring::from_colors(colors);
        prop_assert_eq!(read_coloring(&write_coloring(&c)).unwrap(), c);
    }

    #[test]
    fn merkle_path_length(n in 2..=65_536usize) {
        let leaves = vec![[0u8; 32]; n];
        let tree = MerkleTree::build(&leaves).unwrap();
        let v = n / 3;
        let path = tree.open(v).unwrap();
        prop_assert_eq!(path.siblings.len(), ceil_log2(n) as usize);
        prop_assert!(verify_path(&tree.root(), v, n, &leaves[v], &path));
    }

    #[test]
    fn shared_openings_verify(n in 2..200usize, seed: u64) {
        let mut r = rng(seed);
        let leaves: Vec<[u8; 32]> = (0..n).map(|_| r.gen()).collect();
        let tree = MerkleTree::build(&leaves).unwrap();
        let u = r.gen_range(0..n);
        let v = (u + r.gen_range(1..n)) % n;
        let shared = tree.shared_open(u, v).unwrap();
        prop_assert!(verify_shared(&tree.root(), n, &shared, &leaves[u], &leaves[v]));
        let (pu, pv) = shared.expand(n, &leaves[u], &leaves[v]).unwrap();
        prop_assert_eq!(pu, tree.open(u).unwrap());
        prop_assert_eq!(pv, tree.open(v).unwrap());
    }

    #[test]
    fn challenges_stable_under_longer_t(seed: [u8; 32], t in 1..50usize, extra in 1..50usize) {
        let g = Graph::complete(7);
        let short = hash_to_edges(&seed, t, &g).unwrap();
        let long = hash_to_edges(&seed, t + extra, &g).unwrap();
        prop_assert_eq!(&short.edges[..], &long.edges[..t]);
    }
}

#[test]
fn commitment_single_bit_sweep() {
    let opening = Opening {
        alpha: 0b1010_0110,
        randomness: *b"0123456789abcdef",
    };
    let digest = opening.commit();
    for bit in 0..8 {
        let o = Opening {
            alpha: opening.alpha ^ (1 << bit),
            ..opening
        };
        assert!(!verify_opening(&digest, &o));
    }
    for bit in 0..128 {
        let mut o = opening;
        o.randomness[bit / 8] ^= 1 << (bit % 8);
        assert!(!verify_opening(&digest, &o));
    }
    for bit in 0..256 {
        let mut d = digest;
        d[bit / 8] ^= 1 << (bit % 8);
        assert!(!verify_opening(&d, &opening));
    }
}

/// Byte histograms of digests for two different colors look alike.
#[test]
fn commitment_bytes_do_not_depend_on_color() {
    let mut r = rng(5);
    let mut hist = [[0f64; 256]; 2];
    for (alpha, h) in hist.iter_mut().enumerate() {
        for _ in 0..10_000 {
            let randomness: [u8; 16] = r.gen();
            for b in commit(alpha as u8, &randomness).unwrap() {
                h[b as usize] += 1.0;
            }
        }
    }
    // Two-sample chi-square with equal totals.
    let stat: f64 = (0..256)
        .filter(|&i| hist[0][i] + hist[1][i] > 0.0)
        .map(|i| (hist[0][i] - hist[1][i]).powi(2) / (hist[0][i] + hist[1][i]))
        .sum();
    let p = 1.0 - ChiSquared::new(255.0).unwrap().cdf(stat);
    assert!(p > 0.001, "chi-square {stat}, p = {p}");
}

#[test]
fn context_injective_on_corpus() {
    let mut r = rng(17);
    let mut seen = HashSet::new();
    let mut inputs = HashSet::new();
    while inputs.len() < 10_000 {
        let n = r.gen_range(2..12);
        let g = generate_er(n, r.gen_range(0.0..1.0), &mut r).unwrap();
        let k = r.gen_range(1..6);
        let t = r.gen_range(0..3);
        let payloads: Vec<Vec<u8>> = (0..t).map(|_| vec![r.gen_range(0..4u8); 32]).collect();
        let msg: Vec<u8> = (0..r.gen_range(0..3)).map(|_| r.gen_range(0..3u8)).collect();
        if inputs.insert((g.n(), g.edges().to_vec(), k, payloads.clone(), msg.clone())) {
            seen.insert(encode_context(&g, k, &payloads, &msg).unwrap());
        }
    }
    assert_eq!(seen.len(), 10_000);
}

#[test]
fn merkle_binding_under_perturbation() {
    let mut r = rng(31);
    let mut trees = Vec::new();
    for _ in 0..20 {
        let n = r.gen_range(2..=64);
        let leaves: Vec<[u8; 32]> = (0..n).map(|_| r.gen()).collect();
        let tree = MerkleTree::build(&leaves).unwrap();
        trees.push((leaves, tree));
    }
    for i in 0..100_000 {
        let (leaves, tree) = &trees[i % trees.len()];
        let n = leaves.len();
        let v = r.gen_range(0..n);
        let mut c = leaves[v];
        let mut path: AuthPath = tree.open(v).unwrap();
        match r.gen_range(0..3) {
            0 => c[r.gen_range(0..32)] ^= 1 << r.gen_range(0..8),
            1 => {
                let j = r.gen_range(0..path.siblings.len());
                path.siblings[j][r.gen_range(0..32)] ^= 1 << r.gen_range(0..8);
            }
            _ => {
                // A genuine opening of another position.
                let w = (v + r.gen_range(1..n)) % n;
                c = leaves[w];
                path = tree.open(w).unwrap();
            }
        }
        assert!(!verify_path(&tree.root(), v, n, &c, &path), "perturbation {i} verified");
    }
}

#[test]
fn merkle_path_length_small_sweep() {
    for n in (2..=300).chain((9..=16).flat_map(|e| [(1usize << e) - 1, 1 << e, (1 << e) + 1])) {
        let tree = MerkleTree::build(&vec![[1u8; 32]; n]).unwrap();
        assert_eq!(tree.depth(), ceil_log2(n), "n = {n}");
        assert_eq!(tree.open(n - 1).unwrap().siblings.len(), ceil_log2(n) as usize);
    }
}

#[test]
fn root_depends_on_every_leaf() {
    let leaves: Vec<[u8; 32]> = (0..16u8).map(|i| [i; 32]).collect();
    let root = MerkleTree::build(&leaves).unwrap().root();
    for v in 0..16 {
        let mut changed = leaves.clone();
        changed[v][0] ^= 0x80;
        assert_ne!(MerkleTree::build(&changed).unwrap().root(), root, "leaf {v}");
    }
}

/// Revealed colors on a fixed edge are uniform over ordered distinct pairs.
#[test]
fn revealed_pairs_uniform() {
    let spec = PartitionSpec::new(vec![4, 4, 4]).unwrap();
    let (g, c) = generate_planted(&spec, 0.5, &mut rng(3)).unwrap();
    let edge = g.edges()[0];
    let mut r = rng(8);
    let mut counts = [[0f64; 3]; 3];
    let rounds = 6000;
    for _ in 0..rounds {
        let (mut state, commits) = prove_round(&g, &c, &mut r).unwrap();
        let resp = state.respond(&g, edge).unwrap();
        assert_eq!(verify_round(&g, 3, &commits, edge, &resp), Verdict::Accept);
        counts[resp.u.alpha as usize][resp.v.alpha as usize] += 1.0;
    }
    let expected = rounds as f64 / 6.0;
    let mut stat = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                assert_eq!(counts[a][b], 0.0);
            } else {
                stat += (counts[a][b] - expected).powi(2) / expected;
            }
        }
    }
    let p = 1.0 - ChiSquared::new(5.0).unwrap().cdf(stat);
    assert!(p > 0.001, "chi-square {stat}, p = {p}");
}
