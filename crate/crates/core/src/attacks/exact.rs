//! Exact k-coloring by branch and bound.
//!
//! Vertices are chosen DSatur-style (smallest remaining domain, then most
//! uncolored neighbors, then lowest index). A greedily grown clique is
//! pre-colored `0..q` to break color symmetry, and a vertex may only open the
//! next unused color, never an arbitrary one. Forward checking prunes a
//! branch as soon as some uncolored vertex has an empty domain.

use std::time::{Duration, Instant};

use super::dsatur::dsatur;
use crate::graph::{Coloring, Graph};

/// Palette limit of the search (four 64-bit words).
pub const MAX_SEARCH_COLORS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KColoring {
    Found(Coloring),
    Impossible,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chromatic {
    Exact { chi: usize, witness: Coloring },
    /// Gave up; `best` is the smallest coloring found so far.
    Timeout { best: Coloring },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ColorSet([u64; 4]);

impl ColorSet {
    fn first(k: usize) -> Self {
        let mut words = [0u64; 4];
        for (i, w) in words.iter_mut().enumerate() {
            let lo = i * 64;
            if k >= lo + 64 {
                *w = u64::MAX;
            } else if k > lo {
                *w = (1u64 << (k - lo)) - 1;
            }
        }
        ColorSet(words)
    }

    fn contains(&self, c: usize) -> bool {
        self.0[c / 64] >> (c % 64) & 1 == 1
    }

    fn remove(&mut self, c: usize) {
        self.0[c / 64] &= !(1u64 << (c % 64));
    }

    fn insert(&mut self, c: usize) {
        self.0[c / 64] |= 1u64 << (c % 64);
    }

    fn len(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn iter(self) -> impl Iterator<Item = usize> {
        (0..4).flat_map(move |i| {
            let mut w = self.0[i];
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

/// Greedy clique: start at the max-degree vertex, repeatedly add the
/// candidate with the most neighbors among the remaining candidates.
pub fn greedy_clique(g: &Graph) -> Vec<usize> {
    let Some(start) = (0..g.n()).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))) else {
        return Vec::new();
    };
    let mut clique = vec![start];
    let mut candidates: Vec<usize> = g.neighbors(start).to_vec();
    while !candidates.is_empty() {
        let best = *candidates
            .iter()
            .max_by_key(|&&c| {
                let inside = candidates.iter().filter(|&&d| g.has_edge(c, d)).count();
                (inside, std::cmp::Reverse(c))
            })
            .unwrap();
        clique.push(best);
        candidates.retain(|&c| c != best && g.has_edge(c, best));
    }
    clique
}

enum Step {
    Found,
    Exhausted,
    Timeout,
}

struct Search<'a> {
    g: &'a Graph,
    k: usize,
    colors: Vec<Option<usize>>,
    domains: Vec<ColorSet>,
    uncolored_degree: Vec<usize>,
    deadline: Option<Instant>,
    nodes: u64,
}

impl Search<'_> {
    /// Assign `c` to `v`; returns removed `(vertex)` entries for undo, or
    /// `Err` with them if some domain emptied.
    fn assign(&mut self, v: usize, c: usize) -> Result<Vec<usize>, Vec<usize>> {
        self.colors[v] = Some(c);
        let mut trail = Vec::new();
        let mut wiped = false;
        for &w in self.g.neighbors(v) {
            self.uncolored_degree[w] -= 1;
            if self.colors[w].is_none() && self.domains[w].contains(c) {
                self.domains[w].remove(c);
                trail.push(w);
                if self.domains[w].len() == 0 {
                    wiped = true;
                }
            }
        }
        if wiped {
            Err(trail)
        } else {
            Ok(trail)
        }
    }

    fn unassign(&mut self, v: usize, c: usize, trail: Vec<usize>) {
        for w in trail {
            self.domains[w].insert(c);
        }
        for &w in self.g.neighbors(v) {
            self.uncolored_degree[w] += 1;
        }
        self.colors[v] = None;
    }

    fn pick(&self) -> Option<usize> {
        (0..self.g.n())
            .filter(|&v| self.colors[v].is_none())
            .min_by(|&a, &b| {
                self.domains[a]
                    .len()
                    .cmp(&self.domains[b].len())
                    .then(self.uncolored_degree[b].cmp(&self.uncolored_degree[a]))
                    .then(a.cmp(&b))
            })
    }

    fn run(&mut self, used: usize) -> Step {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Step::Timeout;
        }
        let Some(v) = self.pick() else {
            return Step::Found;
        };
        // Colors >= used are interchangeable; only the first of them is tried.
        let options: Vec<usize> = self.domains[v].iter().take_while(|&c| c <= used).collect();
        for c in options {
            match self.assign(v, c) {
                Ok(trail) => {
                    let step = self.run(used.max(c + 1));
                    if !matches!(step, Step::Exhausted) {
                        if matches!(step, Step::Timeout) {
                            self.unassign(v, c, trail);
                        }
                        return step;
                    }
                    self.unassign(v, c, trail);
                }
                Err(trail) => self.unassign(v, c, trail),
            }
        }
        Step::Exhausted
    }
}

fn deadline(limit: Duration) -> Option<Instant> {
    Instant::now().checked_add(limit)
}

/// Find a proper coloring with at most `k` colors, prove none exists, or
/// run out of time.
pub fn exact_k_coloring(g: &Graph, k: usize, time_limit: Duration) -> KColoring {
    exact_k_coloring_until(g, k, deadline(time_limit))
}

fn exact_k_coloring_until(g: &Graph, k: usize, deadline: Option<Instant>) -> KColoring {
    let n = g.n();
    if n == 0 {
        return KColoring::Found(Coloring::from_colors(Vec::new()));
    }
    if k == 0 {
        return KColoring::Impossible;
    }
    if k >= n {
        return KColoring::Found(Coloring::new((0..n).collect(), k).unwrap());
    }
    let clique = greedy_clique(g);
    if clique.len() > k {
        return KColoring::Impossible;
    }
    let warm = dsatur(g);
    if warm.colors_used() <= k {
        return KColoring::Found(Coloring::new(warm.colors().to_vec(), k).unwrap());
    }
    if k > MAX_SEARCH_COLORS {
        return KColoring::Timeout;
    }
    let mut search = Search {
        g,
        k,
        colors: vec![None; n],
        domains: vec![ColorSet::first(k); n],
        uncolored_degree: (0..n).map(|v| g.degree(v)).collect(),
        deadline,
        nodes: 0,
    };
    for (c, &v) in clique.iter().enumerate() {
        if search.assign(v, c).is_err() {
            return KColoring::Impossible;
        }
    }
    match search.run(clique.len()) {
        Step::Found => {
            let colors = search.colors.into_iter().map(Option::unwrap).collect();
            KColoring::Found(Coloring::new(colors, search.k).unwrap())
        }
        Step::Exhausted => KColoring::Impossible,
        Step::Timeout => KColoring::Timeout,
    }
}

/// Chromatic number: descend from the DSatur bound until `k - 1` is
/// impossible.
pub fn exact_chromatic(g: &Graph, time_limit: Duration) -> Chromatic {
    let deadline = deadline(time_limit);
    let mut best = dsatur(g);
    let lower = greedy_clique(g).len();
    loop {
        let used = best.colors_used();
        if used <= lower {
            return Chromatic::Exact {
                chi: used,
                witness: best,
            };
        }
        match exact_k_coloring_until(g, used - 1, deadline) {
            KColoring::Found(c) => best = Coloring::from_colors(c.colors().to_vec()),
            KColoring::Impossible => {
                return Chromatic::Exact {
                    chi: used,
                    witness: best,
                }
            }
            KColoring::Timeout => return Chromatic::Timeout { best },
        }
    }
}
