//! Undirected simple graphs, colorings, and the random instance generators:
//! Erdős–Rényi `G(n, p)` and k-partite graphs with a planted coloring whose
//! edge probability is adjusted so the expected density matches `G(n, s)`.

use rand::Rng;

use crate::error::{Error, Result};

/// An undirected edge `(u, v)` with `u < v`.
pub type Edge = (usize, usize);

/// Simple undirected graph on vertices `0..n` with a canonical edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Build a graph from arbitrary edge input. Endpoints are reordered, the
    /// list is sorted lexicographically and duplicates are dropped.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut canon = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::IndexOutOfRange {
                    index: a.max(b),
                    len: n,
                });
            }
            if a == b {
                return Err(Error::ParameterRange(format!("self-loop at vertex {a}")));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Self::from_sorted(n, canon))
    }

    // Caller guarantees canonical order.
    fn from_sorted(n: usize, edges: Vec<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            n,
            edges,
            adjacency,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_sorted(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Membership test for an unordered pair.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n || u == v {
            return false;
        }
        let (a, b) = (u.min(v), u.max(v));
        self.adjacency[a].binary_search(&b).is_ok()
    }
}

/// Vertex coloring with colors `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    k: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>, k: usize) -> Result<Self> {
        if let Some((index, _)) = colors.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(Error::IndexOutOfRange { index, len: k });
        }
        Ok(Coloring { colors, k })
    }

    /// Coloring whose palette is exactly the colors in use (`k = max + 1`).
    pub fn from_colors(colors: Vec<usize>) -> Self {
        let k = colors.iter().max().map_or(0, |&c| c + 1);
        Coloring { colors, k }
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Number of distinct colors actually assigned.
    pub fn colors_used(&self) -> usize {
        let mut seen = vec![false; self.k];
        self.colors.iter().for_each(|&c| seen[c] = true);
        seen.into_iter().filter(|&s| s).count()
    }
}

/// Sizes of the color classes of a planted partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    sizes: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPartition("no classes".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidPartition("class of size zero".into()));
        }
        Ok(PartitionSpec { sizes })
    }

    /// Balanced split of `n` into `k` classes; the first `n mod k` classes get
    /// the extra vertex.
    pub fn balanced(n: usize, k: usize) -> Result<Self> {
        if k == 0 || n < k {
            return Err(Error::ParameterRange(format!(
                "cannot split {n} vertices into {k} non-empty classes"
            )));
        }
        let (q, r) = (n / k, n % k);
        Self::new((0..k).map(|i| q + usize::from(i < r)).collect())
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Number of intra-class (forbidden) pairs.
    pub fn forbidden_pairs(&self) -> u64 {
        self.sizes.iter().map(|&s| pairs(s)).sum()
    }

    /// Number of cross-class (allowed) pairs.
    pub fn allowed_pairs(&self) -> u64 {
        pairs(self.n()) - self.forbidden_pairs()
    }
}

/// `C(n, 2)`.
pub fn pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Erdős–Rényi `G(n, p)`: every pair independently with probability `p`,
/// drawn in lexicographic pair order.
pub fn generate_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    check_probability(p)?;
    if n == 0 {
        return Err(Error::ParameterRange("graph needs at least one vertex".into()));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_sorted(n, edges))
}

/// Cross-class edge probability giving an expected `s * C(n, 2)` edges.
pub fn adjusted_edge_probability(spec: &PartitionSpec, s: f64) -> Result<f64> {
    check_probability(s)?;
    let total = pairs(spec.n());
    let allowed = spec.allowed_pairs();
    let wanted = s * total as f64;
    if allowed == 0 {
        return if s == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::DensityInfeasible {
                density: s,
                wanted,
                allowed,
            })
        };
    }
    let p = wanted / allowed as f64;
    // Tolerate representation error in s (e.g. 0.6 * 15 / 9).
    if p > 1.0 + 1e-12 {
        return Err(Error::DensityInfeasible {
            density: s,
            wanted,
            allowed,
        });
    }
    Ok(p.min(1.0))
}

/// k-partite random graph with a planted coloring. Class `j` occupies a
/// consecutive block of vertices and receives color `j`; each cross-class
/// pair is joined with the adjusted probability, intra-class pairs never.
pub fn generate_planted<R: Rng + ?Sized>(
    spec: &PartitionSpec,
    s: f64,
    rng: &mut R,
) -> Result<(Graph, Coloring)> {
    let p = adjusted_edge_probability(spec, s)?;
    let sizes = spec.sizes();
    let mut starts = Vec::with_capacity(sizes.len());
    let mut colors = Vec::with_capacity(spec.n());
    let mut next = 0;
    for (color, &size) in sizes.iter().enumerate() {
        starts.push(next);
        colors.extend(std::iter::repeat_n(color, size));
        next += size;
    }
    let mut edges = Vec::new();
    for i in 0..sizes.len() {
        for j in i + 1..sizes.len() {
            for u in starts[i]..starts[i] + sizes[i] {
                for v in starts[j]..starts[j] + sizes[j] {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
        }
    }
    let graph = Graph::new(spec.n(), edges)?;
    let coloring = Coloring::new(colors, spec.k())?;
    Ok((graph, coloring))
}

/// Validity check. Returns `(valid, conflicting edges)`.
pub fn is_valid_coloring(g: &Graph, c: &Coloring) -> Result<(bool, Vec<Edge>)> {
    let conflicts = conflicts(g, c)?;
    Ok((conflicts.is_empty(), conflicts))
}

/// Monochromatic edges of `c` on `g`, in edge order.
pub fn conflicts(g: &Graph, c: &Coloring) -> Result<Vec<Edge>> {
    if c.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: c.len(),
        });
    }
    Ok(g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| c.color(u) == c.color(v))
        .collect())
}
