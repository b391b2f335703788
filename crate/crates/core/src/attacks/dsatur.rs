use crate::graph::{Coloring, Graph};

/// Brélaz's DSatur. Picks the uncolored vertex with the most distinct
/// neighbor colors, then the most uncolored neighbors, then the lowest index,
/// and gives it the smallest color absent from its neighborhood.
pub fn dsatur(g: &Graph) -> Coloring {
    let n = g.n();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    // Distinct colors seen around each vertex, kept sorted.
    let mut seen: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut uncolored_degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();

    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colors[v].is_none())
            .max_by(|&a, &b| {
                (seen[a].len(), uncolored_degree[a])
                    .cmp(&(seen[b].len(), uncolored_degree[b]))
                    .then(b.cmp(&a))
            })
            .expect("an uncolored vertex remains");
        let color = seen[v]
            .iter()
            .enumerate()
            .find(|&(i, &c)| i != c)
            .map_or(seen[v].len(), |(i, _)| i);
        colors[v] = Some(color);
        for &w in g.neighbors(v) {
            uncolored_degree[w] -= 1;
            if colors[w].is_none() {
                if let Err(pos) = seen[w].binary_search(&color) {
                    seen[w].insert(pos, color);
                }
            }
        }
    }
    Coloring::from_colors(colors.into_iter().map(|c| c.unwrap()).collect())
}
