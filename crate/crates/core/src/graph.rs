//! Interaction graphs: complete, star, and Watts-Strogatz small-world.
//!
//! Vertices are numbered `1..=L`, one per Majorana mode. Every generator
//! here returns a connected simple graph.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cap on rewiring retries per edge before the edge is kept in place.
const REWIRE_RETRY_CAP: usize = 100;

/// A simple undirected graph on vertices `1..=L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    #[serde(rename = "L")]
    l: usize,
    /// Unordered pairs `(a, b)` with `1 <= a < b <= L`, sorted, no duplicates.
    edges: Vec<(u16, u16)>,
}

impl Graph {
    /// Builds a graph from an explicit edge list, validating simplicity.
    pub fn new(l: usize, edges: impl IntoIterator<Item = (u16, u16)>) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidParameter(format!("L = {l} < 2")));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {a}")));
            }
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            if b as usize > l {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a},{b}) outside 1..={l}"
                )));
            }
            if !set.insert((a, b)) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({a},{b})")));
            }
        }
        if set.is_empty() {
            return Err(Error::InvalidParameter("graph has no edges".into()));
        }
        Ok(Self {
            l,
            edges: set.into_iter().collect(),
        })
    }

    /// Complete graph on `L` vertices; `L` must be even and at least 2.
    pub fn complete(l: usize) -> Result<Self> {
        if l < 2 || l % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "complete graph needs even L >= 2, got {l}"
            )));
        }
        let mut edges = Vec::with_capacity(l * (l - 1) / 2);
        for a in 1..=l as u16 {
            for b in (a + 1)..=l as u16 {
                edges.push((a, b));
            }
        }
        Ok(Self { l, edges })
    }

    /// Star graph: vertices `1..L` each connected to the hub vertex `L`.
    pub fn star(l: usize) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidParameter(format!(
                "star graph needs L >= 2, got {l}"
            )));
        }
        let edges = (1..l as u16).map(|i| (i, l as u16)).collect();
        Ok(Self { l, edges })
    }

    /// Watts-Strogatz small-world graph.
    ///
    /// Starts from the circulant lattice where each vertex is adjacent to its
    /// `2k` nearest ring neighbours, then sweeps the lattice edges in canonical
    /// order (first endpoint, then ring offset) and rewires each with
    /// probability `p`: the smaller original endpoint is kept and the other is
    /// reattached to a uniformly drawn non-adjacent vertex. Proposals that
    /// would duplicate an edge or disconnect the graph are redrawn, up to
    /// [`REWIRE_RETRY_CAP`] times, after which the edge stays in place.
    /// Edge count is therefore exactly `L * k` for every seed.
    pub fn watts_strogatz(l: usize, k: usize, p: f64, rng: &mut impl Rng) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if l < 2 * k + 2 {
            return Err(Error::InvalidParameter(format!(
                "Watts-Strogatz needs L >= 2k + 2, got L = {l}, k = {k}"
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "rewiring probability {p} outside [0, 1]"
            )));
        }

        let lattice: Vec<(u16, u16)> = (0..l)
            .flat_map(|i| (1..=k).map(move |off| (i, (i + off) % l)))
            .map(|(i, j)| {
                let (a, b) = (i.min(j) as u16 + 1, i.max(j) as u16 + 1);
                (a, b)
            })
            .collect();
        let mut set: BTreeSet<(u16, u16)> = lattice.iter().copied().collect();
        debug_assert_eq!(set.len(), l * k);

        for &(a, b) in &lattice {
            if p == 0.0 || rng.gen::<f64>() >= p {
                continue;
            }
            // Keep the smaller original endpoint, reattach the other.
            for _ in 0..REWIRE_RETRY_CAP {
                let c = rng.gen_range(1..=l as u16);
                let proposal = (a.min(c), a.max(c));
                if c == a || set.contains(&proposal) {
                    continue;
                }
                set.remove(&(a, b));
                set.insert(proposal);
                if connected(l, &set) {
                    break;
                }
                set.remove(&proposal);
                set.insert((a, b));
            }
        }

        Ok(Self {
            l,
            edges: set.into_iter().collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.l
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(a, b)` pairs with `a < b`, 1-based.
    pub fn edges(&self) -> &[(u16, u16)] {
        &self.edges
    }

    pub fn degree(&self, v: u16) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn is_connected(&self) -> bool {
        connected(self.l, &self.edges.iter().copied().collect())
    }
}

fn connected(l: usize, edges: &BTreeSet<(u16, u16)>) -> bool {
    let mut adj = vec![Vec::new(); l + 1];
    for &(a, b) in edges {
        adj[a as usize].push(b as usize);
        adj[b as usize].push(a as usize);
    }
    let mut seen = vec![false; l + 1];
    let mut stack = vec![1usize];
    seen[1] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == l
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complete_edge_counts() {
        assert_eq!(Graph::complete(2).unwrap().edges(), &[(1, 2)]);
        assert_eq!(Graph::complete(4).unwrap().edge_count(), 6);
        assert_eq!(Graph::complete(24).unwrap().edge_count(), 276);
        assert!(Graph::complete(3).is_err());
        assert!(Graph::complete(0).is_err());
    }

    #[test]
    fn star_shape() {
        let g = Graph::star(3).unwrap();
        assert_eq!(g.edges(), &[(1, 3), (2, 3)]);
        assert_eq!(Graph::star(2).unwrap().edges(), &[(1, 2)]);
        assert!(Graph::star(1).is_err());

        let g = Graph::star(9).unwrap();
        assert_eq!(g.degree(9), 8);
        for v in 1..9 {
            assert_eq!(g.degree(v), 1);
        }
    }

    #[test]
    fn ws_p0_is_ring() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Graph::watts_strogatz(8, 1, 0.0, &mut rng).unwrap();
        for v in 1..=8 {
            assert_eq!(g.degree(v), 2);
        }
        assert_eq!(g.edge_count(), 8);

        let g2 = Graph::watts_strogatz(8, 2, 0.0, &mut rng).unwrap();
        for v in 1..=8 {
            assert_eq!(g2.degree(v), 4);
        }
        // p = 0 is seed-independent.
        let mut other = ChaCha8Rng::seed_from_u64(999);
        assert_eq!(g, Graph::watts_strogatz(8, 1, 0.0, &mut other).unwrap());
    }

    #[test]
    fn ws_edge_count_and_connectivity() {
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (l, k, p) = (
                2 * (2 + (seed as usize % 7)) + 2,
                1 + seed as usize % 2,
                (seed % 11) as f64 / 10.0,
            );
            let l = l.max(2 * k + 2);
            let g = Graph::watts_strogatz(l, k, p, &mut rng).unwrap();
            assert_eq!(g.edge_count(), l * k, "L={l} k={k} p={p} seed={seed}");
            assert!(g.is_connected(), "L={l} k={k} p={p} seed={seed}");
        }
    }

    #[test]
    fn ws_rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(Graph::watts_strogatz(3, 1, 0.5, &mut rng).is_err());
        assert!(Graph::watts_strogatz(5, 2, 0.5, &mut rng).is_err());
        assert!(Graph::watts_strogatz(10, 0, 0.5, &mut rng).is_err());
        assert!(Graph::watts_strogatz(10, 1, 1.5, &mut rng).is_err());
    }

    #[test]
    fn rejects_malformed_edge_lists() {
        assert!(Graph::new(4, [(1, 1)]).is_err());
        assert!(Graph::new(4, [(1, 2), (2, 1)]).is_err());
        assert!(Graph::new(4, [(1, 5)]).is_err());
        assert!(Graph::new(4, []).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = Graph::star(6).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"L\":6"));
        let back: Graph = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
    }
}
