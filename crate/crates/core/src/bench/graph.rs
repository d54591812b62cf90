//! Undirected neighborhood graphs and the seeded Watts-Strogatz generator.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Simple connected undirected graph over nodes `0..n`.
#[derive(Debug, Clone)]
pub struct NeighborhoodGraph {
    adj: Vec<Vec<usize>>,
}

impl NeighborhoodGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("graph needs at least one node".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParams(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidParams(format!("self-loop at {u}")));
            }
            if adj[u].contains(&v) {
                return Err(Error::InvalidParams(format!("duplicate edge ({u}, {v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(NeighborhoodGraph { adj })
    }

    /// The path 0 - 1 - … - (n-1).
    pub fn path(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("paths are simple")
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges with u < v, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.adj.iter().enumerate() {
            for &v in ns {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_nodes();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    /// Breadth-first distances from `start`; unreachable nodes get `usize::MAX`.
    pub fn distances_from(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_nodes()];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in self.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.distances_from(a)[b]
    }

    /// Length (in edges) of a shortest walk from `start` visiting every node,
    /// allowing revisits. Held-Karp over the metric closure; exponential in
    /// the node count, intended for small oracle instances.
    pub fn full_path_len(&self, start: usize) -> usize {
        let n = self.num_nodes();
        assert!(n <= 20, "full-path oracle is exponential; keep n small");
        if n == 1 {
            return 0;
        }
        let dist: Vec<Vec<usize>> = (0..n).map(|v| self.distances_from(v)).collect();
        let full = (1usize << n) - 1;
        // best[mask][v] = shortest walk from start visiting mask, ending at v.
        let mut best = vec![vec![usize::MAX; n]; 1 << n];
        best[1 << start][start] = 0;
        for mask in 0..=full {
            if mask & (1 << start) == 0 {
                continue;
            }
            for v in 0..n {
                let cur = best[mask][v];
                if cur == usize::MAX || mask & (1 << v) == 0 {
                    continue;
                }
                for u in 0..n {
                    if mask & (1 << u) != 0 {
                        continue;
                    }
                    let next = cur + dist[v][u];
                    let entry = &mut best[mask | (1 << u)][u];
                    if next < *entry {
                        *entry = next;
                    }
                }
            }
        }
        (0..n).map(|v| best[full][v]).min().expect("connected graph covers all nodes")
    }
}

/// Parameters of the Watts-Strogatz small-world construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsParams {
    pub n: usize,
    /// Mean degree; must be even and < n.
    pub k: usize,
    /// Rewiring probability in [0, 1].
    pub beta: f64,
    pub seed: u64,
}

impl WsParams {
    fn validate(&self) -> Result<()> {
        if self.k < 2 || !self.k.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("k = {} must be even and >= 2", self.k)));
        }
        if self.n <= self.k {
            return Err(Error::InvalidParams(format!(
                "n = {} must exceed k = {}",
                self.n, self.k
            )));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidParams(format!("beta = {} outside [0, 1]", self.beta)));
        }
        Ok(())
    }
}

/// Seeded Watts-Strogatz generator: a ring lattice of degree `k` whose
/// clockwise edges are each rewired with probability `beta`, avoiding
/// self-loops and duplicates. Disconnected samples are rejected and retried
/// on derived sub-seeds, so the result is always connected.
pub fn watts_strogatz(params: &WsParams) -> Result<NeighborhoodGraph> {
    params.validate()?;
    let WsParams { n, k, beta, seed } = *params;
    for attempt in 0u64.. {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut has_edge = vec![false; n * n];
        let add = |adj: &mut Vec<Vec<usize>>, has_edge: &mut Vec<bool>, u: usize, v: usize| {
            adj[u].push(v);
            adj[v].push(u);
            has_edge[u * n + v] = true;
            has_edge[v * n + u] = true;
        };
        for j in 1..=k / 2 {
            for u in 0..n {
                let v = (u + j) % n;
                if !has_edge[u * n + v] {
                    add(&mut adj, &mut has_edge, u, v);
                }
            }
        }
        for j in 1..=k / 2 {
            for u in 0..n {
                let v = (u + j) % n;
                if !rng.random_bool(beta) {
                    continue;
                }
                // Rewire (u, v) to (u, w); keep the edge when u is saturated.
                if adj[u].len() >= n - 1 {
                    continue;
                }
                let mut w = rng.random_range(0..n);
                while w == u || has_edge[u * n + w] {
                    w = rng.random_range(0..n);
                }
                adj[u].retain(|&x| x != v);
                adj[v].retain(|&x| x != u);
                has_edge[u * n + v] = false;
                has_edge[v * n + u] = false;
                add(&mut adj, &mut has_edge, u, w);
            }
        }
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        let graph = NeighborhoodGraph::new(n, &edges)?;
        if graph.is_connected() {
            return Ok(graph);
        }
    }
    unreachable!("retry loop only exits by returning")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_zero_is_the_ring_lattice() {
        let g = watts_strogatz(&WsParams { n: 10, k: 4, beta: 0.0, seed: 1 }).unwrap();
        assert_eq!(g.num_edges(), 20);
        for v in 0..10 {
            assert_eq!(g.degree(v), 4);
            assert!(g.neighbors(v).contains(&((v + 1) % 10)));
            assert!(g.neighbors(v).contains(&((v + 2) % 10)));
        }
    }

    #[test]
    fn full_rewiring_preserves_edge_count() {
        let g = watts_strogatz(&WsParams { n: 10, k: 4, beta: 1.0, seed: 7 }).unwrap();
        assert_eq!(g.num_edges(), 20);
        assert!(g.is_connected());
    }

    #[test]
    fn fixed_seed_reproduces_graph() {
        let p = WsParams { n: 16, k: 4, beta: 0.3, seed: 42 };
        let a = watts_strogatz(&p).unwrap();
        let b = watts_strogatz(&p).unwrap();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(watts_strogatz(&WsParams { n: 4, k: 4, beta: 0.0, seed: 0 }).is_err());
        assert!(watts_strogatz(&WsParams { n: 10, k: 3, beta: 0.0, seed: 0 }).is_err());
        assert!(watts_strogatz(&WsParams { n: 10, k: 4, beta: 1.5, seed: 0 }).is_err());
    }

    #[test]
    fn path_distances_and_full_path() {
        let g = NeighborhoodGraph::path(4);
        assert_eq!(g.distance(0, 3), 3);
        assert_eq!(g.full_path_len(0), 3);
        // Star 0-1, 0-2, 0-3: covering walk from 1 is 1-0-2-0-3, four edges.
        let star = NeighborhoodGraph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.full_path_len(1), 4);
    }
}
