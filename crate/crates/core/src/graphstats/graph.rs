use std::collections::VecDeque;

use petgraph::unionfind::UnionFind;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::process::GraphState;
use crate::scalar::Real;

/// Undirected simple graph in compressed adjacency form. Self-loops are
/// dropped and parallel edges merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl UndirectedGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) outside {n} vertices");
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for mut list in adj {
            list.sort_unstable();
            list.dedup();
            neighbors.extend(list);
            offsets.push(neighbors.len());
        }
        Self { offsets, neighbors }
    }

    pub fn from_state<T: Real>(state: &GraphState<T>) -> Self {
        Self::from_edges(state.sigma(), state.edges())
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Breadth-first distances from `source`; `usize::MAX` when unreachable.
    pub fn bfs(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn eccentricity(&self, source: usize) -> (usize, usize) {
        let dist = self.bfs(source);
        let mut far = (0, source);
        for (v, &d) in dist.iter().enumerate() {
            if d != usize::MAX && d > far.0 {
                far = (d, v);
            }
        }
        far
    }

    /// Subgraph induced by `vertices` (relabelled in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let edges = vertices.iter().flat_map(|&v| {
            let index = &index;
            self.neighbors(v)
                .iter()
                .filter(move |&&w| index[w] != usize::MAX && v < w)
                .map(move |&w| (index[v], index[w]))
        });
        Self::from_edges(vertices.len(), edges.collect::<Vec<_>>())
    }
}

/// Connected components of the undirected graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Components {
    /// Component sizes in decreasing order.
    pub sizes: Vec<usize>,
    /// Component index of each vertex (indices follow `sizes`).
    pub labels: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_connected(&self) -> bool {
        self.sizes.len() <= 1
    }

    pub fn largest(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] == 0).collect()
    }
}

/// Components with edge directions and self-loops ignored.
pub fn connected_components<T: Real>(state: &GraphState<T>) -> Components {
    components_of(state.sigma(), state.edges())
}

pub fn components_of(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Components {
    let mut uf = UnionFind::<usize>::new(n);
    for (a, b) in edges {
        if a != b {
            uf.union(a, b);
        }
    }
    let roots = uf.into_labeling();
    let mut size = vec![0usize; n];
    for &r in &roots {
        size[r] += 1;
    }
    let mut order: Vec<usize> = (0..n).filter(|&r| size[r] > 0).collect();
    order.sort_by(|&a, &b| size[b].cmp(&size[a]).then(a.cmp(&b)));
    let mut rank = vec![0usize; n];
    for (i, &r) in order.iter().enumerate() {
        rank[r] = i;
    }
    Components {
        sizes: order.iter().map(|&r| size[r]).collect(),
        labels: roots.iter().map(|&r| rank[r]).collect(),
    }
}

/// Largest graph accepted by [`DiameterMethod::Exact`].
pub const EXACT_DIAMETER_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum DiameterMethod {
    /// Breadth-first search from every vertex.
    Exact,
    /// Exact value with eccentricity bound pruning.
    Ifub,
    /// Lower bound from random double sweeps.
    Sampled { sweeps: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiameterError {
    #[error("exact diameter allows at most {limit} vertices, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("empty graph")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub diameter: usize,
    /// False for the sampled method, whose value is a lower bound.
    pub exact: bool,
    /// Size of the component measured.
    pub component_size: usize,
    /// Whether the whole graph was connected.
    pub connected: bool,
    /// Breadth-first searches performed.
    pub bfs_runs: usize,
}

/// Diameter of the largest component.
pub fn diameter(graph: &UndirectedGraph, method: DiameterMethod) -> Result<DiameterReport, DiameterError> {
    let n = graph.vertex_count();
    if n == 0 {
        return Err(DiameterError::Empty);
    }
    if method == DiameterMethod::Exact && n > EXACT_DIAMETER_LIMIT {
        return Err(DiameterError::TooLarge {
            n,
            limit: EXACT_DIAMETER_LIMIT,
        });
    }
    let comps = components_of(
        n,
        (0..n).flat_map(|v| graph.neighbors(v).iter().map(move |&w| (v, w))),
    );
    let connected = comps.is_connected();
    let sub;
    let g = if connected {
        graph
    } else {
        sub = graph.induced(&comps.largest());
        &sub
    };
    let (diameter, bfs_runs) = match method {
        DiameterMethod::Exact => (
            (0..g.vertex_count()).map(|v| g.eccentricity(v).0).max().unwrap_or(0),
            g.vertex_count(),
        ),
        DiameterMethod::Ifub => ifub(g),
        DiameterMethod::Sampled { sweeps, seed } => double_sweeps(g, sweeps, seed),
    };
    Ok(DiameterReport {
        diameter,
        exact: !matches!(method, DiameterMethod::Sampled { .. }),
        component_size: comps.sizes[0],
        connected,
        bfs_runs,
    })
}

/// iFUB rooted at the midpoint of a long path found by two sweeps.
fn ifub(g: &UndirectedGraph) -> (usize, usize) {
    let mut runs = 0;
    let start = (0..g.vertex_count()).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))).unwrap();
    let (_, a) = g.eccentricity(start);
    let dist_a = g.bfs(a);
    runs += 2;
    let (ecc_a, b) = dist_a
        .iter()
        .enumerate()
        .map(|(v, &d)| (d, v))
        .max()
        .unwrap();
    // walk back from b half way towards a
    let dist_b = g.bfs(b);
    runs += 1;
    let half = ecc_a / 2;
    let root = (0..g.vertex_count())
        .find(|&v| dist_a[v] + dist_b[v] == ecc_a && dist_b[v] == half)
        .unwrap_or(a);

    let dist = g.bfs(root);
    runs += 1;
    let ecc_root = *dist.iter().max().unwrap();
    let mut levels = vec![Vec::new(); ecc_root + 1];
    for (v, &d) in dist.iter().enumerate() {
        levels[d].push(v);
    }
    let mut lower = ecc_root.max(ecc_a);
    let mut i = ecc_root;
    while i > 0 && 2 * i > lower {
        let mut level_max = 0;
        for &v in &levels[i] {
            level_max = level_max.max(g.eccentricity(v).0);
            runs += 1;
        }
        lower = lower.max(level_max);
        if lower > 2 * (i - 1) {
            break;
        }
        i -= 1;
    }
    (lower, runs)
}

fn double_sweeps(g: &UndirectedGraph, sweeps: usize, seed: u64) -> (usize, usize) {
    let mut rng = crate::rng::process_rng(seed, 0);
    let mut best = 0;
    for _ in 0..sweeps.max(1) {
        let s = rng.random_range(0..g.vertex_count());
        let (_, far) = g.eccentricity(s);
        let (d, _) = g.eccentricity(far);
        best = best.max(d);
    }
    (best, 2 * sweeps.max(1))
}
