use crate::sphere::SpherePoint;

/// Violation of one of the graph-state conservation laws.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantViolation {
    #[error("edge count {edges} != m * sigma = {expected}")]
    OutDegree { edges: usize, expected: usize },
    #[error("vertex {vertex}: degree {degree} != m + in-degree {expected}")]
    Degree {
        vertex: usize,
        degree: u64,
        expected: u64,
    },
    #[error("degree sum {sum} != 2 m sigma = {expected}")]
    DegreeSum { sum: u64, expected: u64 },
    #[error("edge {edge} points to vertex {head} which did not exist yet")]
    FutureHead { edge: usize, head: usize },
}

/// Evolving directed multigraph.
///
/// Vertices are numbered `0..sigma` in creation order (exports shift to
/// 1-based ids). Edge `i` emanates from vertex `i / m`; only its head is
/// stored. A self-loop is an edge whose head equals its source.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphState<T> {
    m: usize,
    positions: Vec<SpherePoint<T>>,
    heads: Vec<usize>,
    degree: Vec<u64>,
}

impl<T: Copy> GraphState<T> {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            positions: Vec::new(),
            heads: Vec::new(),
            degree: Vec::new(),
        }
    }

    pub fn with_capacity(m: usize, n: usize) -> Self {
        Self {
            m,
            positions: Vec::with_capacity(n),
            heads: Vec::with_capacity(n * m),
            degree: Vec::with_capacity(n),
        }
    }

    /// Current vertex count σ.
    #[inline]
    pub fn sigma(&self) -> usize {
        self.positions.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn positions(&self) -> &[SpherePoint<T>] {
        &self.positions
    }

    #[inline]
    pub fn position(&self, v: usize) -> &SpherePoint<T> {
        &self.positions[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> u64 {
        self.degree[v]
    }

    #[inline]
    pub fn degrees(&self) -> &[u64] {
        &self.degree
    }

    /// Number of edge heads at `v`, self-loops included.
    #[inline]
    pub fn in_degree(&self, v: usize) -> u64 {
        self.degree[v] - self.m as u64
    }

    /// Heads of all edges in creation order.
    #[inline]
    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    /// `(source, head)` pairs in creation order, 0-based.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.m;
        self.heads.iter().enumerate().map(move |(i, &h)| (i / m, h))
    }

    /// Heads of the `m` edges emanating from `v`.
    pub fn out_heads(&self, v: usize) -> &[usize] {
        &self.heads[v * self.m..(v + 1) * self.m]
    }

    pub fn self_loops(&self, v: usize) -> usize {
        self.out_heads(v).iter().filter(|&&h| h == v).count()
    }

    /// Appends vertex `sigma` at `position` with the given edge heads; a head
    /// equal to `sigma` is a self-loop. Panics if `heads.len() != m`.
    pub fn push_vertex(&mut self, position: SpherePoint<T>, heads: &[usize]) {
        assert_eq!(heads.len(), self.m, "exactly m edge heads per vertex");
        let v = self.sigma();
        self.positions.push(position);
        self.degree.push(self.m as u64);
        for &h in heads {
            assert!(h <= v, "head {h} refers to a vertex not yet present");
            self.degree[h] += 1;
            self.heads.push(h);
        }
    }

    /// Verifies out-degree ≡ m, `d(v) = m + in-degree(v)` and `Σd = 2mσ`.
    pub fn check_invariants(&self) -> Result<(), InvariantViolation> {
        let sigma = self.sigma();
        if self.heads.len() != self.m * sigma {
            return Err(InvariantViolation::OutDegree {
                edges: self.heads.len(),
                expected: self.m * sigma,
            });
        }
        let mut indeg = vec![0u64; sigma];
        for (i, &h) in self.heads.iter().enumerate() {
            if h > i / self.m {
                return Err(InvariantViolation::FutureHead { edge: i, head: h });
            }
            indeg[h] += 1;
        }
        for (v, (&d, &k)) in self.degree.iter().zip(&indeg).enumerate() {
            if d != self.m as u64 + k {
                return Err(InvariantViolation::Degree {
                    vertex: v,
                    degree: d,
                    expected: self.m as u64 + k,
                });
            }
        }
        let sum: u64 = self.degree.iter().sum();
        let expected = 2 * (self.m * sigma) as u64;
        if sum != expected {
            return Err(InvariantViolation::DegreeSum { sum, expected });
        }
        Ok(())
    }

    /// Keeps only the first `sigma` vertices (and their edges).
    pub fn truncated(&self, sigma: usize) -> Self
    where
        T: Clone,
    {
        let mut out = Self::with_capacity(self.m, sigma);
        for v in 0..sigma.min(self.sigma()) {
            out.push_vertex(self.positions[v], self.out_heads(v));
        }
        out
    }
}
