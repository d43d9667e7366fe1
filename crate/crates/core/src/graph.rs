//! Immutable simple undirected graphs on dense vertex ids `0..n`.
//!
//! Edges are stored sorted-normalized (`u < v`, lexicographic order) so that
//! two graphs with the same edge set are equal, hash equally and serialize to
//! the same bytes.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Errors raised while building or transforming a [`Graph`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge {{{0}, {1}}} is not present in the graph")]
    NotAnEdge(usize, usize),
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
}

/// A simple undirected graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

#[inline]
pub(crate) fn normalize(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Builds a graph from arbitrary vertex pairs. Reversed and repeated
    /// pairs collapse to a single edge.
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in pairs {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            set.insert(normalize(u, v));
        }
        Ok(Self::from_sorted_unchecked(n, set.into_iter().collect()))
    }

    /// `edges` must be sorted, deduplicated, normalized and in range.
    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(u, v)| u < v && v < n));
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unchecked(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::from_sorted_unchecked(n, edges)
    }

    /// `K_{a,b}` with sides `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut edges = Vec::with_capacity(a * b);
        for u in 0..a {
            for v in a..a + b {
                edges.push((u, v));
            }
        }
        Self::from_sorted_unchecked(a + b, edges)
    }

    /// Order (number of vertices).
    pub fn order(&self) -> usize {
        self.n
    }

    /// Size (number of edges).
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && u != v && self.adj[u].binary_search(&v).is_ok()
    }

    /// Neighborhood bitmask; only meaningful for graphs with at most 64 vertices.
    pub(crate) fn neighbor_mask(&self, v: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.adj[v].iter().fold(0u64, |m, &w| m | (1 << w))
    }

    pub fn complement(&self) -> Self {
        let mut edges = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2 - self.size());
        for u in 0..self.n {
            let mut it = self.adj[u].iter().peekable();
            for v in u + 1..self.n {
                while it.peek().is_some_and(|&&w| w < v) {
                    it.next();
                }
                if it.peek() != Some(&&v) {
                    edges.push((u, v));
                }
            }
        }
        Self::from_sorted_unchecked(self.n, edges)
    }

    /// Vertices of `other` are shifted by `self.order()`.
    pub fn disjoint_union(&self, other: &Graph) -> Self {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        Self::from_sorted_unchecked(self.n + other.n, edges)
    }

    /// Deletes `vertices` and relabels the survivors order-preservingly.
    ///
    /// Returns the new graph together with the map from new to old labels.
    pub fn delete_vertices(&self, vertices: &[usize]) -> Result<(Self, Vec<usize>), GraphError> {
        let mut keep = vec![true; self.n];
        for &v in vertices {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            keep[v] = false;
        }
        let kept: Vec<usize> = (0..self.n).filter(|&v| keep[v]).collect();
        Ok((self.induced_by_mask(&keep), kept))
    }

    /// Induced subgraph on `vertices` (any order, duplicates ignored),
    /// relabeled by ascending original label.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<(Self, Vec<usize>), GraphError> {
        let mut keep = vec![false; self.n];
        for &v in vertices {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            keep[v] = true;
        }
        let kept: Vec<usize> = (0..self.n).filter(|&v| keep[v]).collect();
        Ok((self.induced_by_mask(&keep), kept))
    }

    fn induced_by_mask(&self, keep: &[bool]) -> Self {
        let mut relabel = vec![usize::MAX; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if keep[v] {
                relabel[v] = next;
                next += 1;
            }
        }
        // Relabeling is monotone, so canonical order is preserved.
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| keep[u] && keep[v])
            .map(|&(u, v)| (relabel[u], relabel[v]))
            .collect();
        Self::from_sorted_unchecked(next, edges)
    }

    /// Removes every edge in `remove`; each must be present.
    pub fn remove_edges(&self, remove: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut drop = BTreeSet::new();
        for &(u, v) in remove {
            if !self.has_edge(u, v) {
                return Err(GraphError::NotAnEdge(u, v));
            }
            drop.insert(normalize(u, v));
        }
        let edges = self.edges.iter().copied().filter(|e| !drop.contains(e)).collect();
        Ok(Self::from_sorted_unchecked(self.n, edges))
    }

    /// Adds edges (already-present ones are ignored).
    pub fn add_edges(&self, add: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        Self::new(self.n, self.edges.iter().copied().chain(add))
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Two-colouring if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n];
        for start in 0..self.n {
            if side[start].is_some() {
                continue;
            }
            side[start] = Some(false);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                let sv = side[v].unwrap();
                for &w in &self.adj[v] {
                    match side[w] {
                        None => {
                            side[w] = Some(!sv);
                            stack.push(w);
                        }
                        Some(sw) if sw == sv => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(Option::unwrap).collect())
    }
}

/// Graph families the generator knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Complete { n: usize },
    Empty { n: usize },
    CompleteBipartite { a: usize, b: usize },
    /// Clique on `s` vertices joined completely to an independent set of
    /// `n - s` vertices; extremal for small matching number.
    ExtremalI { n: usize, s: usize },
    /// `K_{2s+1}` plus `n - 2s - 1` isolated vertices; extremal for large
    /// matching number.
    ExtremalII { n: usize, s: usize },
}

pub fn generate(kind: GraphKind) -> Result<Graph, GraphError> {
    match kind {
        GraphKind::Complete { n } => Ok(Graph::complete(n)),
        GraphKind::Empty { n } => Ok(Graph::empty(n)),
        GraphKind::CompleteBipartite { a, b } => Ok(Graph::complete_bipartite(a, b)),
        GraphKind::ExtremalI { n, s } => {
            if s > n {
                return Err(GraphError::InvalidParameters(format!(
                    "extremal_i needs s <= n, got n={n}, s={s}"
                )));
            }
            // The complement is K_{n-s} plus s isolated vertices.
            Ok(Graph::complete(n - s).disjoint_union(&Graph::empty(s)).complement())
        }
        GraphKind::ExtremalII { n, s } => {
            if 2 * s + 1 > n {
                return Err(GraphError::InvalidParameters(format!(
                    "extremal_ii needs 2s+1 <= n, got n={n}, s={s}"
                )));
            }
            Ok(Graph::complete(2 * s + 1).disjoint_union(&Graph::empty(n - 2 * s - 1)))
        }
    }
}
