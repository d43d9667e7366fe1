//! Maximum cardinality matching in general graphs.
//!
//! The engine is Edmonds' augmenting-path search with blossom contraction
//! (array-based, one BFS per root). [`maximum_matching`] additionally
//! canonicalizes the answer to the lexicographically smallest maximum
//! matching, so reports and tests are reproducible.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::{normalize, Graph};

pub(crate) const NONE: usize = usize::MAX;

/// A set of vertex pairs, stored sorted-normalized.
///
/// Disjointness and membership in a host graph are *not* enforced on
/// construction; use [`validate_matching`] for that.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().map(|(u, v)| normalize(u, v)).collect();
        pairs.sort_unstable();
        Self { pairs }
    }

    pub(crate) fn from_mates(mate: &[usize]) -> Self {
        let pairs = mate
            .iter()
            .enumerate()
            .filter(|&(u, &v)| v != NONE && u < v)
            .map(|(u, &v)| (u, v))
            .collect();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.pairs.binary_search(&normalize(u, v)).is_ok()
    }

    /// Partner of each vertex of an `n`-vertex host, if saturated.
    pub fn mates(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for &(u, v) in &self.pairs {
            out[u] = Some(v);
            out[v] = Some(u);
        }
        out
    }
}

/// Scratch state for augmenting-path searches on the alive part of a graph.
pub(crate) struct Blossom<'g> {
    g: &'g Graph,
    pub(crate) alive: Vec<bool>,
    pub(crate) mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    outer: Vec<bool>,
    in_blossom: Vec<bool>,
    on_path: Vec<bool>,
    root_of: Vec<usize>,
    queue: VecDeque<usize>,
}

impl<'g> Blossom<'g> {
    pub(crate) fn new(g: &'g Graph) -> Self {
        let n = g.order();
        Self {
            g,
            alive: vec![true; n],
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            outer: vec![false; n],
            in_blossom: vec![false; n],
            on_path: vec![false; n],
            root_of: vec![NONE; n],
            queue: VecDeque::new(),
        }
    }

    pub(crate) fn size(&self) -> usize {
        self.mate.iter().filter(|&&m| m != NONE).count() / 2
    }

    /// Greedy start followed by one search per free vertex.
    pub(crate) fn maximize(&mut self) {
        let n = self.g.order();
        for &(u, v) in self.g.edges() {
            if self.alive[u] && self.alive[v] && self.mate[u] == NONE && self.mate[v] == NONE {
                self.mate[u] = v;
                self.mate[v] = u;
            }
        }
        for root in 0..n {
            if self.alive[root] && self.mate[root] == NONE {
                self.augment_from(root);
            }
        }
    }

    /// Searches for an augmenting path from the free vertex `root` and
    /// applies it. Returns whether the matching grew.
    pub(crate) fn augment_from(&mut self, root: usize) -> bool {
        match self.search(&[root]) {
            Some(end) => {
                self.flip(end);
                true
            }
            None => false,
        }
    }

    fn reset(&mut self) {
        let n = self.g.order();
        self.parent.fill(NONE);
        self.outer.fill(false);
        self.root_of.fill(NONE);
        for v in 0..n {
            self.base[v] = v;
        }
        self.queue.clear();
    }

    fn is_outer(&self, v: usize) -> bool {
        self.outer[v]
    }

    /// Grows an alternating forest from `roots`. Returns the free endpoint
    /// of an augmenting path if one is found; `None` leaves the final forest
    /// labels in place.
    fn search(&mut self, roots: &[usize]) -> Option<usize> {
        self.reset();
        for &r in roots {
            debug_assert!(self.alive[r] && self.mate[r] == NONE);
            self.outer[r] = true;
            self.root_of[r] = r;
            self.queue.push_back(r);
        }
        while let Some(v) = self.queue.pop_front() {
            for i in 0..self.g.neighbors(v).len() {
                let to = self.g.neighbors(v)[i];
                if !self.alive[to] || self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if self.is_outer(to) {
                    // Two trees meeting means the caller's matching was not
                    // maximum; only possible in multi-root searches.
                    assert_eq!(self.root_of[to], self.root_of[v], "augmenting path between two forest roots");
                    self.contract(v, to);
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    self.root_of[to] = self.root_of[v];
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.outer[next] = true;
                    self.root_of[next] = self.root_of[v];
                    self.queue.push_back(next);
                }
            }
        }
        None
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.on_path.fill(false);
        loop {
            a = self.base[a];
            self.on_path[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.on_path[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            let m = self.mate[v];
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[m]] = true;
            self.parent[v] = child;
            child = m;
            v = self.parent[m];
        }
    }

    fn contract(&mut self, v: usize, to: usize) {
        let b = self.lca(v, to);
        self.in_blossom.fill(false);
        self.mark_path(v, b, to);
        self.mark_path(to, b, v);
        for i in 0..self.g.order() {
            if self.alive[i] && self.in_blossom[self.base[i]] {
                self.base[i] = b;
                if !self.outer[i] {
                    self.outer[i] = true;
                    self.root_of[i] = self.root_of[v];
                    self.queue.push_back(i);
                }
            }
        }
    }

    fn flip(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let next = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = next;
        }
    }

    /// Runs one forest search rooted at every free alive vertex of a maximum
    /// matching and returns the outer (even) labels.
    pub(crate) fn outer_vertices(&mut self) -> Vec<bool> {
        let roots: Vec<usize> =
            (0..self.g.order()).filter(|&v| self.alive[v] && self.mate[v] == NONE).collect();
        let found = self.search(&roots);
        assert!(found.is_none(), "matching passed to the forest search is not maximum");
        self.outer.clone()
    }

    /// Deletes `u` and `v` and repairs the matching. Succeeds iff the edge
    /// `uv` lies in some maximum matching of the alive graph; on failure the
    /// state is restored.
    fn commit_edge(&mut self, u: usize, v: usize) -> bool {
        let (mu, mv) = (self.mate[u], self.mate[v]);
        if mu == v {
            self.kill(u);
            self.kill(v);
            return true;
        }
        let saved = self.mate.clone();
        self.kill(u);
        self.kill(v);
        let freed: Vec<usize> = [mu, mv].into_iter().filter(|&w| w != NONE).collect();
        debug_assert!(!freed.is_empty(), "free-free edge contradicts maximality");
        if freed.len() < 2 || freed.iter().any(|&w| self.augment_from(w)) {
            return true;
        }
        self.mate = saved;
        self.alive[u] = true;
        self.alive[v] = true;
        false
    }

    fn kill(&mut self, u: usize) {
        let m = self.mate[u];
        if m != NONE {
            self.mate[m] = NONE;
            self.mate[u] = NONE;
        }
        self.alive[u] = false;
    }
}

/// Some maximum matching, as fast as the engine allows. No tie-breaking
/// guarantee beyond determinism.
pub fn maximum_matching_unordered(g: &Graph) -> Matching {
    let mut b = Blossom::new(g);
    b.maximize();
    Matching::from_mates(&b.mate)
}

/// The lexicographically smallest maximum matching (sorted edge lists
/// compared lexicographically).
///
/// Built greedily: vertices are scanned in increasing order and each is
/// matched to its smallest neighbor whose edge still extends to a maximum
/// matching of the remaining graph.
pub fn maximum_matching(g: &Graph) -> Matching {
    let mut b = Blossom::new(g);
    b.maximize();
    let mut pairs = Vec::with_capacity(b.size());
    for u in 0..g.order() {
        if !b.alive[u] {
            continue;
        }
        let mut chosen = None;
        for &v in g.neighbors(u) {
            if v > u && b.alive[v] && b.commit_edge(u, v) {
                chosen = Some(v);
                break;
            }
        }
        match chosen {
            Some(v) => pairs.push((u, v)),
            None => {
                debug_assert_eq!(b.mate[u], NONE);
                b.alive[u] = false;
            }
        }
    }
    Matching { pairs }
}

/// Matching number ν(G).
pub fn matching_number(g: &Graph) -> usize {
    let mut b = Blossom::new(g);
    b.maximize();
    b.size()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingMode {
    Any,
    Perfect,
    Maximum,
}

/// Why a pair list fails to be a matching of the host graph at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingDefect {
    NotAnEdge(usize, usize),
    SharedVertex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingCheck {
    Valid,
    /// Not a matching of the graph.
    Invalid(MatchingDefect),
    /// A matching, but some vertex is left unsaturated.
    NotPerfect,
    /// A matching, but smaller than ν(G).
    NotMaximum,
}

impl MatchingCheck {
    pub fn is_valid(self) -> bool {
        self == MatchingCheck::Valid
    }
}

pub fn validate_matching(g: &Graph, m: &Matching, mode: MatchingMode) -> MatchingCheck {
    let mut used = vec![false; g.order()];
    for &(u, v) in m.pairs() {
        if !g.has_edge(u, v) {
            return MatchingCheck::Invalid(MatchingDefect::NotAnEdge(u, v));
        }
        for w in [u, v] {
            if used[w] {
                return MatchingCheck::Invalid(MatchingDefect::SharedVertex(w));
            }
            used[w] = true;
        }
    }
    match mode {
        MatchingMode::Any => MatchingCheck::Valid,
        MatchingMode::Perfect if 2 * m.len() != g.order() => MatchingCheck::NotPerfect,
        MatchingMode::Perfect => MatchingCheck::Valid,
        MatchingMode::Maximum if m.len() != matching_number(g) => MatchingCheck::NotMaximum,
        MatchingMode::Maximum => MatchingCheck::Valid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use proptest::prelude::*;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// Every matching of `g`, by plain recursion over the edge list.
    fn all_matchings(g: &Graph) -> Vec<Vec<(usize, usize)>> {
        fn rec(g: &Graph, i: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
            if i == g.size() {
                out.push(cur.clone());
                return;
            }
            rec(g, i + 1, used, cur, out);
            let (u, v) = g.edges()[i];
            if !used[u] && !used[v] {
                used[u] = true;
                used[v] = true;
                cur.push((u, v));
                rec(g, i + 1, used, cur, out);
                cur.pop();
                used[u] = false;
                used[v] = false;
            }
        }
        let mut out = Vec::new();
        rec(g, 0, &mut vec![false; g.order()], &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn small_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(maximum_matching(&k4).pairs(), &[(0, 1), (2, 3)]);
        assert!(maximum_matching(&Graph::empty(5)).is_empty());
        assert_eq!(maximum_matching(&cycle(5)).len(), 2);
        assert_eq!(matching_number(&Graph::new(3, [(0, 1), (1, 2)]).unwrap()), 1);
        assert_eq!(matching_number(&generate(GraphKind::ExtremalII { n: 6, s: 2 }).unwrap()), 2);
        assert_eq!(matching_number(&Graph::complete_bipartite(3, 7)), 3);
    }

    #[test]
    fn validation() {
        let k4 = Graph::complete(4);
        assert!(validate_matching(&k4, &Matching::new([(0, 1), (2, 3)]), MatchingMode::Perfect).is_valid());
        assert_eq!(validate_matching(&k4, &Matching::new([(0, 1)]), MatchingMode::Maximum), MatchingCheck::NotMaximum);
        assert_eq!(validate_matching(&k4, &Matching::new([(0, 1)]), MatchingMode::Perfect), MatchingCheck::NotPerfect);
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            validate_matching(&p3, &Matching::new([(0, 1), (1, 2)]), MatchingMode::Any),
            MatchingCheck::Invalid(MatchingDefect::SharedVertex(1))
        );
        assert_eq!(
            validate_matching(&p3, &Matching::new([(0, 2)]), MatchingMode::Any),
            MatchingCheck::Invalid(MatchingDefect::NotAnEdge(0, 2))
        );
    }

    #[test]
    fn petersen_has_perfect_matching() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = Graph::new(10, outer.chain(spokes).chain(inner)).unwrap();
        let m = maximum_matching(&g);
        assert!(validate_matching(&g, &m, MatchingMode::Perfect).is_valid());
    }

    #[test]
    fn large_dense_instance() {
        let g = generate(GraphKind::ExtremalI { n: 400, s: 60 }).unwrap();
        assert_eq!(matching_number(&g), 60);
        let m = maximum_matching(&g);
        assert_eq!(m.len(), 60);
        // Lexmin pairs each independent vertex 0..60 with the first clique vertex left.
        assert_eq!(m.pairs()[0], (0, 340));
    }

    fn graph_strategy() -> impl Strategy<Value = Graph> {
        (1usize..=10).prop_flat_map(|n| {
            let all: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let len = all.len();
            proptest::collection::vec(any::<bool>(), len)
                .prop_map(move |keep| Graph::new(n, all.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e)).unwrap())
        })
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(g in graph_strategy()) {
            let all = all_matchings(&g);
            let nu = all.iter().map(Vec::len).max().unwrap();
            prop_assert_eq!(matching_number(&g), nu);
            let mut maxima: Vec<_> = all.into_iter().filter(|m| m.len() == nu).collect();
            maxima.sort();
            let m = maximum_matching(&g);
            prop_assert_eq!(m.pairs(), &maxima[0][..]);
            prop_assert!(validate_matching(&g, &maximum_matching_unordered(&g), MatchingMode::Maximum).is_valid());
        }

        #[test]
        fn deleting_a_vertex_drops_nu_by_at_most_one(g in graph_strategy()) {
            let nu = matching_number(&g);
            for u in 0..g.order() {
                let (h, _) = g.delete_vertices(&[u]).unwrap();
                let d = matching_number(&h);
                prop_assert!(d == nu || d + 1 == nu);
            }
        }
    }
}
