//! Explicit families of matchings.
//!
//! * [`extract_bipartite_family`]: in a bipartite graph close to `K_{a,k}`,
//!   fixes an `A`-saturating matching `M`, picks a set `A′ ⊆ A` of vertices
//!   with many neighbors outside `V(M)`, and emits every injective
//!   assignment of `A′` into `K ∖ V(M)`, completed by `M` on `A ∖ A′`.
//! * [`build_swap_family`] / [`emit_swap_matchings`]: for a perfect matching
//!   `M = {x_i y_i}` of a near-complete graph, every matching `N` of the swap
//!   graph `H` yields the perfect matching `M(N)` that swaps `x_i y_i, x_j y_j`
//!   for `x_i y_j, x_j y_i` along each `z_i z_j ∈ N`.
//!
//! Both families are streamed lazily; their sizes are counted exactly.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::falling_factorial;
use crate::count::{count_saturating_bipartite, BigCount, CountError, CountLimits};
use crate::graph::Graph;
use crate::matching::{maximum_matching, validate_matching, Matching, MatchingMode};
use crate::rational::{ceil_sub_sqrt, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructiveError {
    #[error("graph is not bipartite with the given side: {0}")]
    NotBipartite(String),
    #[error("no matching saturates every vertex of A")]
    NoSaturatingMatching,
    #[error("graph has odd order {0}")]
    OddOrder(usize),
    #[error("matching is not a perfect matching of the graph")]
    NotPerfect,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Count(#[from] CountError),
}

/// One precondition of a lemma and whether the instance satisfies it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> HypothesisCheck {
    HypothesisCheck { name: name.to_string(), passed, detail }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ExtractMode {
    /// Constants `1.1`, `0.08`, `0.2`.
    Fixed,
    /// `εk/2 ≥ a` and at most `γak` missing edges.
    Parameterized {
        #[serde(with = "crate::rational::json")]
        epsilon: Rational,
        #[serde(with = "crate::rational::json")]
        gamma: Rational,
    },
}

/// The saturating matchings produced by the extractor, as a lazy family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteFamily {
    /// The `A`-saturating base matching.
    pub base: Matching,
    /// Vertices re-routed outside `V(M)`, in selection order.
    pub a_prime: Vec<usize>,
    /// `options[i]`: neighbors of `a_prime[i]` outside `V(M)`, ascending.
    options: Vec<Vec<usize>>,
    /// Base edges kept unchanged (those at `A ∖ A′`).
    kept: Vec<(usize, usize)>,
}

impl BipartiteFamily {
    /// Streams the family in lexicographic order of assignments.
    pub fn iter(&self) -> BipartiteWitnesses<'_> {
        BipartiteWitnesses { fam: self, pos: Vec::new(), taken: Vec::new(), started: false, done: false }
    }
}

pub struct BipartiteWitnesses<'f> {
    fam: &'f BipartiteFamily,
    /// `pos[i]`: index into `options[i]` of the current choice.
    pos: Vec<usize>,
    taken: Vec<usize>,
    started: bool,
    done: bool,
}

impl BipartiteWitnesses<'_> {
    fn current(&self) -> Matching {
        let assigned = self.fam.a_prime.iter().zip(&self.taken).map(|(&u, &w)| (u, w));
        Matching::new(self.fam.kept.iter().copied().chain(assigned))
    }

    /// Extends the partial assignment to full depth, trying choices from
    /// `start` at the current depth. Returns false once exhausted.
    fn fill(&mut self, mut start: usize) -> bool {
        let opts = &self.fam.options;
        loop {
            let depth = self.pos.len();
            if depth == opts.len() {
                return true;
            }
            match (start..opts[depth].len()).find(|&i| !self.taken.contains(&opts[depth][i])) {
                Some(i) => {
                    self.pos.push(i);
                    self.taken.push(opts[depth][i]);
                    start = 0;
                }
                None => {
                    let Some(last) = self.pos.pop() else { return false };
                    self.taken.pop();
                    start = last + 1;
                }
            }
        }
    }
}

impl Iterator for BipartiteWitnesses<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        let ok = if !self.started {
            self.started = true;
            self.fill(0)
        } else {
            match self.pos.pop() {
                Some(last) => {
                    self.taken.pop();
                    self.fill(last + 1)
                }
                None => false,
            }
        };
        if ok {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractionReport {
    pub a: usize,
    pub k: usize,
    /// `a·k − m(h)`.
    pub missing_edges: u64,
    #[serde(flatten)]
    pub mode: ExtractMode,
    /// The lemma's lower bound on the number of saturating matchings.
    pub target_bound: BigCount,
    /// Exact size of the emitted family.
    pub emitted: BigCount,
    #[serde(rename = "A_prime")]
    pub a_prime: Vec<usize>,
    /// Size `A′` should have for the bound.
    pub a_prime_target: usize,
    pub hypotheses: Vec<HypothesisCheck>,
    /// Capped list of emitted matchings, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Matching>>,
    #[serde(skip)]
    pub family: BipartiteFamily,
}

impl ExtractionReport {
    pub fn hypotheses_passed(&self) -> bool {
        self.hypotheses.iter().all(|h| h.passed)
    }

    /// `emitted ≥ target_bound`.
    pub fn meets_target(&self) -> bool {
        self.emitted >= self.target_bound
    }
}

/// `⌈num / den⌉` for `den > 0`.
fn ceil_div(num: i64, den: i64) -> i64 {
    num.div_euclid(den) + i64::from(num.rem_euclid(den) != 0)
}

/// Builds the saturating family of `h` with `A = side_a` and `K` the other
/// vertices. Lemma preconditions are checked and reported; extraction runs
/// regardless. `cap` bounds the witness list (`None` lists nothing).
pub fn extract_bipartite_family(
    h: &Graph,
    side_a: &[usize],
    mode: ExtractMode,
    cap: Option<usize>,
) -> Result<ExtractionReport, ConstructiveError> {
    let n = h.order();
    let mut in_a = vec![false; n];
    for &u in side_a {
        if u >= n || std::mem::replace(&mut in_a[u], true) {
            return Err(ConstructiveError::NotBipartite(format!("side entry {u} is out of range or repeated")));
        }
    }
    if let Some(&(u, v)) = h.edges().iter().find(|&&(u, v)| in_a[u] == in_a[v]) {
        return Err(ConstructiveError::NotBipartite(format!("edge {{{u}, {v}}} lies inside one side")));
    }
    if let ExtractMode::Parameterized { epsilon, gamma } = &mode {
        for (name, v) in [("ε", epsilon), ("γ", gamma)] {
            if !v.is_positive() || v >= &int(1) {
                return Err(ConstructiveError::InvalidParameters(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
    }
    let a = side_a.len();
    let k = n - a;
    let base = maximum_matching(h);
    if base.len() != a {
        return Err(ConstructiveError::NoSaturatingMatching);
    }
    let mut in_m = vec![false; n];
    for &(u, v) in base.pairs() {
        in_m[u] = true;
        in_m[v] = true;
    }
    let m = h.size() as u64;
    let (ai, ki) = (a as i64, k as i64);
    let missing = (a * k) as u64 - m;
    let free = |u: usize| h.neighbors(u).iter().filter(|&&w| !in_m[w]).count();

    let mut a_sorted: Vec<usize> = (0..n).filter(|&v| in_a[v]).collect();
    a_sorted.sort_by_key(|&u| (std::cmp::Reverse(free(u)), u));

    let mut hypotheses = vec![check("a ≥ 1", a >= 1, format!("a = {a}"))];
    let (candidates, need, top): (Vec<usize>, usize, i64) = match &mode {
        ExtractMode::Fixed => {
            // ⌈k − 1.1a⌉ and ⌈0.2a⌉ in integer arithmetic.
            let top = ceil_div(10 * ki - 11 * ai, 10);
            let need = a.div_ceil(5).min(top.max(0) as usize);
            hypotheses.push(check("k > 1.1a", 10 * ki > 11 * ai, format!("k = {k}, a = {a}")));
            hypotheses.push(check(
                "missing ≤ 0.08a²",
                100 * missing <= 8 * (a * a) as u64,
                format!("missing = {missing}, a = {a}"),
            ));
            let cands = a_sorted.iter().copied().filter(|&u| 10 * free(u) as i64 >= 10 * ki - 11 * ai).collect();
            (cands, need, top)
        }
        ExtractMode::Parameterized { epsilon, gamma } => {
            let keep = int(1) - epsilon / int(2);
            let top = ceil_sub_sqrt(&(&keep * int(ki)), &int(ki), gamma);
            let need = ceil_sub_sqrt(&(&keep * int(ai)), &int(ai), gamma).max(0) as usize;
            hypotheses.push(check(
                "εk/2 ≥ a",
                epsilon * int(ki) / int(2) >= int(ai),
                format!("ε = {epsilon}, k = {k}, a = {a}"),
            ));
            hypotheses.push(check(
                "missing ≤ γak",
                int(missing as i64) <= gamma * int(ai * ki),
                format!("missing = {missing}, γ = {gamma}, a = {a}, k = {k}"),
            ));
            // deg ≥ (1 − √γ)k  ⇔  k − deg ≤ 0  or  (k − deg)² ≤ γk².
            let cands = a_sorted
                .iter()
                .copied()
                .filter(|&u| {
                    let gap = ki - h.degree(u) as i64;
                    gap <= 0 || int(gap * gap) <= gamma * int(ki * ki)
                })
                .collect();
            (cands, need, top)
        }
    };
    let target_bound = if need as i64 <= top.max(0) {
        falling_factorial(top.max(0) as u64, need as u64).expect("need ≤ top")
    } else {
        BigCount::zero()
    };

    let a_prime: Vec<usize> = candidates.iter().copied().take(need).collect();
    if a_prime.len() < need && matches!(mode, ExtractMode::Fixed) {
        // Too few candidates forces m(h) < ak − 0.08a².
        let holds = 100 * m < (100 * a * k) as u64 - 8 * (a * a) as u64;
        hypotheses.push(check(
            "counting argument: m < ak − 0.08a²",
            holds,
            format!("{} candidates < {need}, m = {m}", a_prime.len()),
        ));
        assert!(holds, "too few candidates although m = {m} ≥ ak − 0.08a² with a = {a}, k = {k}");
    }

    let mate = base.mates(n);
    let mut is_prime = vec![false; n];
    for &u in &a_prime {
        is_prime[u] = true;
    }
    let kept = base.pairs().iter().copied().filter(|&(u, v)| !is_prime[u] && !is_prime[v]).collect();
    let options: Vec<Vec<usize>> =
        a_prime.iter().map(|&u| h.neighbors(u).iter().copied().filter(|&w| !in_m[w]).collect()).collect();
    debug_assert!(a_prime.iter().all(|&u| mate[u].is_some()));
    let family = BipartiteFamily { base, a_prime: a_prime.clone(), options, kept };

    // The family size is the number of A′-saturating matchings into K ∖ V(M).
    let mut sub_edges = Vec::new();
    let mut pool: Vec<usize> = family.options.iter().flatten().copied().collect();
    pool.sort_unstable();
    pool.dedup();
    for (i, opts) in family.options.iter().enumerate() {
        for &w in opts {
            let j = pool.binary_search(&w).expect("pooled");
            sub_edges.push((i, family.a_prime.len() + j));
        }
    }
    let sub = Graph::new(family.a_prime.len() + pool.len(), sub_edges).expect("valid");
    let sub_a: Vec<usize> = (0..family.a_prime.len()).collect();
    let emitted = count_saturating_bipartite(&sub, &sub_a, &CountLimits::default())?;

    let witnesses = cap.map(|c| family.iter().take(c).collect());
    Ok(ExtractionReport {
        a,
        k,
        missing_edges: missing,
        mode,
        target_bound,
        emitted,
        a_prime,
        a_prime_target: need,
        hypotheses,
        witnesses,
        family,
    })
}

/// Swap structure of a perfect matching in a near-complete graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapFamily {
    pub p: usize,
    /// The base perfect matching; `pairs[i] = (x_i, y_i)` with `x_i < y_i`.
    pub base: Matching,
    /// The swap graph on `z_0 … z_{p−1}`.
    #[serde(skip)]
    pub h: Graph,
    pub h_edges: usize,
    /// `|{v : deg_H(v) ≥ 0.895p}|`.
    pub high_degree_count: usize,
    /// The selected set `X`.
    pub x_set: Vec<usize>,
    /// `⌈0.447p⌉`.
    pub x_target: usize,
    /// Every `X` vertex has `≥ ⌈0.447p⌉` neighbors outside `X` and
    /// `|X| ≥ ⌈0.447p⌉`.
    pub x_verified: bool,
    pub hypotheses: Vec<HypothesisCheck>,
}

impl SwapFamily {
    fn pair(&self, i: usize) -> (usize, usize) {
        self.base.pairs()[i]
    }

    /// `M(N)` for a matching `N` of `H`.
    pub fn apply(&self, n: &[(usize, usize)]) -> Matching {
        let mut out: Vec<(usize, usize)> = self.base.pairs().to_vec();
        for &(i, j) in n {
            let ((xi, yi), (xj, yj)) = (self.pair(i), self.pair(j));
            out[i] = (xi, yj);
            out[j] = (xj, yi);
        }
        Matching::new(out)
    }

    /// Recovers `N` from `M(N)`.
    pub fn decode(&self, m: &Matching, order: usize) -> Vec<(usize, usize)> {
        let mate = m.mates(order);
        let mut index_of_y = vec![usize::MAX; order];
        for (i, &(_, y)) in self.base.pairs().iter().enumerate() {
            index_of_y[y] = i;
        }
        let mut n = Vec::new();
        for (i, &(x, _)) in self.base.pairs().iter().enumerate() {
            let j = mate[x].map_or(usize::MAX, |y| index_of_y[y]);
            if i < j && j != usize::MAX {
                n.push((i, j));
            }
        }
        n
    }

    /// Number of matchings of `H` (the family size) when `p ≤ 40`.
    pub fn size(&self) -> Option<BigCount> {
        if self.p > 40 {
            return None;
        }
        fn go(mask: u64, nbr: &[u64], memo: &mut HashMap<u64, BigUint>) -> BigUint {
            if mask == 0 {
                return BigUint::from(1u8);
            }
            if let Some(v) = memo.get(&mask) {
                return v.clone();
            }
            let low = mask.trailing_zeros() as usize;
            let rest = mask & !(1u64 << low);
            let mut total = go(rest, nbr, memo);
            let mut cands = nbr[low] & rest;
            while cands != 0 {
                let v = cands.trailing_zeros();
                cands &= cands - 1;
                total += go(rest & !(1u64 << v), nbr, memo);
            }
            memo.insert(mask, total.clone());
            total
        }
        let nbr: Vec<u64> = (0..self.p).map(|v| self.h.neighbor_mask(v)).collect();
        let full = if self.p == 64 { u64::MAX } else { (1u64 << self.p) - 1 };
        Some(go(full, &nbr, &mut HashMap::new()).into())
    }
}

/// Builds `H` for the perfect matching `m` of `k_graph` and selects `X`.
pub fn build_swap_family(k_graph: &Graph, m: &Matching) -> Result<SwapFamily, ConstructiveError> {
    let order = k_graph.order();
    if order % 2 == 1 {
        return Err(ConstructiveError::OddOrder(order));
    }
    if !validate_matching(k_graph, m, MatchingMode::Perfect).is_valid() {
        return Err(ConstructiveError::NotPerfect);
    }
    let p = order / 2;
    let pairs = m.pairs();
    let mut h_edges = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            let ((xi, yi), (xj, yj)) = (pairs[i], pairs[j]);
            if k_graph.has_edge(xi, yj) && k_graph.has_edge(xj, yi) {
                h_edges.push((i, j));
            }
        }
    }
    let h = Graph::new(p, h_edges).expect("indices in range");

    // deg ≥ 0.895p  ⇔  1000·deg ≥ 895p.
    let high = |deg: usize| 1000 * deg >= 895 * p;
    let high_degree_count = (0..p).filter(|&v| high(h.degree(v))).count();
    let mut alive: Vec<bool> = vec![true; p];
    loop {
        let drop: Vec<usize> = (0..p)
            .filter(|&v| alive[v] && !high(h.neighbors(v).iter().filter(|&&w| alive[w]).count()))
            .collect();
        if drop.is_empty() {
            break;
        }
        for v in drop {
            alive[v] = false;
        }
    }
    let x_target = (447 * p).div_ceil(1000);
    let mut survivors: Vec<usize> = (0..p).filter(|&v| alive[v]).collect();
    survivors.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v)), v));
    let mut x_set: Vec<usize> = survivors.into_iter().take(x_target).collect();
    x_set.sort_unstable();
    let mut in_x = vec![false; p];
    for &v in &x_set {
        in_x[v] = true;
    }
    let x_verified = x_set.len() >= x_target
        && x_set.iter().all(|&v| h.neighbors(v).iter().filter(|&&w| !in_x[w]).count() >= x_target);

    let missing = (order * order.saturating_sub(1) / 2 - k_graph.size()) as u64;
    let pairs_p = (p * p.saturating_sub(1) / 2) as u64;
    let hypotheses = vec![
        check("p ≥ 1000", p >= 1000, format!("p = {p}")),
        check("missing ≤ 0.01·C(p, 2)", 100 * missing <= pairs_p, format!("missing = {missing}, C(p, 2) = {pairs_p}")),
        check(
            "m(H) ≥ C(p, 2) − missing",
            h.size() as u64 + missing >= pairs_p,
            format!("m(H) = {}, missing = {missing}", h.size()),
        ),
    ];
    Ok(SwapFamily {
        p,
        base: m.clone(),
        h_edges: h.size(),
        h,
        high_degree_count,
        x_set,
        x_target,
        x_verified,
        hypotheses,
    })
}

/// Streams `M(N)` over all matchings `N` of `H`: `∅` first, then in
/// lexicographic order of edge-index sequences. Each output is decoded
/// back to `N` to confirm the map is injective.
pub fn emit_swap_matchings(fam: &SwapFamily, cap: Option<usize>) -> SwapMatchings<'_> {
    SwapMatchings { fam, stack: Vec::new(), used: vec![false; fam.p], started: false, remaining: cap }
}

pub struct SwapMatchings<'f> {
    fam: &'f SwapFamily,
    /// Chosen edge indices of `N`, increasing.
    stack: Vec<usize>,
    used: Vec<bool>,
    started: bool,
    remaining: Option<usize>,
}

impl SwapMatchings<'_> {
    fn next_free_edge(&self, from: usize) -> Option<usize> {
        let edges = self.fam.h.edges();
        (from..edges.len()).find(|&e| !self.used[edges[e].0] && !self.used[edges[e].1])
    }

    fn set(&mut self, e: usize, value: bool) {
        let (i, j) = self.fam.h.edges()[e];
        self.used[i] = value;
        self.used[j] = value;
    }

    fn emit(&mut self) -> Option<Matching> {
        if let Some(r) = &mut self.remaining {
            *r -= 1;
        }
        let edges = self.fam.h.edges();
        let n: Vec<(usize, usize)> = self.stack.iter().map(|&e| edges[e]).collect();
        let out = self.fam.apply(&n);
        let order = 2 * self.fam.p;
        assert_eq!(self.fam.decode(&out, order), n, "swap map is not injective");
        Some(out)
    }
}

impl Iterator for SwapMatchings<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.remaining == Some(0) {
            return None;
        }
        if !self.started {
            self.started = true;
            return self.emit();
        }
        // Pre-order: descend if possible, else advance the deepest edge.
        let mut from = self.stack.last().map_or(0, |&e| e + 1);
        loop {
            if let Some(e) = self.next_free_edge(from) {
                self.stack.push(e);
                self.set(e, true);
                return self.emit();
            }
            let e = self.stack.pop()?;
            self.set(e, false);
            from = e + 1;
        }
    }
}

/// Minimum `ceil(0.447p)!` promised for `p ≥ 1000`.
pub fn swap_lemma_bound(p: u64) -> BigCount {
    let q = (447 * p).div_ceil(1000);
    falling_factorial(q, q).expect("k = n")
}

/// Counts `A`-saturating matchings of a bipartite graph by enumeration;
/// used as an oracle and for small reports.
pub fn saturating_matchings_enumerated(h: &Graph, side_a: &[usize]) -> u64 {
    fn rec(h: &Graph, side: &[usize], i: usize, used: &mut [bool]) -> u64 {
        if i == side.len() {
            return 1;
        }
        let u = side[i];
        let mut total = 0;
        for &w in h.neighbors(u) {
            if !used[w] {
                used[w] = true;
                total += rec(h, side, i + 1, used);
                used[w] = false;
            }
        }
        total
    }
    rec(h, side_a, 0, &mut vec![false; h.order()])
}
