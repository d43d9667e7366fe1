//! Exact counts of maximum matchings.
//!
//! Two independent routes:
//!
//! * brute force: [`enumerate_maximum_matchings`] walks every maximum
//!   matching in lexicographic order;
//! * decomposed: every maximum matching is a near-perfect matching in each
//!   component of `G[D]`, an `A`-saturating matching into pairwise distinct
//!   components, and a perfect matching of `G[C]`.
//!   [`count_maximum_matchings_decomposed`] multiplies those pieces and sums
//!   over the `A`-part with an inclusion–exclusion over subsets of `A`.

use std::collections::HashMap;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gallai_edmonds::{decompose, Decomposition};
use crate::graph::Graph;
use crate::matching::{matching_number, Matching};

/// Arbitrary-precision nonnegative count. Serializes as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn zero() -> Self {
        Self(BigUint::zero())
    }

    pub fn one() -> Self {
        Self(BigUint::one())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        Self(v.into())
    }
}

impl From<u128> for BigCount {
    fn from(v: u128) -> Self {
        Self(v.into())
    }
}

impl From<usize> for BigCount {
    fn from(v: usize) -> Self {
        Self(v.into())
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        Self(v)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for BigCount {
    type Err = num_bigint::ParseBigIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Self(s.parse()?))
    }
}

impl Add for BigCount {
    type Output = BigCount;

    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Mul for BigCount {
    type Output = BigCount;

    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a BigCount> for &'a BigCount {
    type Output = BigCount;

    fn mul(self, rhs: &BigCount) -> BigCount {
        BigCount(&self.0 * &rhs.0)
    }
}

impl Sum for BigCount {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), Add::add)
    }
}

impl Product for BigCount {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), Mul::mul)
    }
}

impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("subproblem too large for exact counting: {0}")]
    TooLarge(String),
    #[error("component is not factor-critical: {0}")]
    NotFactorCritical(String),
    #[error("graph is not bipartite with the given side: {0}")]
    NotBipartite(String),
}

/// Feasibility thresholds for the exact counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CountLimits {
    /// Largest `|A|` for the inclusion–exclusion over subsets of `A`.
    pub max_a: usize,
    /// Largest connected piece handed to the perfect-matching DP.
    pub max_component_order: usize,
    /// Largest order for which brute-force enumeration is attempted.
    pub max_bruteforce_order: usize,
}

impl Default for CountLimits {
    fn default() -> Self {
        Self { max_a: 22, max_component_order: 24, max_bruteforce_order: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Matched(usize),
    Skipped,
}

#[derive(Debug)]
struct Frame {
    u: usize,
    next: usize,
    step: Option<Step>,
}

/// Lazy stream of the maximum matchings of a graph in lexicographic order
/// of their sorted edge lists.
///
/// Vertices are decided in increasing order: the current vertex is either
/// matched to a larger free neighbor (ascending) or left exposed, with at
/// most `n − 2ν` vertices exposed overall.
pub struct MaximumMatchings<'g> {
    g: &'g Graph,
    skip_budget: usize,
    skips: usize,
    used: Vec<bool>,
    current: Vec<(usize, usize)>,
    stack: Vec<Frame>,
    remaining: Option<usize>,
    started: bool,
}

pub fn enumerate_maximum_matchings(g: &Graph, limit: Option<usize>) -> MaximumMatchings<'_> {
    let nu = matching_number(g);
    MaximumMatchings {
        g,
        skip_budget: g.order() - 2 * nu,
        skips: 0,
        used: vec![false; g.order()],
        current: Vec::with_capacity(nu),
        stack: Vec::new(),
        remaining: limit,
        started: false,
    }
}

impl MaximumMatchings<'_> {
    fn first_free_from(&self, from: usize) -> Option<usize> {
        (from..self.g.order()).find(|&w| !self.used[w])
    }

    fn undo(&mut self, u: usize, step: Step) {
        self.used[u] = false;
        match step {
            Step::Matched(v) => {
                self.used[v] = false;
                self.current.pop();
            }
            Step::Skipped => self.skips -= 1,
        }
    }

    fn emit(&mut self) -> Option<Matching> {
        if let Some(r) = &mut self.remaining {
            *r -= 1;
        }
        Some(Matching::new(self.current.iter().copied()))
    }
}

impl Iterator for MaximumMatchings<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.remaining == Some(0) {
            return None;
        }
        if !self.started {
            self.started = true;
            match self.first_free_from(0) {
                Some(u) => self.stack.push(Frame { u, next: 0, step: None }),
                None => return self.emit(),
            }
        }
        while let Some(top) = self.stack.last_mut() {
            let u = top.u;
            if let Some(step) = top.step.take() {
                self.undo(u, step);
            }
            let top = self.stack.last_mut().unwrap();
            let nbrs = self.g.neighbors(u);
            let mut step = None;
            while top.next < nbrs.len() {
                let v = nbrs[top.next];
                top.next += 1;
                if v > u && !self.used[v] {
                    step = Some(Step::Matched(v));
                    break;
                }
            }
            if step.is_none() && top.next == nbrs.len() {
                top.next += 1;
                if self.skips < self.skip_budget {
                    step = Some(Step::Skipped);
                }
            }
            let Some(step) = step else {
                self.stack.pop();
                continue;
            };
            top.step = Some(step);
            self.used[u] = true;
            match step {
                Step::Matched(v) => {
                    self.used[v] = true;
                    self.current.push((u, v));
                }
                Step::Skipped => self.skips += 1,
            }
            match self.first_free_from(u + 1) {
                Some(w) => self.stack.push(Frame { u: w, next: 0, step: None }),
                None => return self.emit(),
            }
        }
        None
    }
}

pub fn count_maximum_matchings_bruteforce(g: &Graph) -> BigCount {
    BigCount::from(enumerate_maximum_matchings(g, None).count())
}

/// Perfect matchings of a connected piece given by neighbor masks, via
/// memoized "match the lowest remaining vertex" recursion.
fn perfect_matchings_masked(nbr: &[u64]) -> Option<u128> {
    fn go(mask: u64, nbr: &[u64], memo: &mut HashMap<u64, Option<u128>>) -> Option<u128> {
        if mask == 0 {
            return Some(1);
        }
        if let Some(&v) = memo.get(&mask) {
            return v;
        }
        let low = mask.trailing_zeros() as usize;
        let rest = mask & !(1u64 << low);
        let mut cands = nbr[low] & rest;
        let mut total: u128 = 0;
        let mut overflow = false;
        while cands != 0 {
            let v = cands.trailing_zeros() as usize;
            cands &= cands - 1;
            match go(rest & !(1u64 << v), nbr, memo).and_then(|c| total.checked_add(c)) {
                Some(t) => total = t,
                None => {
                    overflow = true;
                    break;
                }
            }
        }
        let out = (!overflow).then_some(total);
        memo.insert(mask, out);
        out
    }
    let n = nbr.len();
    if n % 2 == 1 {
        return Some(0);
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    go(full, nbr, &mut HashMap::new())
}

/// Number of perfect matchings. Connected components are counted
/// independently and multiplied.
pub fn count_perfect_matchings(g: &Graph, limits: &CountLimits) -> Result<BigCount, CountError> {
    if g.order() % 2 == 1 {
        return Ok(BigCount::zero());
    }
    let comps = g.connected_components();
    if comps.iter().any(|c| c.len() % 2 == 1) {
        return Ok(BigCount::zero());
    }
    let mut total = BigCount::one();
    for comp in comps {
        if comp.len() > limits.max_component_order.min(64) {
            return Err(CountError::TooLarge(format!(
                "perfect-matching component of order {} exceeds {}",
                comp.len(),
                limits.max_component_order.min(64)
            )));
        }
        if comp.len() == 2 {
            continue;
        }
        let (piece, _) = g.induced_subgraph(&comp).expect("in range");
        let nbr: Vec<u64> = (0..piece.order()).map(|v| piece.neighbor_mask(v)).collect();
        let c = perfect_matchings_masked(&nbr)
            .ok_or_else(|| CountError::TooLarge(format!("count overflow on component of order {}", comp.len())))?;
        if c == 0 {
            return Ok(BigCount::zero());
        }
        total = total * BigCount::from(c);
    }
    Ok(total)
}

/// Per-vertex near-perfect matching counts of a factor-critical graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NearPerfectProfile {
    /// `per_vertex[v]` = number of perfect matchings of `G − v`.
    pub per_vertex: Vec<BigCount>,
    /// Sum over all vertices.
    pub total: BigCount,
}

pub fn near_perfect_profile(component: &Graph, limits: &CountLimits) -> Result<NearPerfectProfile, CountError> {
    let n = component.order();
    if n.is_multiple_of(2) {
        return Err(CountError::NotFactorCritical(format!("even order {n}")));
    }
    let per_vertex = (0..n)
        .map(|v| {
            let (h, _) = component.delete_vertices(&[v]).expect("in range");
            let c = count_perfect_matchings(&h, limits)?;
            if c.is_zero() {
                return Err(CountError::NotFactorCritical(format!("G − {v} has no perfect matching")));
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let total = per_vertex.iter().cloned().sum();
    Ok(NearPerfectProfile { per_vertex, total })
}

/// `Σ_{S ⊆ A} (−1)^{a−|S|} [t^a] Π_j (unhit_j + t · Σ_{u∈S} hit[u][j])`.
///
/// Equals the sum, over injective maps `f` from `A` into the columns, of
/// `Π_u hit[u][f(u)] · Π_{j unused} unhit_j`.
fn weighted_saturating_sum(hit: &[Vec<BigUint>], unhit: &[BigUint]) -> BigUint {
    let a = hit.len();
    let k = unhit.len();
    if a == 0 {
        return unhit.iter().product();
    }
    if a > k {
        return BigUint::zero();
    }
    if let Some(v) = weighted_saturating_sum_u128(hit, unhit) {
        return v.into();
    }
    let mut acc = BigInt::zero();
    let mut col = vec![BigUint::zero(); k];
    for mask in 0u64..(1u64 << a) {
        for (j, c) in col.iter_mut().enumerate() {
            *c = (0..a).filter(|&u| mask >> u & 1 == 1).map(|u| &hit[u][j]).sum();
        }
        // poly[i] = coefficient of t^i, truncated at degree a.
        let mut poly = vec![BigUint::zero(); a + 1];
        poly[0] = BigUint::one();
        for j in 0..k {
            for i in (0..=a).rev() {
                let carried = if i > 0 { &poly[i - 1] * &col[j] } else { BigUint::zero() };
                poly[i] = &poly[i] * &unhit[j] + carried;
            }
        }
        let term = BigInt::from(std::mem::take(&mut poly[a]));
        if (a - mask.count_ones() as usize).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    debug_assert!(!acc.is_negative());
    acc.to_biguint().expect("inclusion–exclusion total is nonnegative")
}

fn weighted_saturating_sum_u128(hit: &[Vec<BigUint>], unhit: &[BigUint]) -> Option<u128> {
    let a = hit.len();
    let k = unhit.len();
    let hit: Vec<Vec<u128>> = hit.iter().map(|r| r.iter().map(|x| x.to_u128()).collect()).collect::<Option<_>>()?;
    let unhit: Vec<u128> = unhit.iter().map(|x| x.to_u128()).collect::<Option<_>>()?;
    let mut acc: i128 = 0;
    let mut col = vec![0u128; k];
    let mut poly = vec![0u128; a + 1];
    for mask in 0u64..(1u64 << a) {
        for (j, c) in col.iter_mut().enumerate() {
            let mut s = 0u128;
            for u in (0..a).filter(|&u| mask >> u & 1 == 1) {
                s = s.checked_add(hit[u][j])?;
            }
            *c = s;
        }
        poly.fill(0);
        poly[0] = 1;
        for j in 0..k {
            for i in (0..=a).rev() {
                let carried = if i > 0 { poly[i - 1].checked_mul(col[j])? } else { 0 };
                poly[i] = poly[i].checked_mul(unhit[j])?.checked_add(carried)?;
            }
        }
        let term = i128::try_from(poly[a]).ok()?;
        acc = if (a - mask.count_ones() as usize).is_multiple_of(2) { acc.checked_add(term)? } else { acc.checked_sub(term)? };
    }
    u128::try_from(acc).ok()
}

/// Matchings of the bipartite graph `h` that saturate every vertex of
/// `side_a`; the other side is every remaining vertex.
pub fn count_saturating_bipartite(h: &Graph, side_a: &[usize], limits: &CountLimits) -> Result<BigCount, CountError> {
    let n = h.order();
    let mut in_a = vec![false; n];
    for &u in side_a {
        if u >= n {
            return Err(CountError::NotBipartite(format!("vertex {u} out of range")));
        }
        in_a[u] = true;
    }
    if let Some(&(u, v)) = h.edges().iter().find(|&&(u, v)| in_a[u] == in_a[v]) {
        return Err(CountError::NotBipartite(format!("edge {{{u}, {v}}} lies inside one side")));
    }
    let a_list: Vec<usize> = (0..n).filter(|&v| in_a[v]).collect();
    if a_list.len() > limits.max_a.min(63) {
        return Err(CountError::TooLarge(format!("|A| = {} exceeds {}", a_list.len(), limits.max_a)));
    }
    let k_list: Vec<usize> = (0..n).filter(|&v| !in_a[v]).collect();
    let hit: Vec<Vec<BigUint>> = a_list
        .iter()
        .map(|&u| k_list.iter().map(|&w| BigUint::from(h.has_edge(u, w) as u8)).collect())
        .collect();
    let unhit = vec![BigUint::one(); k_list.len()];
    Ok(weighted_saturating_sum(&hit, &unhit).into())
}

/// Counts maximum matchings through the decomposition, never approximating:
/// a subproblem beyond `limits` yields [`CountError::TooLarge`].
pub fn count_maximum_matchings_decomposed(g: &Graph, limits: &CountLimits) -> Result<BigCount, CountError> {
    let dec = decompose(g);
    count_with_decomposition(g, &dec, limits)
}

pub fn count_with_decomposition(g: &Graph, dec: &Decomposition, limits: &CountLimits) -> Result<BigCount, CountError> {
    if dec.a.len() > limits.max_a.min(63) {
        return Err(CountError::TooLarge(format!("|A| = {} exceeds {}", dec.a.len(), limits.max_a)));
    }
    if let Some(c) = dec.components.iter().find(|c| c.len() > limits.max_component_order + 1) {
        return Err(CountError::TooLarge(format!("D-component of order {} exceeds {}", c.len(), limits.max_component_order + 1)));
    }
    let profiles = dec
        .components
        .par_iter()
        .map(|comp| {
            let (gi, _) = g.induced_subgraph(comp).expect("in range");
            near_perfect_profile(&gi, limits)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let (gc, _) = g.induced_subgraph(&dec.c).expect("in range");
    let pm_c = count_perfect_matchings(&gc, limits)?;

    let mut comp_of = vec![(usize::MAX, 0usize); g.order()];
    for (i, comp) in dec.components.iter().enumerate() {
        for (pos, &v) in comp.iter().enumerate() {
            comp_of[v] = (i, pos);
        }
    }
    let hit: Vec<Vec<BigUint>> = dec
        .a
        .iter()
        .map(|&u| {
            let mut row = vec![BigUint::zero(); dec.k()];
            for &v in g.neighbors(u) {
                let (i, pos) = comp_of[v];
                if i != usize::MAX {
                    row[i] += profiles[i].per_vertex[pos].value();
                }
            }
            row
        })
        .collect();
    let unhit: Vec<BigUint> = profiles.iter().map(|p| p.total.value().clone()).collect();
    Ok(pm_c * BigCount::from(weighted_saturating_sum(&hit, &unhit)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Brute,
    Decomposed,
    Auto,
}

/// Counts with the requested method; `Auto` prefers the decomposed route,
/// then brute force, and otherwise reports the instance as too large.
pub fn count_maximum_matchings(g: &Graph, method: CountMethod, limits: &CountLimits) -> Result<(BigCount, CountMethod), CountError> {
    let brute = |g: &Graph| {
        if g.order() > limits.max_bruteforce_order {
            Err(CountError::TooLarge(format!(
                "order {} exceeds the brute-force limit {}",
                g.order(),
                limits.max_bruteforce_order
            )))
        } else {
            Ok((count_maximum_matchings_bruteforce(g), CountMethod::Brute))
        }
    };
    match method {
        CountMethod::Brute => brute(g),
        CountMethod::Decomposed => count_maximum_matchings_decomposed(g, limits).map(|c| (c, CountMethod::Decomposed)),
        CountMethod::Auto => match count_maximum_matchings_decomposed(g, limits) {
            Ok(c) => Ok((c, CountMethod::Decomposed)),
            Err(CountError::TooLarge(why)) => brute(g).map_err(|e| CountError::TooLarge(format!("{why}; {e}"))),
            Err(e) => Err(e),
        },
    }
}
