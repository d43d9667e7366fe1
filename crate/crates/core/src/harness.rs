//! Seeded near-extremal sampling and the experiment runner.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`), seeded per sample with
//! a SplitMix64 mix of `(seed, cell, sample)`, so a report depends only on
//! the config and never on scheduling. Set `EGM_WORKERS` to fix the number
//! of worker threads.

pub mod suites;

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    bound_report, eg_max_size, extremal_count, theorem2_bound, BoundReport, CaseLabel, ExtremalFamily,
};
use crate::constructive::{build_swap_family, emit_swap_matchings, extract_bipartite_family, ExtractMode};
use crate::count::{count_maximum_matchings, BigCount, CountLimits, CountMethod};
use crate::gallai_edmonds::{decompose, verify_decomposition, Decomposition};
use crate::graph::{generate, Graph, GraphError, GraphKind};
use crate::matching::{matching_number, maximum_matching, validate_matching, MatchingMode};
use crate::rational::{q, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("retry budget exhausted after removing {removed} of {wanted} edges (n = {n}, s = {s})")]
    RetryBudgetExhausted { n: usize, s: usize, removed: usize, wanted: usize },
    /// Every edge outside a single maximum matching can go, and no more.
    #[error("cannot remove {wanted} edges without lowering the matching number: at most {max} are removable (n = {n}, s = {s})")]
    Infeasible { n: usize, s: usize, wanted: usize, max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One `(n, s, Δ)` grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub n: usize,
    pub s: usize,
    /// Number of edges removed from the extremal graph.
    pub deficiency: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub grid: Vec<GridCell>,
    pub samples_per_cell: usize,
    pub counting_method: CountMethod,
    pub limits: CountLimits,
    /// Also count by brute force when feasible and compare.
    pub cross_check: bool,
    /// Rejections allowed per sample before the sampler gives up.
    pub retry_budget: usize,
    /// Witness matchings kept per extraction.
    pub max_witnesses: usize,
    /// Swap matchings streamed and validated per record.
    pub swap_cap: usize,
    /// ε for the secondary lower bound column.
    #[serde(with = "crate::rational::json")]
    pub epsilon: Rational,
    /// Record wall time. Off by default so reports are byte-reproducible.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            grid: Vec::new(),
            samples_per_cell: 1,
            counting_method: CountMethod::Auto,
            limits: CountLimits::default(),
            cross_check: true,
            retry_budget: 1000,
            max_witnesses: 0,
            swap_cap: 1000,
            epsilon: q(1, 2),
            record_timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        for c in &self.grid {
            if 2 * c.s > c.n {
                return Err(HarnessError::InvalidConfig(format!("cell (n = {}, s = {}) has 2s > n", c.n, c.s)));
            }
        }
        if self.epsilon <= q(0, 1) || self.epsilon >= q(1, 1) {
            return Err(HarnessError::InvalidConfig(format!("ε must lie in (0, 1), got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// The graph a sample starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseFamily {
    I,
    II,
    /// `K_n` at `2s = n`, where neither family fits.
    Complete,
}

/// Denser applicable extremal graph for `(n, s)`.
pub fn base_graph(n: usize, s: usize) -> Result<(BaseFamily, Graph), HarnessError> {
    if 2 * s > n {
        return Err(HarnessError::InvalidConfig(format!("2s = {} exceeds n = {n}", 2 * s)));
    }
    if 5 * s + 3 <= 2 * n {
        Ok((BaseFamily::I, generate(GraphKind::ExtremalI { n, s })?))
    } else if 2 * s < n {
        Ok((BaseFamily::II, generate(GraphKind::ExtremalII { n, s })?))
    } else {
        Ok((BaseFamily::Complete, Graph::complete(n)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub graph: Graph,
    pub base: BaseFamily,
    /// Removed edges, in removal order.
    pub removed: Vec<(usize, usize)>,
}

/// Starts from [`base_graph`] and removes `min(Δ, m)` uniformly random edges
/// one at a time, rejecting any removal that lowers the matching number.
///
/// An edge whose removal lowers `ν` keeps doing so after further
/// non-critical removals, so rejected edges are dropped from later draws;
/// the draw stays uniform over the removable edges. A graph in which every
/// edge is critical is a matching, hence exactly `m − s` edges can always be
/// removed and a larger request is reported as [`HarnessError::Infeasible`].
pub fn sample_near_extremal(
    n: usize,
    s: usize,
    deficiency: usize,
    rng: &mut impl Rng,
    retry_budget: usize,
) -> Result<Sample, HarnessError> {
    let (base, mut g) = base_graph(n, s)?;
    let wanted = deficiency.min(g.size());
    let max = g.size() - s;
    if wanted > max {
        return Err(HarnessError::Infeasible { n, s, wanted, max });
    }
    let mut removed = Vec::with_capacity(wanted);
    let mut critical = BTreeSet::new();
    let mut retries = 0;
    while removed.len() < wanted {
        let candidates: Vec<(usize, usize)> = g.edges().iter().copied().filter(|e| !critical.contains(e)).collect();
        let Some(&e) = candidates.choose(rng) else {
            return Err(HarnessError::Infeasible { n, s, wanted, max: removed.len() });
        };
        let next = g.remove_edges(&[e])?;
        if matching_number(&next) == s {
            g = next;
            removed.push(e);
        } else {
            critical.insert(e);
            retries += 1;
            if retries > retry_budget {
                return Err(HarnessError::RetryBudgetExhausted { n, s, removed: removed.len(), wanted });
            }
        }
    }
    Ok(Sample { graph: g, base, removed })
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `sample` in cell `cell`.
pub fn sample_seed(seed: u64, cell: usize, sample: usize) -> u64 {
    mix(mix(mix(seed) ^ cell as u64) ^ sample as u64)
}

pub fn rng_for(seed: u64, cell: usize, sample: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sample_seed(seed, cell, sample))
}

/// Random graph with each pair present independently with probability
/// `num/den`.
pub fn random_graph(n: usize, num: u32, den: u32, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_ratio(num, den) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("pairs are in range")
}

/// Count of the starting graph and the largest loss a single removable edge
/// can cause. Every sample of the cell satisfies
/// `count ≥ max(1, base_count − r·max_edge_loss)` with `r` removed edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellBaseline {
    pub base: BaseFamily,
    pub base_count: BigCount,
    /// Closed form for the family, when it has one.
    pub closed_form: Option<BigCount>,
    pub max_edge_loss: BigCount,
}

pub fn cell_baseline(n: usize, s: usize, limits: &CountLimits) -> Result<Option<CellBaseline>, HarnessError> {
    let (base, g) = base_graph(n, s)?;
    let count = |h: &Graph| count_maximum_matchings(h, CountMethod::Auto, limits).ok().map(|(c, _)| c);
    let Some(base_count) = count(&g) else { return Ok(None) };
    let closed_form = match base {
        BaseFamily::I => extremal_count(ExtremalFamily::I, n as u64, s as u64).ok(),
        BaseFamily::II => extremal_count(ExtremalFamily::II, n as u64, s as u64).ok(),
        BaseFamily::Complete => None,
    };
    let mut losses = Vec::new();
    for &e in g.edges() {
        let h = g.remove_edges(&[e])?;
        if matching_number(&h) == s {
            let Some(c) = count(&h) else { return Ok(None) };
            losses.push(base_count.value() - c.value());
        }
    }
    let max_edge_loss = losses.into_iter().max().map(BigCount::from).unwrap_or_default();
    Ok(Some(CellBaseline { base, base_count, closed_form, max_edge_loss }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionSummary {
    pub a: usize,
    pub k: usize,
    pub missing_edges: u64,
    pub target_bound: BigCount,
    pub emitted: BigCount,
    pub a_prime: usize,
    pub hypotheses_passed: bool,
    pub meets_target: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witnesses: Vec<crate::matching::Matching>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapSummary {
    /// Where the near-complete graph came from: `"C"` or `"component"`.
    pub source: String,
    pub p: usize,
    pub h_edges: usize,
    pub high_degree_count: usize,
    pub x_size: usize,
    pub x_verified: bool,
    pub hypotheses_passed: bool,
    /// Number of matchings of `H` when small enough to count.
    pub family_size: Option<BigCount>,
    /// Streamed outputs (capped).
    pub streamed: usize,
    /// Every streamed output is a distinct perfect matching.
    pub streamed_valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "lowercase")]
pub enum LemmaSummary {
    Bipartite(ExtractionSummary),
    Swap(SwapSummary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub cell: usize,
    pub sample: usize,
    pub n: usize,
    pub s: usize,
    pub deficiency_budget: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseFamily>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub removed: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// The cell asks for more removals than the base graph allows.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub infeasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition_verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundReport>,
    /// Exact count, or `None` when too large.
    pub count: Option<BigCount>,
    pub count_method: Option<CountMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count_note: Option<String>,
    /// Brute-force count when it was computed in addition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<BigCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_count: Option<BigCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<BigCount>,
    /// `max(1, base_count − r·max_edge_loss)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss_floor: Option<BigCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem2_bound: Option<BigCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma: Option<LemmaSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl ReportRecord {
    fn bare(cell: usize, sample: usize, c: &GridCell, seed: u64) -> Self {
        Self {
            cell,
            sample,
            n: c.n,
            s: c.s,
            deficiency_budget: c.deficiency,
            seed,
            base: None,
            removed: Vec::new(),
            error: None,
            infeasible: false,
            m: None,
            decomposition_verified: None,
            bounds: None,
            count: None,
            count_method: None,
            count_note: None,
            cross_check: None,
            base_count: None,
            closed_form: None,
            loss_floor: None,
            theorem2_bound: None,
            lemma: None,
            wall_time_ms: None,
        }
    }

    pub fn case(&self) -> Option<CaseLabel> {
        self.bounds.as_ref().and_then(|b| b.case)
    }

    /// `m_closure ≤ m_star ≤ m_eg` (and `m ≤ m_closure`).
    pub fn chain_ok(&self) -> Option<bool> {
        self.bounds.as_ref().map(BoundReport::chain_holds)
    }

    pub fn cross_check_agrees(&self) -> Option<bool> {
        Some(self.count.as_ref()? == self.cross_check.as_ref()?)
    }

    pub fn above_loss_floor(&self) -> Option<bool> {
        Some(self.count.as_ref()? >= self.loss_floor.as_ref()?)
    }

    /// Sampled graphs have the same ν, so they cannot gain maximum matchings.
    pub fn at_most_base(&self) -> Option<bool> {
        Some(self.count.as_ref()? <= self.base_count.as_ref()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub records: Vec<ReportRecord>,
    pub summary: Summary,
}

impl ExperimentReport {
    /// One JSON document per line, records in sample order.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub errors: usize,
    /// Records whose cell cannot be sampled; not counted as errors.
    pub infeasible: usize,
    pub decomposition_failures: usize,
    pub counted: usize,
    pub too_large: usize,
    pub chain_violations: usize,
    pub lemma1_violations: usize,
    pub cross_checked: usize,
    pub cross_check_mismatches: usize,
    pub floor_checked: usize,
    pub floor_violations: usize,
    pub base_violations: usize,
    pub lemma_target_misses: usize,
    pub cases: Vec<(CaseLabel, usize)>,
}

impl Summary {
    pub fn from_records(records: &[ReportRecord]) -> Self {
        let mut s = Summary { records: records.len(), ..Default::default() };
        let mut cases: HashMap<CaseLabel, usize> = HashMap::new();
        for r in records {
            s.infeasible += r.infeasible as usize;
            s.errors += (r.error.is_some() && !r.infeasible) as usize;
            s.decomposition_failures += (r.decomposition_verified == Some(false)) as usize;
            s.counted += r.count.is_some() as usize;
            s.too_large += (r.error.is_none() && r.count.is_none()) as usize;
            s.chain_violations += (r.chain_ok() == Some(false)) as usize;
            s.lemma1_violations += r.bounds.as_ref().is_some_and(|b| !b.lemma1_holds()) as usize;
            s.cross_checked += r.cross_check_agrees().is_some() as usize;
            s.cross_check_mismatches += (r.cross_check_agrees() == Some(false)) as usize;
            s.floor_checked += r.above_loss_floor().is_some() as usize;
            s.floor_violations += (r.above_loss_floor() == Some(false)) as usize;
            s.base_violations += (r.at_most_base() == Some(false)) as usize;
            s.lemma_target_misses += match &r.lemma {
                Some(LemmaSummary::Bipartite(e)) => (e.hypotheses_passed && !e.meets_target) as usize,
                Some(LemmaSummary::Swap(w)) => !w.streamed_valid as usize,
                None => 0,
            };
            if let Some(c) = r.case() {
                *cases.entry(c).or_default() += 1;
            }
        }
        s.cases = [CaseLabel::None, CaseLabel::Case1, CaseLabel::Case2, CaseLabel::Case3]
            .into_iter()
            .map(|c| (c, cases.get(&c).copied().unwrap_or(0)))
            .collect();
        s
    }

    /// No invariant was violated.
    pub fn clean(&self) -> bool {
        self.errors == 0
            && self.decomposition_failures == 0
            && self.chain_violations == 0
            && self.lemma1_violations == 0
            && self.cross_check_mismatches == 0
            && self.floor_violations == 0
            && self.base_violations == 0
            && self.lemma_target_misses == 0
    }

    pub fn table(&self) -> String {
        let rows: Vec<(String, String)> = vec![
            ("records".into(), self.records.to_string()),
            ("errors".into(), self.errors.to_string()),
            ("infeasible cells".into(), self.infeasible.to_string()),
            ("decomposition failures".into(), self.decomposition_failures.to_string()),
            ("counted exactly".into(), self.counted.to_string()),
            ("too large to count".into(), self.too_large.to_string()),
            ("chain violations".into(), self.chain_violations.to_string()),
            ("g-bound violations".into(), self.lemma1_violations.to_string()),
            ("cross-checked / mismatches".into(), format!("{} / {}", self.cross_checked, self.cross_check_mismatches)),
            ("loss floor checked / below".into(), format!("{} / {}", self.floor_checked, self.floor_violations)),
            ("above base count".into(), self.base_violations.to_string()),
            ("lemma misses".into(), self.lemma_target_misses.to_string()),
        ]
        .into_iter()
        .chain(self.cases.iter().map(|(c, k)| {
            let label = match c {
                CaseLabel::None => "case-split condition holds",
                CaseLabel::Case1 => "case 1",
                CaseLabel::Case2 => "case 2",
                CaseLabel::Case3 => "case 3",
            };
            (label.to_string(), k.to_string())
        }))
        .collect();
        let w = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:<w$}  {v}\n"));
        }
        out
    }
}

/// The bipartite graph between `A` and one vertex per component of `G[D]`
/// (the vertex matched into `A` by a maximum matching, else the smallest),
/// with `A` first. Returns the graph and the size of `A`.
pub fn case1_subgraph(g: &Graph, dec: &Decomposition) -> (Graph, usize) {
    let mate = maximum_matching(g).mates(g.order());
    let mut in_a = vec![false; g.order()];
    for &u in &dec.a {
        in_a[u] = true;
    }
    let reps: Vec<usize> = dec
        .components
        .iter()
        .map(|comp| comp.iter().copied().find(|&v| mate[v].is_some_and(|w| in_a[w])).unwrap_or(comp[0]))
        .collect();
    let a = dec.a.len();
    let mut index = HashMap::new();
    for (i, &v) in dec.a.iter().chain(&reps).enumerate() {
        index.insert(v, i);
    }
    let mut edges = Vec::new();
    for (i, &u) in dec.a.iter().enumerate() {
        for w in g.neighbors(u) {
            if let Some(&j) = index.get(w) {
                if j >= a {
                    edges.push((i, j));
                }
            }
        }
    }
    (Graph::new(a + reps.len(), edges).expect("indices in range"), a)
}

fn swap_summary(k: &Graph, source: &str, cap: usize) -> Option<SwapSummary> {
    if k.order() == 0 {
        return None;
    }
    let m = maximum_matching(k);
    let fam = build_swap_family(k, &m).ok()?;
    let mut seen = BTreeSet::new();
    let mut valid = true;
    for out in emit_swap_matchings(&fam, Some(cap)) {
        valid &= validate_matching(k, &out, MatchingMode::Perfect).is_valid();
        valid &= seen.insert(out);
    }
    Some(SwapSummary {
        source: source.to_string(),
        p: fam.p,
        h_edges: fam.h_edges,
        high_degree_count: fam.high_degree_count,
        x_size: fam.x_set.len(),
        x_verified: fam.x_verified,
        hypotheses_passed: fam.hypotheses.iter().all(|h| h.passed),
        family_size: if fam.p <= 24 { fam.size() } else { None },
        streamed: seen.len(),
        streamed_valid: valid,
    })
}

/// Runs the constructive lemma selected by the case label.
pub fn lemma_for_case(g: &Graph, dec: &Decomposition, case: CaseLabel, max_witnesses: usize, swap_cap: usize) -> Option<LemmaSummary> {
    match case {
        CaseLabel::None => None,
        CaseLabel::Case1 => {
            let (h, a) = case1_subgraph(g, dec);
            let side: Vec<usize> = (0..a).collect();
            let cap = (max_witnesses > 0).then_some(max_witnesses);
            let r = extract_bipartite_family(&h, &side, ExtractMode::Fixed, cap).ok()?;
            Some(LemmaSummary::Bipartite(ExtractionSummary {
                a: r.a,
                k: r.k,
                missing_edges: r.missing_edges,
                hypotheses_passed: r.hypotheses_passed(),
                meets_target: r.meets_target(),
                target_bound: r.target_bound,
                emitted: r.emitted,
                a_prime: r.a_prime.len(),
                witnesses: r.witnesses.unwrap_or_default(),
            }))
        }
        CaseLabel::Case2 => {
            let (gc, _) = g.induced_subgraph(&dec.c).expect("in range");
            swap_summary(&gc, "C", swap_cap).map(LemmaSummary::Swap)
        }
        CaseLabel::Case3 => {
            let largest = dec.components.iter().enumerate().max_by_key(|(i, c)| (c.len(), std::cmp::Reverse(*i)))?.1;
            let (gi, _) = g.induced_subgraph(&largest[1..]).expect("in range");
            swap_summary(&gi, "component", swap_cap).map(LemmaSummary::Swap)
        }
    }
}

fn run_one(cfg: &ExperimentConfig, cell_index: usize, sample: usize, baseline: &Option<CellBaseline>) -> ReportRecord {
    let cell = &cfg.grid[cell_index];
    let seed = sample_seed(cfg.seed, cell_index, sample);
    let mut rec = ReportRecord::bare(cell_index, sample, cell, seed);
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let smp = match sample_near_extremal(cell.n, cell.s, cell.deficiency, &mut rng, cfg.retry_budget) {
        Ok(s) => s,
        Err(e) => {
            rec.infeasible = matches!(e, HarnessError::Infeasible { .. });
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    let g = &smp.graph;
    rec.base = Some(smp.base);
    rec.m = Some(g.size() as u64);
    rec.removed = smp.removed.clone();
    let dec = decompose(g);
    rec.decomposition_verified = Some(verify_decomposition(g, &dec).passed());
    match bound_report(g, &dec, None) {
        Ok(b) => rec.bounds = Some(b),
        Err(e) => rec.error = Some(e.to_string()),
    }
    match count_maximum_matchings(g, cfg.counting_method, &cfg.limits) {
        Ok((c, method)) => {
            rec.count = Some(c);
            rec.count_method = Some(method);
        }
        Err(e) => rec.count_note = Some(e.to_string()),
    }
    if cfg.cross_check && rec.count_method != Some(CountMethod::Brute) && g.order() <= cfg.limits.max_bruteforce_order {
        rec.cross_check = count_maximum_matchings(g, CountMethod::Brute, &cfg.limits).ok().map(|(c, _)| c);
    }
    if let Some(b) = baseline {
        rec.base_count = Some(b.base_count.clone());
        rec.closed_form = b.closed_form.clone();
        let shrink = b.max_edge_loss.value() * smp.removed.len();
        let floor = if &shrink >= b.base_count.value() { 0u64.into() } else { b.base_count.value() - shrink };
        rec.loss_floor = Some(BigCount::from(floor).max(BigCount::one()));
    }
    rec.theorem2_bound = theorem2_bound(cell.n as u64, cell.s as u64, &cfg.epsilon).ok();
    if let Some(case) = rec.case() {
        rec.lemma = lemma_for_case(g, &dec, case, cfg.max_witnesses, cfg.swap_cap);
    }
    if cfg.record_timing {
        rec.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    rec
}

/// Worker count from `EGM_WORKERS`, if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var("EGM_WORKERS").ok()?.trim().parse().ok().filter(|&w| w > 0)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    let body = || {
        let baselines: Vec<Option<CellBaseline>> = cfg
            .grid
            .par_iter()
            .map(|c| cell_baseline(c.n, c.s, &cfg.limits).ok().flatten())
            .collect();
        let jobs: Vec<(usize, usize)> =
            (0..cfg.grid.len()).flat_map(|c| (0..cfg.samples_per_cell).map(move |s| (c, s))).collect();
        jobs.par_iter().map(|&(c, s)| run_one(cfg, c, s, &baselines[c])).collect::<Vec<_>>()
    };
    let records = match workers_from_env() {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| HarnessError::InvalidConfig(format!("thread pool: {e}")))?
            .install(body),
        None => body(),
    };
    let summary = Summary::from_records(&records);
    Ok(ExperimentReport { records, summary })
}

/// The size every sample must reach: `eg_max_size(n, s) − Δ`, where at
/// `2s = n` the unattainable bound is replaced by `C(n, 2)`.
pub fn size_floor(n: usize, s: usize, deficiency: usize) -> u64 {
    let top = (n * n.saturating_sub(1) / 2) as u64;
    eg_max_size(n as u64, s as u64).map_or(0, |m| m.min(top).saturating_sub(deficiency as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(grid: Vec<GridCell>, samples: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig { seed, grid, samples_per_cell: samples, ..Default::default() }
    }

    #[test]
    fn sampler_examples() {
        let mut rng = rng_for(42, 0, 0);
        let s = sample_near_extremal(9, 2, 0, &mut rng, 100).unwrap();
        assert_eq!(s.graph, generate(GraphKind::ExtremalI { n: 9, s: 2 }).unwrap());
        let s = sample_near_extremal(9, 2, 2, &mut rng, 100).unwrap();
        assert_eq!(matching_number(&s.graph), 2);
        assert_eq!(s.graph.size() as u64, size_floor(9, 2, 2));
        assert_eq!(s.graph.size(), 13);
        let s = sample_near_extremal(6, 3, 1, &mut rng, 100).unwrap();
        assert_eq!(s.base, BaseFamily::Complete);
        assert_eq!(matching_number(&s.graph), 3);
        assert_eq!(s.graph.size(), 14);
    }

    #[test]
    fn sampler_reports_exhaustion() {
        // K_3 loses its matching after three removals.
        let e = sample_near_extremal(3, 1, 3, &mut rng_for(1, 0, 0), 20);
        assert!(matches!(e, Err(HarnessError::Infeasible { wanted: 3, max: 2, .. })));
        // The star K_{1,3} keeps one edge; with no retries allowed the first
        // rejected draw ends the run.
        let e = sample_near_extremal(4, 1, 2, &mut rng_for(1, 0, 0), 0);
        assert!(e.is_ok());
        let mut stuck = 0;
        for t in 0..20 {
            if let Err(HarnessError::RetryBudgetExhausted { .. }) =
                sample_near_extremal(9, 2, 10, &mut rng_for(2, 0, t), 0)
            {
                stuck += 1;
            }
        }
        assert!(stuck > 0);
    }

    #[test]
    fn small_grid_experiment() {
        let grid = (0..4).map(|d| GridCell { n: 9, s: 2, deficiency: d }).collect();
        let report = run_experiment(&cfg(grid, 5, 3)).unwrap();
        assert_eq!(report.records.len(), 20);
        for r in &report.records {
            assert!(r.count.as_ref().is_some_and(|c| c >= &BigCount::one()));
            assert_eq!(r.chain_ok(), Some(true));
            assert_eq!(r.cross_check_agrees(), Some(true));
            assert_eq!(r.above_loss_floor(), Some(true));
        }
        assert!(report.summary.clean(), "{}", report.summary.table());
    }

    #[test]
    fn empty_grid_and_replay() {
        let report = run_experiment(&cfg(vec![], 3, 0)).unwrap();
        assert!(report.records.is_empty());
        let grid = vec![GridCell { n: 10, s: 4, deficiency: 2 }, GridCell { n: 8, s: 4, deficiency: 1 }];
        let a = run_experiment(&cfg(grid.clone(), 3, 11)).unwrap().to_json_lines();
        let b = run_experiment(&cfg(grid, 3, 11)).unwrap().to_json_lines();
        assert_eq!(a, b);
    }

    #[test]
    fn config_round_trip_and_validation() {
        let c = cfg(vec![GridCell { n: 9, s: 2, deficiency: 1 }], 2, 5);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), c);
        let partial: ExperimentConfig = serde_json::from_str(r#"{"seed": 3, "grid": [{"n": 5, "s": 1, "deficiency": 0}]}"#).unwrap();
        assert_eq!(partial.samples_per_cell, 1);
        assert!(run_experiment(&cfg(vec![GridCell { n: 3, s: 2, deficiency: 0 }], 1, 0)).is_err());
    }

    #[test]
    fn case1_subgraph_is_bipartite_with_a_first() {
        let g = generate(GraphKind::ExtremalI { n: 9, s: 2 }).unwrap();
        let dec = decompose(&g);
        let (h, a) = case1_subgraph(&g, &dec);
        assert_eq!(a, 2);
        assert_eq!(h.order(), 2 + 7);
        assert_eq!(h.size(), 14);
        assert_eq!(matching_number(&h), 2);
    }
}
