//! Deterministic inputs shared by the benchmarks.

use egm_core::harness::{random_graph, rng_for, sample_near_extremal};
use egm_core::Graph;

/// Random graph with edge probability `num/10`, fixed by `seed`.
pub fn random(n: usize, num: u32, seed: u64) -> Graph {
    random_graph(n, num, 10, &mut rng_for(seed, n, num as usize))
}

/// Near-extremal instance with `deficiency` edges removed.
pub fn near_extremal(n: usize, s: usize, deficiency: usize, seed: u64) -> Graph {
    sample_near_extremal(n, s, deficiency, &mut rng_for(seed, n, s), 10_000)
        .expect("fixture parameters admit a sample")
        .graph
}
