//! Maximum matchings of graphs close to the Erdős–Gallai edge bound.
//!
//! The crate covers the whole pipeline: graph construction and the two
//! extremal families ([`graph`]), maximum matching ([`matching`]), the
//! Gallai–Edmonds decomposition ([`gallai_edmonds`]), exact counting of
//! maximum matchings ([`count`]), the scalar bounds and their algebra
//! ([`bounds`]), the constructive matching families ([`constructive`]) and
//! the seeded experiment runner ([`harness`]).

pub mod bounds;
pub mod constructive;
pub mod count;
pub mod gallai_edmonds;
pub mod graph;
pub mod harness;
pub mod io;
pub mod matching;
pub mod rational;

pub use graph::{generate, Graph, GraphError, GraphKind};
pub use matching::{
    matching_number, maximum_matching, maximum_matching_unordered, validate_matching, Matching, MatchingCheck,
    MatchingDefect, MatchingMode,
};
pub use count::{
    count_maximum_matchings, count_maximum_matchings_bruteforce, count_maximum_matchings_decomposed,
    count_perfect_matchings, count_saturating_bipartite, enumerate_maximum_matchings, near_perfect_profile, BigCount,
    CountError, CountLimits, CountMethod, NearPerfectProfile,
};
pub use gallai_edmonds::{decompose, decompose_by_definition, verify_decomposition, Decomposition, DecompositionStats};
pub use rational::Rational;
pub use bounds::{
    bound_report, classify_case, condition_e3_holds, eg_max_size, extremal_count, falling_factorial, g_value, m_star,
    theorem1_bound, theorem2_bound, theorem2_thresholds, verify_lemma1_identity, BoundReport, Branch, CaseLabel,
    ExtremalFamily, Theorem2Params,
};
pub use constructive::{
    build_swap_family, emit_swap_matchings, extract_bipartite_family, ExtractMode, ExtractionReport, SwapFamily,
};
pub use harness::{run_experiment, sample_near_extremal, ExperimentConfig, ExperimentReport, GridCell, ReportRecord};
