//! Seeded invariant suites behind `egm verify`.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use super::{random_graph, rng_for, run_experiment, sample_near_extremal, size_floor, ExperimentConfig, GridCell};
use crate::bounds::{
    bound_report, branch, classify_case, condition_e3_holds, extremal_count, g_value, theorem2_constraints,
    theorem2_thresholds, verify_lemma1_identity, CaseLabel, ExtremalFamily,
};
use crate::constructive::{build_swap_family, emit_swap_matchings, extract_bipartite_family, ExtractMode};
use crate::count::{
    count_maximum_matchings_bruteforce, count_maximum_matchings_decomposed, enumerate_maximum_matchings, BigCount,
    CountLimits,
};
use crate::gallai_edmonds::{closure, decompose, decompose_by_definition, verify_decomposition};
use crate::graph::{generate, Graph, GraphKind};
use crate::io;
use crate::matching::{matching_number, maximum_matching, maximum_matching_unordered, validate_matching, Matching, MatchingMode};
use crate::rational::{q, Rational};

pub const SUITES: &[&str] = &["graph", "matching", "decomposition", "counting", "bounds", "constructive", "harness"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteCheck {
    pub suite: &'static str,
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl SuiteCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Recorder {
    suite: &'static str,
    checks: Vec<SuiteCheck>,
}

impl Recorder {
    fn run(&mut self, name: &'static str, trials: usize, mut f: impl FnMut(usize) -> Result<(), String>) {
        let mut failures = 0;
        let mut first_failure = None;
        for t in 0..trials {
            if let Err(e) = f(t) {
                failures += 1;
                first_failure.get_or_insert(format!("trial {t}: {e}"));
            }
        }
        self.checks.push(SuiteCheck { suite: self.suite, name, trials, failures, first_failure });
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Random graph on at most `max_n` vertices with a random density.
fn graph(rng: &mut impl Rng, max_n: usize) -> Graph {
    let n = rng.gen_range(1..=max_n);
    let num = rng.gen_range(1..10);
    random_graph(n, num, 10, rng)
}

/// Runs one named suite, or every suite for `"all"`. Unknown names yield
/// `None`.
pub fn run_suite(name: &str, seed: u64) -> Option<Vec<SuiteCheck>> {
    if name == "all" {
        return Some(SUITES.iter().flat_map(|s| run_suite(s, seed).expect("known suite")).collect());
    }
    let suite = *SUITES.iter().find(|&&s| s == name)?;
    let mut r = Recorder { suite, checks: Vec::new() };
    let tag = SUITES.iter().position(|&s| s == name).unwrap();
    let mut rng = rng_for(seed, 1000 + tag, 0);
    match suite {
        "graph" => {
            r.run("edge list round trip", 200, |_| {
                let g = graph(&mut rng, 14);
                ensure(io::parse(&io::serialize(&g)).as_ref() == Ok(&g), || format!("{g:?}"))
            });
            r.run("complement is an involution", 200, |_| {
                let g = graph(&mut rng, 14);
                ensure(g.complement().complement() == g && g.size() + g.complement().size() == g.order() * (g.order() - 1) / 2, || format!("{g:?}"))
            });
        }
        "matching" => {
            r.run("maximum matching is valid and maximum", 300, |_| {
                let g = graph(&mut rng, 12);
                let m = maximum_matching(&g);
                let u = maximum_matching_unordered(&g);
                ensure(
                    validate_matching(&g, &m, MatchingMode::Maximum).is_valid() && u.len() == m.len(),
                    || format!("{g:?}"),
                )
            });
            r.run("canonical matching is the lexicographic minimum", 200, |_| {
                let g = graph(&mut rng, 9);
                let first = enumerate_maximum_matchings(&g, Some(1)).next().unwrap_or_default();
                ensure(maximum_matching(&g) == first, || format!("{g:?}"))
            });
        }
        "decomposition" => {
            r.run("blossom labels agree with the definition", 200, |_| {
                let g = graph(&mut rng, 12);
                ensure(decompose(&g) == decompose_by_definition(&g), || format!("{g:?}"))
            });
            r.run("decomposition axioms", 200, |_| {
                let g = graph(&mut rng, 12);
                let rep = verify_decomposition(&g, &decompose(&g));
                ensure(rep.passed(), || format!("{g:?}: {rep:?}"))
            });
            r.run("closure keeps ν and the decomposition", 200, |_| {
                let g = graph(&mut rng, 12);
                let dec = decompose(&g);
                let gs = closure(&g, &dec);
                ensure(matching_number(&gs) == matching_number(&g) && decompose(&gs) == dec, || format!("{g:?}"))
            });
        }
        "counting" => {
            r.run("decomposed count equals enumeration", 200, |_| {
                let g = graph(&mut rng, 10);
                let fast = count_maximum_matchings_decomposed(&g, &CountLimits::default());
                ensure(fast.as_ref() == Ok(&count_maximum_matchings_bruteforce(&g)), || format!("{g:?}"))
            });
            r.run("extremal closed forms", 1, |_| {
                for n in 1..=10usize {
                    for s in 0..=n / 2 {
                        let g = generate(GraphKind::ExtremalI { n, s }).unwrap();
                        let want = extremal_count(ExtremalFamily::I, n as u64, s as u64).unwrap();
                        ensure(count_maximum_matchings_bruteforce(&g) == want, || format!("(i) n = {n}, s = {s}"))?;
                        if 2 * s < n {
                            let g = generate(GraphKind::ExtremalII { n, s }).unwrap();
                            let want = extremal_count(ExtremalFamily::II, n as u64, s as u64).unwrap();
                            ensure(count_maximum_matchings_bruteforce(&g) == want, || format!("(ii) n = {n}, s = {s}"))?;
                        }
                    }
                }
                Ok(())
            });
        }
        "bounds" => {
            r.run("quadratic identities", 2000, |_| {
                let n = rng.gen_range(1..300u64);
                let s = rng.gen_range(0..=n / 2);
                let a = rng.gen_range(0..=s);
                let k = n - 2 * s + a;
                if k + a > n {
                    return Ok(());
                }
                let d = rng.gen_range(k..=n - a);
                ensure(verify_lemma1_identity(n, s, a, d) == Ok(true), || format!("({n}, {s}, {a}, {d})"))
            });
            r.run("δ-condition forces g ≥ δ²", 2000, |_| {
                let n = rng.gen_range(10..200i64);
                let s = rng.gen_range(1..=n / 2);
                let nu = q(s, n);
                let delta = q(rng.gen_range(3..=n), n) * q(1, rng.gen_range(1..4));
                if delta < q(3, n) {
                    return Ok(());
                }
                let x = &nu * q(rng.gen_range(0..=100), 100);
                let y = &x * q(rng.gen_range(0..=200), 100);
                let br = branch(n as u64, s as u64);
                if condition_e3_holds(&x, &y, &nu, &delta) != Ok(true) {
                    return Ok(());
                }
                let g = g_value(&x, &y, &nu, br).map_err(|e| e.to_string())?;
                ensure(g >= &delta * &delta, || format!("x = {x}, y = {y}, ν = {nu}, δ = {delta}"))
            });
            r.run("case labels are exhaustive", 2000, |_| {
                let x = q(rng.gen_range(0..60), 100);
                let y = q(rng.gen_range(0..120), 100);
                let nu = q(rng.gen_range(1..51), 100);
                let delta = q(rng.gen_range(1..30), 1000);
                let label = classify_case(&x, &y, &nu, &delta).map_err(|e| e.to_string())?;
                ensure((label == CaseLabel::None) == condition_e3_holds(&x, &y, &nu, &delta).unwrap(), || format!("{label:?}"))
            });
            r.run("chain and g-bound on random graphs", 300, |_| {
                let g = graph(&mut rng, 12);
                let b = bound_report(&g, &decompose(&g), None).map_err(|e| e.to_string())?;
                ensure(b.chain_holds() && b.lemma1_holds(), || format!("{g:?}"))
            });
            r.run("threshold self-check", 300, |_| {
                let eps = q(rng.gen_range(1..100), 100);
                let hn = crate::bounds::h_nu(&eps).map_err(|e| e.to_string())?;
                let nu: Rational = &hn * q(rng.gen_range(1..1000), 1000);
                let p = theorem2_thresholds(&eps, &nu).map_err(|e| e.to_string())?;
                theorem2_constraints(&eps, &nu, &p.h_delta)
            });
        }
        "constructive" => {
            r.run("bipartite extraction meets its bound", 300, |_| {
                let a = rng.gen_range(1..=5usize);
                let k = rng.gen_range(a..=20usize);
                let base = Graph::complete_bipartite(a, k);
                let budget = 8 * a * a / 100;
                let cut: BTreeSet<(usize, usize)> =
                    (0..budget).map(|_| base.edges()[rng.gen_range(0..base.size())]).collect();
                let h = base.remove_edges(&cut.into_iter().collect::<Vec<_>>()).unwrap();
                let side: Vec<usize> = (0..a).collect();
                let rep = match extract_bipartite_family(&h, &side, ExtractMode::Fixed, None) {
                    Ok(rep) => rep,
                    Err(_) => return Ok(()),
                };
                let all: BTreeSet<Matching> = rep.family.iter().collect();
                ensure(
                    BigCount::from(all.len()) == rep.emitted
                        && all.iter().all(|m| m.len() == a && validate_matching(&h, m, MatchingMode::Any).is_valid())
                        && (!rep.hypotheses_passed() || rep.meets_target()),
                    || format!("a = {a}, k = {k}, {h:?}"),
                )
            });
            r.run("swap family is injective", 200, |_| {
                let p = rng.gen_range(1..=6usize);
                let n = 2 * p;
                let mut k = Graph::complete(n);
                for _ in 0..rng.gen_range(0..3) {
                    let e = k.edges()[rng.gen_range(0..k.size())];
                    if e.0 / 2 != e.1 / 2 {
                        k = k.remove_edges(&[e]).unwrap();
                    }
                }
                let m = Matching::new((0..p).map(|i| (2 * i, 2 * i + 1)));
                let fam = build_swap_family(&k, &m).map_err(|e| e.to_string())?;
                let out: Vec<Matching> = emit_swap_matchings(&fam, None).collect();
                let distinct: BTreeSet<&Matching> = out.iter().collect();
                ensure(
                    distinct.len() == out.len()
                        && Some(BigCount::from(out.len())) == fam.size()
                        && out.iter().all(|x| validate_matching(&k, x, MatchingMode::Perfect).is_valid()),
                    || format!("{k:?}"),
                )
            });
        }
        "harness" => {
            r.run("sampler keeps ν and the size floor", 100, |t| {
                let n = rng.gen_range(4..=14usize);
                let s = rng.gen_range(1..=n / 2);
                let d = rng.gen_range(0..=3usize);
                let mut srng = rng_for(seed, 2000, t);
                match sample_near_extremal(n, s, d, &mut srng, 1000) {
                    Ok(smp) => ensure(
                        matching_number(&smp.graph) == s && smp.graph.size() as u64 >= size_floor(n, s, d),
                        || format!("n = {n}, s = {s}, Δ = {d}"),
                    ),
                    Err(e) => Err(e.to_string()),
                }
            });
            r.run("experiment replays byte for byte", 1, |_| {
                let grid = vec![GridCell { n: 9, s: 2, deficiency: 2 }, GridCell { n: 10, s: 4, deficiency: 1 }];
                let cfg = ExperimentConfig { seed, grid, samples_per_cell: 3, ..Default::default() };
                let a = run_experiment(&cfg).map_err(|e| e.to_string())?;
                let b = run_experiment(&cfg).map_err(|e| e.to_string())?;
                ensure(a.to_json_lines() == b.to_json_lines(), || "reports differ".into())?;
                ensure(a.summary.clean(), || a.summary.table())
            });
        }
        _ => unreachable!("suite list is exhaustive"),
    }
    Some(r.checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        let checks = run_suite("all", 7).unwrap();
        assert!(checks.len() >= 15);
        for c in &checks {
            assert!(c.passed(), "{c:?}");
        }
        assert!(run_suite("nope", 7).is_none());
    }
}
