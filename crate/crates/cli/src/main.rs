use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use egm_core::bounds::{self, eg_bound_attained};
use egm_core::gallai_edmonds::{self, verify_decomposition};
use egm_core::harness::suites::{run_suite, SUITES};
use egm_core::{
    count_maximum_matchings, decompose, generate, io, run_experiment, CountLimits, CountMethod, ExperimentConfig, Graph,
    GraphKind, Rational,
};

/// Exit code for a failed check or a dirty experiment.
const VERIFICATION_FAILED: u8 = 1;
/// Exit code for bad flags or unreadable input.
const BAD_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "egm", version, about = "Maximum matchings of graphs near the Erdős–Gallai bound")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Complete,
    Empty,
    CompleteBipartite,
    ExtremalI,
    ExtremalIi,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Brute,
    Decomposed,
    Auto,
}

impl From<MethodArg> for CountMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Brute => CountMethod::Brute,
            MethodArg::Decomposed => CountMethod::Decomposed,
            MethodArg::Auto => CountMethod::Auto,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph from a named family as an edge list.
    Generate {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        /// Side sizes for `complete-bipartite`.
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the Gallai–Edmonds decomposition and its checks as JSON.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Count maximum matchings exactly.
    Count {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long)]
        max_a: Option<usize>,
        #[arg(long)]
        max_component_order: Option<usize>,
        #[arg(long)]
        max_bruteforce_order: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Scalar bounds for a graph file, or for bare `--n/--s`.
    Bound {
        #[arg(long = "in", conflicts_with_all = ["n", "s"])]
        input: Option<PathBuf>,
        #[arg(long, requires = "s")]
        n: Option<u64>,
        #[arg(long, requires = "n")]
        s: Option<u64>,
        /// δ for the case split, e.g. `1/50`; defaults to ν/25.
        #[arg(long)]
        delta: Option<String>,
        /// ε for the secondary bound, e.g. `1/2`.
        #[arg(long, default_value = "1/2")]
        epsilon: String,
    },
    /// Run seeded invariant suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a seeded experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// JSON-lines output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Witness matchings kept per extraction.
        #[arg(long)]
        max_witnesses: Option<usize>,
        #[arg(long)]
        record_timing: bool,
    },
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    io::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_rational(text: &str, what: &str) -> Result<Rational> {
    text.trim().parse().map_err(|_| anyhow::anyhow!("{what}: `{text}` is not a rational like 1/2"))
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn require(v: Option<usize>, flag: &str) -> Result<usize> {
    v.with_context(|| format!("--{flag} is required for this kind"))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Generate { kind, n, s, a, b, out } => {
            let kind = match kind {
                KindArg::Complete => GraphKind::Complete { n: require(n, "n")? },
                KindArg::Empty => GraphKind::Empty { n: require(n, "n")? },
                KindArg::CompleteBipartite => GraphKind::CompleteBipartite { a: require(a, "a")?, b: require(b, "b")? },
                KindArg::ExtremalI => GraphKind::ExtremalI { n: require(n, "n")?, s: require(s, "s")? },
                KindArg::ExtremalIi => GraphKind::ExtremalII { n: require(n, "n")?, s: require(s, "s")? },
            };
            emit(out.as_deref(), &io::serialize(&generate(kind)?))?;
            Ok(0)
        }
        Command::Decompose { input } => {
            let g = read_graph(&input)?;
            let dec = decompose(&g);
            let report = verify_decomposition(&g, &dec);
            print_json(&json!({
                "decomposition": dec,
                "stats": gallai_edmonds::stats(&g, &dec),
                "checks": report.checks,
            }))?;
            Ok(if report.passed() { 0 } else { VERIFICATION_FAILED })
        }
        Command::Count { input, method, max_a, max_component_order, max_bruteforce_order, json } => {
            let g = read_graph(&input)?;
            let d = CountLimits::default();
            let limits = CountLimits {
                max_a: max_a.unwrap_or(d.max_a),
                max_component_order: max_component_order.unwrap_or(d.max_component_order),
                max_bruteforce_order: max_bruteforce_order.unwrap_or(d.max_bruteforce_order),
            };
            let (c, used) = count_maximum_matchings(&g, method.into(), &limits)?;
            if json {
                print_json(&json!({ "count": c, "method": used }))?;
            } else {
                println!("{c} {}", serde_json::to_value(used)?.as_str().unwrap_or_default());
            }
            Ok(0)
        }
        Command::Bound { input, n, s, delta, epsilon } => {
            let delta = delta.map(|d| parse_rational(&d, "--delta")).transpose()?;
            let eps = parse_rational(&epsilon, "--epsilon")?;
            if let Some(path) = input {
                let g = read_graph(&path)?;
                let dec = decompose(&g);
                let rep = bounds::bound_report(&g, &dec, delta)?;
                print_json(&serde_json::to_value(&rep)?)?;
                return Ok(if rep.chain_holds() && rep.lemma1_holds() { 0 } else { VERIFICATION_FAILED });
            }
            let (Some(n), Some(s)) = (n, s) else { bail!("pass either --in or both --n and --s") };
            let t1 = bounds::theorem1_bound(n, s).ok();
            print_json(&json!({
                "n": n,
                "s": s,
                "m_eg": bounds::eg_max_size(n, s)?,
                "eg_attained": eg_bound_attained(n, s),
                "branch": bounds::branch(n, s),
                "theorem1": t1,
                "theorem2_bound": bounds::theorem2_bound(n, s, &eps)?,
            }))?;
            Ok(0)
        }
        Command::Verify { suite, seed } => {
            let Some(checks) = run_suite(&suite, seed) else {
                bail!("unknown suite `{suite}`; expected `all` or one of {}", SUITES.join(", "));
            };
            let mut ok = true;
            for c in &checks {
                ok &= c.passed();
                let status = if c.passed() { "PASS" } else { "FAIL" };
                println!("{status} {}/{} ({} trials, {} failures)", c.suite, c.name, c.trials, c.failures);
                if let Some(f) = &c.first_failure {
                    println!("     {f}");
                }
            }
            Ok(if ok { 0 } else { VERIFICATION_FAILED })
        }
        Command::Experiment { config, out, seed, max_witnesses, record_timing } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg: ExperimentConfig =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(w) = max_witnesses {
                cfg.max_witnesses = w;
            }
            cfg.record_timing |= record_timing;
            let report = run_experiment(&cfg)?;
            emit(out.as_deref(), &report.to_json_lines())?;
            eprint!("{}", report.summary.table());
            Ok(if report.summary.clean() { 0 } else { VERIFICATION_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(BAD_INPUT)
        }
    }
}
