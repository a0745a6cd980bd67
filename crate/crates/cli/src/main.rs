//! slk: expander graphs, on-line matching, program lists, lower-bound
//! games, and prime splitting, driven from one binary.
//!
//! Every randomized command takes an explicit `--seed` (default 0) and
//! identical invocations produce byte-identical output. Potentially
//! explosive searches respect the work budget, overridable through the
//! `SLK_WORK_BUDGET` environment variable. Exit codes: 0 success or
//! positive verdict, 1 verified negative verdict, 2 usage or input
//! errors, 3 work budget exceeded.

mod table;

use std::collections::BTreeMap;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use slk_core::adversary::{
    blind_black, degree_pressure_report, fooling_search, pawn_game_run, FloodBlack, FoolingMode,
    FoolingResult, GameResult, GreedyWhite, RandomBlack,
};
use slk_core::approximator::{
    build_approximator, complexity, conditional_compress, ct_complexity, CascadeFamily,
    DefaultMachine, ToyMachine,
};
use slk_core::bitgraph::{BitGraph, GraphFamily};
use slk_core::bits::BitString;
use slk_core::budget::default_work_budget;
use slk_core::expanders::{
    amplify, gen_random_expander, gen_variable_length_expander, verify_expansion_all_t,
    verify_expansion_exact, verify_expansion_sampled, DisperserSpec, ExpanderSpec, Verdict,
};
use slk_core::hashsplit::{
    build_split_graph, certify_unique, find_splitting_prime_with, PrimeSieve,
};
use slk_core::matching::{
    build_cascade, decide_online_matching, overhead_audit, CascadeMatcher, CascadeOutcome,
    MatchRequest, RequestOutcome, Transcript, TranscriptEntry, Winner,
};
use slk_core::rng::SplitMix64;
use slk_core::Error;

#[derive(Parser)]
#[command(
    name = "slk",
    version,
    about = "expander, matching, and program-list toolkit"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded random expander with left set {0,1}^n.
    GenExpander(GenExpanderArgs),
    /// Generate the variable-length family member (left lengths k..=max-len).
    GenVarlen(GenVarlenArgs),
    /// Check expansion of a graph file: exact, all-t, or sampled.
    Verify(VerifyArgs),
    /// Disjoint tagged copies of a base graph.
    Amplify(AmplifyArgs),
    /// Serve a request stream (lines "x k") through per-length cascades.
    Match(MatchArgs),
    /// Decide the finite matching game by exhaustive search.
    DecideMatch(DecideArgs),
    /// Program-list operations over the built-in machine.
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Adversarial games.
    #[command(subcommand)]
    Game(GameCmd),
    /// Lower-bound searches.
    #[command(subcommand)]
    Lower(LowerCmd),
    /// Prime-residue splitting.
    #[command(subcommand)]
    Split(SplitCmd),
}

#[derive(Args)]
struct GenExpanderArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// Neighbor count; defaults to n+1 clamped to the right side.
    #[arg(long)]
    degree: Option<u32>,
    /// Right-node bit length; defaults to k+2.
    #[arg(long)]
    right_len: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenVarlenArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    max_len: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    node_cap: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, conflicts_with_all = ["all_t", "sampled"])]
    exact: bool,
    #[arg(long = "all-t", conflicts_with = "sampled")]
    all_t: bool,
    #[arg(long)]
    sampled: bool,
    #[arg(long = "K")]
    k: u64,
    #[arg(long = "K-prime")]
    k_prime: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AmplifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Explicit copy count t.
    #[arg(long)]
    copies: Option<u64>,
    /// Or derive t = max(1, ceil(2 n^3 / (alpha D))) from these.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    degree: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long = "K", default_value_t = 0)]
    k_threshold: u64,
    /// Record that the base was verified disperser-shaped.
    #[arg(long)]
    base_verified: bool,
}

#[derive(Args)]
struct MatchArgs {
    /// Directory of base expanders named <n>_<j>.bg.
    #[arg(long)]
    graphs: PathBuf,
    #[arg(long)]
    overhead_audit: bool,
    /// Also write the transcript lines to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    overhead: u32,
    /// Class budgets as k=count pairs, comma separated: "0=1,1=2".
    #[arg(long)]
    budgets: String,
}

#[derive(Subcommand)]
enum ApproxCmd {
    /// Replay the program table through cascades and write the table file.
    Build(ApproxBuildArgs),
    /// Print the candidate list for x from a table file.
    List(ApproxListArgs),
    /// Brute-force program-length complexity of x.
    Complexity(ComplexityArgs),
    /// Total conditional complexity over a finite condition universe.
    Ct(CtArgs),
    /// Compress a given b: the hash of a shortest program mapping b to a.
    Compress(CompressArgs),
}

#[derive(Args)]
struct ApproxBuildArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long, default_value_t = 8)]
    max_prog_len: u32,
    /// Directory of base expanders named <n>_<j>.bg.
    #[arg(long)]
    graph_dir: Option<PathBuf>,
    #[arg(long, default_value = "default")]
    machine: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ApproxListArgs {
    x: String,
    #[arg(long)]
    table: PathBuf,
}

#[derive(Args)]
struct ComplexityArgs {
    x: String,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    /// Search cap; defaults to |x| + 2.
    #[arg(long)]
    max_len: Option<u32>,
    #[arg(long, default_value = "default")]
    machine: String,
}

#[derive(Args)]
struct CtArgs {
    u: String,
    v: String,
    #[arg(long)]
    cap: u32,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long)]
    max_len: Option<u32>,
    #[arg(long, default_value = "default")]
    machine: String,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long)]
    max_prog_len: u32,
    #[arg(long)]
    graph_dir: Option<PathBuf>,
    #[arg(long, default_value = "default")]
    machine: String,
}

#[derive(Subcommand)]
enum GameCmd {
    /// Run the pawn game: greedy White against the chosen Black.
    Pawn(PawnArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BlackKind {
    Random,
    Flood,
    Blind,
}

#[derive(Args)]
struct PawnArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    d: u32,
    #[arg(long, value_enum)]
    black: BlackKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step budget for the blind Black's machine enumeration.
    #[arg(long, default_value_t = 1_000)]
    machine_budget: u64,
    /// Write the move trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LowerCmd {
    /// Search for a fooling witness against expansion.
    Fooling(FoolingArgs),
    /// Degree threshold report with the witness search when it applies.
    Degree(DegreeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FoolingModeArg {
    Exhaustive,
    Randomized,
}

#[derive(Args)]
struct FoolingArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    c: u32,
    #[arg(long, value_enum)]
    mode: FoolingModeArg,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DegreeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    c: u32,
}

#[derive(Subcommand)]
enum SplitCmd {
    /// Splitting primes for a seeded random set of n-bit strings.
    Primes(PrimesArgs),
    /// Compose a base graph with prime-residue splitting.
    Build(SplitBuildArgs),
    /// Certify that x owns a composite neighbor within the set.
    Certify(CertifyArgs),
}

#[derive(Args)]
struct PrimesArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SplitBuildArgs {
    #[arg(long)]
    base: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    base: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    k: u32,
    /// File with one set member per line.
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    x: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::WorkBudgetExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<u8, Error> {
    match cmd {
        Cmd::GenExpander(a) => gen_expander(a),
        Cmd::GenVarlen(a) => gen_varlen(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Amplify(a) => run_amplify(a),
        Cmd::Match(a) => run_match(a),
        Cmd::DecideMatch(a) => decide_match(a),
        Cmd::Approx(a) => match a {
            ApproxCmd::Build(a) => approx_build(a),
            ApproxCmd::List(a) => approx_list(a),
            ApproxCmd::Complexity(a) => approx_complexity(a),
            ApproxCmd::Ct(a) => approx_ct(a),
            ApproxCmd::Compress(a) => approx_compress(a),
        },
        Cmd::Game(GameCmd::Pawn(a)) => game_pawn(a),
        Cmd::Lower(a) => match a {
            LowerCmd::Fooling(a) => lower_fooling(a),
            LowerCmd::Degree(a) => lower_degree(a),
        },
        Cmd::Split(a) => match a {
            SplitCmd::Primes(a) => split_primes(a),
            SplitCmd::Build(a) => split_build(a),
            SplitCmd::Certify(a) => split_certify(a),
        },
    }
}

fn io_err(e: std::io::Error, path: &Path) -> Error {
    Error::InvalidSpec(format!("{}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Result<BitGraph, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(e, path))?;
    BitGraph::read_text(&text)
}

fn save_graph(path: &Path, g: &BitGraph) -> Result<(), Error> {
    std::fs::write(path, g.write_text()).map_err(|e| io_err(e, path))
}

fn parse_bits(s: &str) -> Result<BitString, Error> {
    BitString::parse(s)
}

/// Self-delimiting code of a number: every bit of the binary form
/// doubled, terminated by 01. Zero encodes as just the terminator.
fn length_prefix_code(n: usize) -> BitString {
    let mut out = BitString::empty();
    if n > 0 {
        let width = usize::BITS - n.leading_zeros();
        for i in (0..width).rev() {
            let b = ((n >> i) & 1) as u8;
            out.push(b);
            out.push(b);
        }
    }
    out.push(0);
    out.push(1);
    out
}

fn machine_by_name(name: &str) -> Result<DefaultMachine, Error> {
    if name == "default" {
        Ok(DefaultMachine)
    } else {
        Err(Error::InvalidSpec(format!(
            "unknown machine {name:?}; the built-in is \"default\""
        )))
    }
}

fn gen_expander(a: GenExpanderArgs) -> Result<u8, Error> {
    let mut spec = ExpanderSpec::fixed_length(a.n, a.k, a.seed)?;
    if let Some(d) = a.degree {
        spec.degree = d;
    }
    if let Some(m) = a.right_len {
        spec.right_len = m;
    }
    let g = gen_random_expander(&spec)?;
    save_graph(&a.out, &g)?;
    println!(
        "WROTE {} left={} right_len={} degree={}",
        a.out.display(),
        g.left_count(),
        g.right_len(),
        spec.degree
    );
    println!(
        "#json {}",
        json!({
            "command": "gen-expander",
            "n": a.n, "k": a.k, "seed": a.seed,
            "degree": spec.degree, "right_len": g.right_len(),
            "left_count": g.left_count(),
            "out": a.out.display().to_string(),
        })
    );
    Ok(0)
}

fn gen_varlen(a: GenVarlenArgs) -> Result<u8, Error> {
    let g = gen_variable_length_expander(a.k, a.max_len, a.seed, a.node_cap)?;
    save_graph(&a.out, &g)?;
    println!(
        "WROTE {} left={} right_len={}",
        a.out.display(),
        g.left_count(),
        g.right_len()
    );
    println!(
        "#json {}",
        json!({
            "command": "gen-varlen",
            "k": a.k, "max_len": a.max_len, "seed": a.seed,
            "left_count": g.left_count(), "right_len": g.right_len(),
            "out": a.out.display().to_string(),
        })
    );
    Ok(0)
}

fn verify(a: VerifyArgs) -> Result<u8, Error> {
    let g = load_graph(&a.input)?;
    let work = default_work_budget();
    let verdict = if a.all_t {
        verify_expansion_all_t(&g, a.k, work)?
    } else if a.sampled {
        let kp = a.k_prime.unwrap_or(a.k);
        verify_expansion_sampled(&g, a.k, kp, a.trials, a.seed)
    } else if a.exact {
        let kp = a.k_prime.unwrap_or(a.k);
        verify_expansion_exact(&g, a.k, kp, work)?
    } else {
        return Err(Error::InvalidSpec(
            "choose one of --exact, --all-t, --sampled".into(),
        ));
    };
    match verdict {
        Verdict::Pass => {
            println!("PASS");
            println!(
                "#json {}",
                json!({"command": "verify", "verdict": "pass", "K": a.k})
            );
            Ok(0)
        }
        Verdict::Fail(w) => {
            let nodes: Vec<String> = w.left_set.iter().map(|x| x.to_string()).collect();
            println!("FAIL witness={}", nodes.join(","));
            println!(
                "#json {}",
                json!({
                    "command": "verify", "verdict": "fail",
                    "witness": nodes,
                    "neighborhood_size": w.neighborhood.len(),
                    "k": w.k, "k_prime": w.k_prime,
                    "reverified": w.verify(&g),
                })
            );
            Ok(1)
        }
        Verdict::Unknown { trials } => {
            println!("UNKNOWN trials={trials}");
            println!(
                "#json {}",
                json!({"command": "verify", "verdict": "unknown", "trials": trials})
            );
            Ok(0)
        }
    }
}

fn run_amplify(a: AmplifyArgs) -> Result<u8, Error> {
    let base = load_graph(&a.input)?;
    let spec = match (a.copies, a.n, a.degree) {
        (Some(t), _, _) => DisperserSpec::with_copies(t),
        (None, Some(n), Some(degree)) => {
            DisperserSpec::for_amplification(n, a.k_threshold, a.delta, degree, a.alpha)?
        }
        _ => {
            return Err(Error::InvalidSpec(
                "give --copies, or --n and --degree to derive the copy count".into(),
            ))
        }
    };
    let out = amplify(&base, &spec)?;
    save_graph(&a.out, &out)?;
    println!(
        "AMPLIFIED copies={} right_len={} base_verified={}",
        spec.copies,
        out.right_len(),
        a.base_verified
    );
    println!(
        "#json {}",
        json!({
            "command": "amplify",
            "copies": spec.copies,
            "right_len": out.right_len(),
            "base_right_len": base.right_len(),
            "base_verified": a.base_verified,
            "out": a.out.display().to_string(),
        })
    );
    Ok(0)
}

/// Base expander files named <n>_<j>.bg, collected into a validated
/// family keyed by (left length, capacity exponent).
fn load_family_dir(dir: &Path) -> Result<GraphFamily, Error> {
    let mut family = GraphFamily::new(false, 0);
    if !dir.exists() {
        return Ok(family);
    }
    let entries = std::fs::read_dir(dir).map_err(|e| io_err(e, dir))?;
    let mut keyed: BTreeMap<(u32, u32), PathBuf> = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|e| io_err(e, dir))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(stem) = name.strip_suffix(".bg") else {
            continue;
        };
        let Some((n_str, j_str)) = stem.split_once('_') else {
            continue;
        };
        let (Ok(n), Ok(j)) = (n_str.parse::<u32>(), j_str.parse::<u32>()) else {
            continue;
        };
        keyed.insert((n, j), entry.path());
    }
    for ((n, j), path) in keyed {
        family.insert(n, j, load_graph(&path)?)?;
    }
    Ok(family)
}

fn cascade_for(family: &GraphFamily, n: u32) -> Result<CascadeMatcher, Error> {
    let bases: BTreeMap<u32, BitGraph> = family
        .members
        .range((n, 0)..=(n, u32::MAX))
        .map(|(&(_, j), g)| (j, g.clone()))
        .collect();
    build_cascade(&bases, n, 0)
}

fn run_match(a: MatchArgs) -> Result<u8, Error> {
    let families = load_family_dir(&a.graphs)?;
    let mut matchers: BTreeMap<u32, CascadeMatcher> = BTreeMap::new();
    let mut stdin = String::new();
    std::io::stdin()
        .read_to_string(&mut stdin)
        .map_err(|e| Error::InvalidSpec(format!("stdin: {e}")))?;
    let mut lines: Vec<String> = Vec::new();
    let mut glued = Transcript::default();
    for (no, line) in stdin.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(xs), Some(ks), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                line: no + 1,
                msg: format!("expected \"<x-bits> <k>\", got {line:?}"),
            });
        };
        let x = parse_bits(xs)?;
        let k: u32 = ks.parse().map_err(|_| Error::Parse {
            line: no + 1,
            msg: format!("bad class {ks:?}"),
        })?;
        let n = x.len() as u32;
        if let std::collections::btree_map::Entry::Vacant(e) = matchers.entry(n) {
            e.insert(cascade_for(&families, n)?);
        }
        let matcher = matchers.get_mut(&n).unwrap();
        let glue = length_prefix_code(x.len());
        let outcome = matcher.request(&MatchRequest { x: x.clone(), k })?;
        let (line_out, entry_outcome) = match outcome {
            CascadeOutcome::Matched {
                hash,
                over_budget: false,
                ..
            } => {
                let full = glue.concat(&hash);
                (
                    format!("MATCH {x} {k} {full}"),
                    RequestOutcome::Matched { hash: full },
                )
            }
            CascadeOutcome::Matched {
                hash,
                over_budget: true,
                ..
            } => (
                format!("BUDGET-VIOLATION {x} {k}"),
                RequestOutcome::BudgetViolation {
                    matched: Some(glue.concat(&hash)),
                },
            ),
            CascadeOutcome::Exhausted => (
                format!("BUDGET-VIOLATION {x} {k}"),
                RequestOutcome::BudgetViolation { matched: None },
            ),
        };
        println!("{line_out}");
        lines.push(line_out);
        glued.push(TranscriptEntry {
            x,
            k: Some(k),
            outcome: entry_outcome,
            levels_tried: Vec::new(),
        });
    }
    let mut code = 0u8;
    if a.overhead_audit {
        let report = overhead_audit(&glued);
        let audit_line = format!(
            "AUDIT injective={} matched={} budget_violations={}",
            report.injective, report.matched, report.budget_violations
        );
        println!("{audit_line}");
        lines.push(audit_line);
        for (n, max) in &report.per_n_max_overhead {
            let l = format!("AUDIT overhead n={n} max={max}");
            println!("{l}");
            lines.push(l);
        }
        if !report.passes(None) {
            code = 1;
        }
        println!(
            "#json {}",
            json!({
                "command": "match",
                "requests": glued.len(),
                "injective": report.injective,
                "budget_violations": report.budget_violations,
                "per_n_max_overhead": report
                    .per_n_max_overhead
                    .iter()
                    .map(|(n, m)| (n.to_string(), *m))
                    .collect::<BTreeMap<String, i64>>(),
            })
        );
    }
    if let Some(out) = &a.out {
        std::fs::write(out, lines.join("\n") + "\n").map_err(|e| io_err(e, out))?;
    }
    Ok(code)
}

fn parse_budgets(s: &str) -> Result<BTreeMap<u32, u64>, Error> {
    let mut out = BTreeMap::new();
    for part in s.split(',') {
        let Some((k, v)) = part.split_once('=') else {
            return Err(Error::InvalidSpec(format!(
                "budget {part:?} is not k=count"
            )));
        };
        let k: u32 = k
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad class {k:?}")))?;
        let v: u64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad count {v:?}")))?;
        out.insert(k, v);
    }
    Ok(out)
}

fn decide_match(a: DecideArgs) -> Result<u8, Error> {
    let g = load_graph(&a.graph)?;
    let budgets = parse_budgets(&a.budgets)?;
    let outcome = decide_online_matching(&g, a.overhead, &budgets, default_work_budget())?;
    let winner = match outcome.winner {
        Winner::Matcher => "Matcher",
        Winner::Requester => "Requester",
    };
    println!("WINNER {winner}");
    for step in &outcome.line {
        println!("TRACE {step}");
    }
    println!(
        "#json {}",
        json!({
            "command": "decide-match",
            "winner": winner,
            "line": outcome.line,
            "states_explored": outcome.states_explored,
        })
    );
    Ok(if outcome.winner == Winner::Matcher {
        0
    } else {
        1
    })
}

/// Builds the cascade family used by an approx run: any base graphs from
/// the directory, plus self-serving matchers for every output length the
/// program table can produce plus the focal n.
fn approx_family(
    machine: &dyn ToyMachine,
    condition: &BitString,
    budget: u64,
    max_prog_len: u32,
    graph_dir: Option<&Path>,
    focal_n: Option<u32>,
) -> Result<CascadeFamily, Error> {
    let families = match graph_dir {
        Some(dir) => load_family_dir(dir)?,
        None => GraphFamily::new(false, 0),
    };
    let table = slk_core::approximator::program_table(machine, condition, budget, max_prog_len)?;
    let mut lengths: std::collections::BTreeSet<u32> = table
        .entries
        .iter()
        .map(|(_, out)| out.len() as u32)
        .collect();
    lengths.extend(families.members.keys().map(|&(n, _)| n));
    lengths.extend(focal_n);
    let mut family = CascadeFamily::new();
    for n in lengths {
        family.insert(cascade_for(&families, n)?);
    }
    Ok(family)
}

fn approx_build(a: ApproxBuildArgs) -> Result<u8, Error> {
    let machine = machine_by_name(&a.machine)?;
    let family = approx_family(
        &machine,
        &BitString::empty(),
        a.budget,
        a.max_prog_len,
        a.graph_dir.as_deref(),
        Some(a.n),
    )?;
    let build = build_approximator(&machine, family, a.budget, a.max_prog_len)?;
    let text = table::write_table(&build);
    std::fs::write(&a.out, text).map_err(|e| io_err(e, &a.out))?;
    println!(
        "BUILT n={} decoder_entries={} overhead={} witness_slack={}",
        a.n,
        build.decoder.len(),
        build.overhead_const,
        build.witness_slack
    );
    println!(
        "#json {}",
        json!({
            "command": "approx-build",
            "n": a.n,
            "budget": a.budget,
            "max_prog_len": a.max_prog_len,
            "decoder_entries": build.decoder.len(),
            "overhead": build.overhead_const,
            "witness_slack": build.witness_slack,
            "lengths": build.family.covered_lengths(),
            "out": a.out.display().to_string(),
        })
    );
    Ok(0)
}

fn approx_list(a: ApproxListArgs) -> Result<u8, Error> {
    let x = parse_bits(&a.x)?;
    let text = std::fs::read_to_string(&a.table).map_err(|e| io_err(e, &a.table))?;
    let table = table::read_table(&text)?;
    let machine = machine_by_name(&table.machine)?;
    let list = table.list(&x)?;
    let witness = table.find_witness(&machine, &x, &list);
    println!("LIST x={} size={}", x, list.len());
    for (i, p) in list.iter().enumerate() {
        println!("{} {}", i + 1, p);
    }
    match witness {
        Some((j, ref p, c)) => println!("WITNESS index={} program={} complexity={}", j + 1, p, c),
        None => println!("WITNESS none"),
    }
    println!(
        "#json {}",
        json!({
            "command": "approx-list",
            "x": x.to_string(),
            "size": list.len(),
            "overhead": table.overhead,
            "witness_slack": table.witness_slack,
            "witness_index": witness.as_ref().map(|(j, _, _)| j + 1),
        })
    );
    Ok(if witness.is_some() { 0 } else { 1 })
}

fn approx_complexity(a: ComplexityArgs) -> Result<u8, Error> {
    let machine = machine_by_name(&a.machine)?;
    let x = parse_bits(&a.x)?;
    let max_len = a.max_len.unwrap_or(x.len() as u32 + 2);
    let c = complexity(&machine, &x, a.budget, max_len);
    match c {
        Some(c) => println!("COMPLEXITY x={x} budget={} value={c}", a.budget),
        None => println!("COMPLEXITY x={x} budget={} value=infinity", a.budget),
    }
    println!(
        "#json {}",
        json!({
            "command": "approx-complexity",
            "x": x.to_string(),
            "budget": a.budget,
            "max_len": max_len,
            "value": c,
        })
    );
    Ok(0)
}

fn approx_ct(a: CtArgs) -> Result<u8, Error> {
    let machine = machine_by_name(&a.machine)?;
    let u = parse_bits(&a.u)?;
    let v = parse_bits(&a.v)?;
    let max_len = a.max_len.unwrap_or(u.len() as u32 + 2);
    let ct = ct_complexity(&machine, &u, &v, a.budget, a.cap, max_len);
    match ct {
        Some(c) => println!("CT u={u} v={v} cap={} value={c}", a.cap),
        None => println!("CT u={u} v={v} cap={} value=infinity", a.cap),
    }
    println!(
        "#json {}",
        json!({
            "command": "approx-ct",
            "u": u.to_string(),
            "v": v.to_string(),
            "cap": a.cap,
            "budget": a.budget,
            "value": ct,
        })
    );
    Ok(0)
}

fn approx_compress(a: CompressArgs) -> Result<u8, Error> {
    let machine = machine_by_name(&a.machine)?;
    let target = parse_bits(&a.a)?;
    let cond = parse_bits(&a.b)?;
    let family = approx_family(
        &machine,
        &cond,
        a.budget,
        a.max_prog_len,
        a.graph_dir.as_deref(),
        Some(target.len() as u32),
    )?;
    match conditional_compress(&machine, &target, &cond, family, a.budget, a.max_prog_len) {
        Ok((p, build)) => {
            let recovered = build.recover(&p) == Some(target.clone());
            println!("COMPRESS a={target} b={cond} p={p} recovered={recovered}");
            println!(
                "#json {}",
                json!({
                    "command": "approx-compress",
                    "a": target.to_string(),
                    "b": cond.to_string(),
                    "p": p.to_string(),
                    "p_len": p.len(),
                    "overhead": build.overhead_const,
                    "recovered": recovered,
                })
            );
            Ok(0)
        }
        Err(Error::NotFound { max_len }) => {
            println!("COMPRESS a={target} b={cond} NOT-FOUND max_prog_len={max_len}");
            println!(
                "#json {}",
                json!({
                    "command": "approx-compress",
                    "a": target.to_string(),
                    "not_found": true,
                })
            );
            Ok(1)
        }
        Err(e) => Err(e),
    }
}

fn game_pawn(a: PawnArgs) -> Result<u8, Error> {
    let mut white = GreedyWhite;
    let outcome = match a.black {
        BlackKind::Random => {
            let mut black = RandomBlack::new(a.seed);
            pawn_game_run(a.k, a.d, &mut white, &mut black)?
        }
        BlackKind::Flood => {
            let mut black = FloodBlack;
            pawn_game_run(a.k, a.d, &mut white, &mut black)?
        }
        BlackKind::Blind => {
            let mut black = blind_black(&DefaultMachine, a.machine_budget, a.k, a.d)?;
            pawn_game_run(a.k, a.d, &mut white, &mut black)?
        }
    };
    let (line, code, result_name) = match outcome.result {
        GameResult::WhiteSurvives => ("WHITE-SURVIVES".to_string(), 0u8, "white-survives"),
        GameResult::WhiteLoses { turn } => (format!("WHITE-LOSES turn={turn}"), 1, "white-loses"),
    };
    println!(
        "{line} black_moves={} white_moves={}",
        outcome.final_state.black_moves(),
        outcome.final_state.white_moves()
    );
    if let Some(path) = &a.trace {
        std::fs::write(path, outcome.trace.join("\n") + "\n").map_err(|e| io_err(e, path))?;
    }
    println!(
        "#json {}",
        json!({
            "command": "game-pawn",
            "k": a.k, "d": a.d, "seed": a.seed,
            "result": result_name,
            "black_moves": outcome.final_state.black_moves(),
            "white_moves": outcome.final_state.white_moves(),
            "disabled_cells": outcome.final_state.disabled_cell_count(),
        })
    );
    Ok(code)
}

fn lower_fooling(a: FoolingArgs) -> Result<u8, Error> {
    let g = load_graph(&a.graph)?;
    let mode = match a.mode {
        FoolingModeArg::Exhaustive => FoolingMode::Exhaustive,
        FoolingModeArg::Randomized => FoolingMode::Randomized {
            trials: a.trials,
            seed: a.seed,
        },
    };
    match fooling_search(&g, a.k, a.c, mode, default_work_budget())? {
        FoolingResult::Witness(w) => {
            let b: Vec<String> = w.b.iter().map(|p| p.to_string()).collect();
            let s: Vec<String> = w.s.iter().map(|x| x.to_string()).collect();
            println!(
                "WITNESS B={} S_size={} verified={}",
                b.join(","),
                s.len(),
                w.verify(&g)
            );
            println!(
                "#json {}",
                json!({
                    "command": "lower-fooling",
                    "witness": {"b": b, "s": s},
                    "verified": w.verify(&g),
                })
            );
            Ok(1)
        }
        FoolingResult::NoneFound { exhaustive, trials } => {
            println!("NONE-FOUND exhaustive={exhaustive} trials={trials}");
            println!(
                "#json {}",
                json!({
                    "command": "lower-fooling",
                    "none_found": true,
                    "exhaustive": exhaustive,
                    "trials": trials,
                })
            );
            Ok(0)
        }
    }
}

fn lower_degree(a: DegreeArgs) -> Result<u8, Error> {
    let g = load_graph(&a.graph)?;
    let report = degree_pressure_report(&g, a.k, a.c, default_work_budget())?;
    println!(
        "DEGREE l={} k={} c={} max_degree={} threshold={} within_threshold={}",
        report.ell,
        report.k,
        report.c,
        report.max_degree,
        report.threshold,
        report.within_threshold
    );
    let witness_found = match &report.search {
        Some(FoolingResult::Witness(w)) => {
            println!("WITNESS S_size={} verified={}", w.s.len(), w.verify(&g));
            Some(true)
        }
        Some(FoolingResult::NoneFound { .. }) => {
            println!("WITNESS none (contradicts the degree threshold guarantee)");
            Some(false)
        }
        None => {
            println!("NO-CONCLUSION degree above threshold");
            None
        }
    };
    println!(
        "#json {}",
        json!({
            "command": "lower-degree",
            "l": report.ell, "k": report.k, "c": report.c,
            "max_degree": report.max_degree,
            "threshold": report.threshold,
            "within_threshold": report.within_threshold,
            "witness_found": witness_found,
        })
    );
    Ok(0)
}

fn split_primes(a: PrimesArgs) -> Result<u8, Error> {
    if a.count == 0 {
        return Err(Error::EmptySet);
    }
    if a.n >= 32 || (a.count as u64) > 1 << a.n {
        return Err(Error::InvalidSpec(format!(
            "cannot draw {} distinct strings of length {}",
            a.count, a.n
        )));
    }
    let mut rng = SplitMix64::new(a.seed);
    let mut w: Vec<BitString> = Vec::new();
    while w.len() < a.count {
        let cand = rng.bits(a.n as usize);
        if !w.contains(&cand) {
            w.push(cand);
        }
    }
    let cap = 4 * a.count as u64 * (a.n as u64) * (a.n as u64);
    let sieve = PrimeSieve::up_to(cap)?;
    let mut max_q = 0;
    let mut rows = Vec::new();
    for x in &w {
        let q = find_splitting_prime_with(&sieve, x, &w)?;
        max_q = max_q.max(q);
        println!("PRIME x={x} q={q}");
        rows.push(json!({"x": x.to_string(), "q": q}));
    }
    println!("CAP 4dn2={cap} max_q={max_q}");
    println!(
        "#json {}",
        json!({
            "command": "split-primes",
            "n": a.n, "count": a.count, "seed": a.seed,
            "cap": cap, "max_q": max_q,
            "primes": rows,
        })
    );
    Ok(0)
}

fn split_build(a: SplitBuildArgs) -> Result<u8, Error> {
    let base = load_graph(&a.base)?;
    let n = base
        .left_nodes()
        .first()
        .map(|x| x.len() as u32)
        .ok_or(Error::EmptySet)?;
    let build = build_split_graph(&base, n, a.k, a.eps)?;
    save_graph(&a.out, &build.graph)?;
    println!(
        "SPLIT d={} cap={} width={} right_len={} primes={}",
        build.d,
        build.cap,
        build.width,
        build.graph.right_len(),
        build.sieve.count()
    );
    println!(
        "#json {}",
        json!({
            "command": "split-build",
            "n": n, "k": a.k, "eps": a.eps,
            "d": build.d, "cap": build.cap, "width": build.width,
            "right_len": build.graph.right_len(),
            "prime_count": build.sieve.count(),
            "out": a.out.display().to_string(),
        })
    );
    Ok(0)
}

fn split_certify(a: CertifyArgs) -> Result<u8, Error> {
    let base = load_graph(&a.base)?;
    let n = base
        .left_nodes()
        .first()
        .map(|x| x.len() as u32)
        .ok_or(Error::EmptySet)?;
    let build = build_split_graph(&base, n, a.k, a.eps)?;
    let text = std::fs::read_to_string(&a.set).map_err(|e| io_err(e, &a.set))?;
    let mut s = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if !line.is_empty() {
            s.push(parse_bits(line)?);
        }
    }
    let x = parse_bits(&a.x)?;
    match certify_unique(&build, &s, &x)? {
        Some(cert) => {
            let ok = cert.verify(&build, &s);
            println!(
                "CERT x={} p={} a={} q={} verified={ok}",
                cert.owner, cert.p, cert.a, cert.q
            );
            println!(
                "#json {}",
                json!({
                    "command": "split-certify",
                    "x": cert.owner.to_string(),
                    "p": cert.p.to_string(),
                    "a": cert.a, "q": cert.q,
                    "verified": ok,
                })
            );
            Ok(0)
        }
        None => {
            println!("NONE x={x}");
            println!(
                "#json {}",
                json!({"command": "split-certify", "x": x.to_string(), "none": true})
            );
            Ok(1)
        }
    }
}
