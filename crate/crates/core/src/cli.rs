//! Command-line surface.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::example1;
use crate::matrix::{CostMatrix, ReducedMatrix};
use crate::oracles;
use crate::perm::Permutation;
use crate::solve::{solve, SolveConfig};

#[derive(Parser, Debug)]
#[command(
    name = "tspcc",
    version,
    about = "Cycle-canceling assignment and tour solver"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a random instance with uniform integer costs.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        min: i64,
        #[arg(long, default_value_t = 100)]
        max: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run all three phases on a matrix file.
    Solve(SolveArgs),
    /// Replay the eight-city example against the embedded golden trace.
    #[command(name = "replay-example1")]
    ReplayExample1 {
        #[arg(long)]
        rank_budget: Option<usize>,
        /// Print the trace instead of diffing it.
        #[arg(long)]
        print: bool,
    },
    /// Run one reference solver.
    Oracle {
        kind: OracleKind,
        file: PathBuf,
        /// Source vertex for `bf`, 1-based.
        #[arg(long, default_value_t = 1)]
        source: usize,
    },
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Starting tour in cycle notation, e.g. "(1 2 3 4)".
    #[arg(long)]
    pub start_tour: Option<String>,
    /// Candidates kept per walk step; default floor(log2 n) + 1.
    #[arg(long)]
    pub rank_budget: Option<usize>,
    /// Start vertices tried per greedy step; default ceil(log2 n).
    #[arg(long)]
    pub start_budget: Option<usize>,
    /// Greedy reruns when no stored permutation gives a tour; default n * floor(log2 n).
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Search nodes allowed in each exhaustive phase; default 1000000.
    #[arg(long)]
    pub node_budget: Option<u64>,
    /// Largest product of disjoint cycles tried; 0 is unlimited.
    #[arg(long)]
    pub product_cap: Option<usize>,
    /// Take the best move over all start vertices instead of the first improving one.
    #[arg(long)]
    pub sweep_all_starts: bool,
    /// Print the step-by-step trace.
    #[arg(long)]
    pub trace: bool,
    /// Compare against exact reference solvers.
    #[arg(long)]
    pub oracle_check: bool,
    /// Emit the JSON report.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Ap,
    Tsp,
    Bf,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> anyhow::Result<i32> {
    match cmd {
        Command::Gen {
            n,
            min,
            max,
            seed,
            out: path,
        } => {
            if n < 3 {
                bail!("n must be at least 3, got {n}");
            }
            if min > max {
                bail!("empty cost range {min}..{max}");
            }
            let m = CostMatrix::random(n, min, max, &mut ChaCha8Rng::seed_from_u64(seed));
            emit(out, path.as_ref(), &m.to_text())?;
            Ok(0)
        }
        Command::Solve(a) => cmd_solve(a, out),
        Command::ReplayExample1 { rank_budget, print } => {
            let trace = replay_trace(rank_budget)?;
            if print {
                out.write_all(trace.as_bytes())?;
                return Ok(0);
            }
            match first_divergence(example1::GOLDEN_TRACE, &trace) {
                None => {
                    writeln!(out, "PASS replay-example1")?;
                    Ok(0)
                }
                Some((line, want, got)) => {
                    writeln!(out, "FAIL replay-example1: first divergence at line {line}")?;
                    writeln!(out, "  expected: {want}")?;
                    writeln!(out, "  got:      {got}")?;
                    Ok(1)
                }
            }
        }
        Command::Oracle { kind, file, source } => {
            let m = read_matrix(&file)?;
            cmd_oracle(kind, &m, source, out)
        }
    }
}

fn read_matrix(path: &PathBuf) -> anyhow::Result<CostMatrix> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CostMatrix::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let m = read_matrix(&a.file)?;
    let n = m.n();
    let mut cfg = SolveConfig::for_size(n, a.seed);
    if let Some(t) = &a.start_tour {
        cfg.start_tour = Some(Permutation::parse_cycles(t, n).context("--start-tour")?);
    }
    if let Some(k) = a.rank_budget {
        cfg.phase1.rank_budget = k;
    }
    if let Some(k) = a.start_budget {
        cfg.phase1.start_budget = k;
    }
    cfg.phase1.sweep_all_starts = a.sweep_all_starts;
    cfg.phase3.restarts = a.restarts.or(cfg.phase3.restarts);
    if let Some(b) = a.node_budget {
        cfg.phase3.node_budget = b;
    }
    if let Some(c) = a.product_cap {
        cfg.phase3.product_cap = c;
    }
    cfg.trace = a.trace;
    cfg.oracle_check = a.oracle_check;
    let report = solve(&m, &cfg)?;
    let text = if a.json {
        report.to_json()
    } else {
        let mut s = String::new();
        for line in &report.trace {
            s.push_str(line);
            s.push('\n');
        }
        s + &report.summary()
    };
    emit(out, a.out.as_ref(), &text)?;
    let failed = report.oracle.as_ref().is_some_and(|o| !o.pass);
    Ok(if failed { 1 } else { 0 })
}

fn cmd_oracle(
    kind: OracleKind,
    m: &CostMatrix,
    source: usize,
    out: &mut dyn Write,
) -> anyhow::Result<i32> {
    let show = |p: Option<Permutation>| p.map_or("-".to_string(), |p| p.to_string());
    match kind {
        OracleKind::Ap => {
            let (c, p) = if m.n() <= oracles::BRUTE_AP_LIMIT {
                oracles::brute_ap(m)?
            } else {
                writeln!(
                    out,
                    "n = {} above brute-force limit; Hungarian method",
                    m.n()
                )?;
                oracles::hungarian(m)
            };
            writeln!(out, "assignment {}  {c}", show(p))?;
        }
        OracleKind::Tsp => {
            let (c, p) = oracles::held_karp(m)?;
            writeln!(out, "tour {}  {c}", show(p))?;
        }
        OracleKind::Bf => {
            if source == 0 || source > m.n() {
                bail!("source {source} outside 1..={}", m.n());
            }
            let r = ReducedMatrix::from_values(
                m.n(),
                (0..m.n() * m.n())
                    .map(|k| m.get(k / m.n(), k % m.n()))
                    .collect(),
            )?;
            let (dist, _) = oracles::bellman_ford(&r, source - 1);
            let cells: Vec<String> = dist.iter().map(ToString::to_string).collect();
            writeln!(out, "distances from {source}: {}", cells.join(" "))?;
            writeln!(out, "negative cycle: {}", oracles::has_negative_cycle(&r))?;
        }
    }
    Ok(0)
}

/// Trace of the example with default knobs, optionally overriding the
/// rank budget.
pub fn replay_trace(rank_budget: Option<usize>) -> anyhow::Result<String> {
    let m = example1::matrix();
    let mut cfg = SolveConfig::for_size(example1::N, 0);
    cfg.start_tour = Some(example1::start_tour());
    cfg.trace = true;
    if let Some(k) = rank_budget {
        cfg.phase1.rank_budget = k;
    }
    let report = solve(&m, &cfg)?;
    let mut s = String::new();
    for line in &report.trace {
        s.push_str(line);
        s.push('\n');
    }
    s.push_str(&report.summary());
    Ok(s)
}

/// 1-based line of the first difference, with both sides.
pub fn first_divergence(want: &str, got: &str) -> Option<(usize, String, String)> {
    let (w, g): (Vec<&str>, Vec<&str>) = (want.lines().collect(), got.lines().collect());
    for k in 0..w.len().max(g.len()) {
        let (a, b) = (w.get(k).copied(), g.get(k).copied());
        if a != b {
            let show = |x: Option<&str>| x.unwrap_or("<end of trace>").to_string();
            return Some((k + 1, show(a), show(b)));
        }
    }
    None
}
