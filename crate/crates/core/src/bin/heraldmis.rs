use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heraldmis::engine::replay_node;
use heraldmis::graph::Topology;
use heraldmis::harness::{
    read_trace, run, sweep, verify_trace, write_csv, AlphaSpec, GraphSpec, HarnessError, RunConfig, ScheduleSpec,
};

#[derive(Parser)]
#[command(name = "heraldmis", version, about = "Multichannel radio MIS simulator and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and print its result as JSON.
    Run(RunArgs),
    /// Run a grid of (n, F, seed) cells and write a CSV table.
    Sweep(SweepArgs),
    /// Generate a graph and write it as an edge list.
    GenGraph(GenGraphArgs),
    /// Check a JSONL trace: hash and legal transitions.
    VerifyTrace { trace: PathBuf },
    /// Replay one node from a trace's delivery log and compare transitions.
    ReplayNode {
        trace: PathBuf,
        #[arg(long)]
        node: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    UnitDisk,
    Path,
    Cycle,
    Grid,
    Star,
    Clique,
    Empty,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, value_enum)]
    graph: Option<GraphKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    avg_degree: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    width: Option<usize>,
    /// Edge-list file instead of a generator.
    #[arg(long)]
    graph_file: Option<PathBuf>,
}

impl GraphArgs {
    fn spec(&self) -> Option<GraphSpec> {
        self.spec_with(None)
    }

    fn spec_with(&self, default_n: Option<usize>) -> Option<GraphSpec> {
        if let Some(path) = &self.graph_file {
            return Some(GraphSpec::File { path: path.clone() });
        }
        let n = self.n.or(default_n)?;
        let topology = match self.graph? {
            GraphKind::UnitDisk => {
                return Some(GraphSpec::UnitDisk {
                    n,
                    radius: self.radius,
                    avg_degree: self.avg_degree.or(self.radius.is_none().then_some(8.0)),
                    world: 1.0,
                    seed: None,
                })
            }
            GraphKind::Path => Topology::Path,
            GraphKind::Cycle => Topology::Cycle,
            GraphKind::Grid => Topology::Grid,
            GraphKind::Star => Topology::Star,
            GraphKind::Clique => Topology::Clique,
            GraphKind::Empty => Topology::Empty,
        };
        Some(GraphSpec::Structured {
            topology,
            n,
            width: self.width,
        })
    }
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    alpha: Option<u32>,
    #[arg(long)]
    max_rounds: Option<u64>,
    #[arg(long)]
    budget_multiplier: Option<f64>,
    /// Wake nodes in blocks of SIZE every GAP rounds.
    #[arg(long, num_args = 2, value_names = ["SIZE", "GAP"])]
    blocks: Option<Vec<u64>>,
    /// Wake nodes uniformly at random within WINDOW rounds.
    #[arg(long)]
    wake_window: Option<u64>,
    #[arg(long)]
    wake_file: Option<PathBuf>,
}

impl CommonArgs {
    fn config(&self, seed: u64, f: Option<u32>, default_n: Option<usize>) -> Result<RunConfig, HarnessError> {
        let graph = self.graph.spec_with(default_n);
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => {
                let graph = graph.clone().ok_or_else(|| {
                    HarnessError::Config("give --config or --graph with --n (or --graph-file)".into())
                })?;
                RunConfig::new(graph, f.unwrap_or(8), seed)
            }
        };
        cfg.seed = seed;
        if let Some(f) = f {
            cfg.f = f;
        }
        if let Some(g) = graph {
            cfg.graph = g;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = AlphaSpec::Value(a);
        }
        if self.max_rounds.is_some() {
            cfg.max_rounds = self.max_rounds;
        }
        if self.budget_multiplier.is_some() {
            cfg.budget_multiplier = self.budget_multiplier;
        }
        if let Some(b) = &self.blocks {
            cfg.schedule = ScheduleSpec::Blocks {
                size: b[0] as usize,
                gap: b[1],
            };
        }
        if let Some(w) = self.wake_window {
            cfg.schedule = ScheduleSpec::UniformRandom { window: w };
        }
        if let Some(p) = &self.wake_file {
            cfg.schedule = ScheduleSpec::Explicit { path: p.clone() };
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    f: Option<u32>,
    #[command(flatten)]
    common: CommonArgs,
    /// Write a JSONL event trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write violations as JSONL.
    #[arg(long)]
    violations: Option<PathBuf>,
    /// Write the result JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// First seed; cells use SEED..SEED+SEEDS.
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long = "f-list", value_delimiter = ',', required = true)]
    f_list: Vec<u32>,
    #[command(flatten)]
    common: CommonArgs,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenGraphArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn writer(path: Option<&Path>) -> std::io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HERALDMIS_LOG", "warn")).init();
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Run(args) => {
            let mut cfg = args.common.config(args.seed, args.f, None)?;
            if args.trace.is_some() {
                cfg.trace.path = args.trace.clone();
            }
            let result = run(&cfg)?;
            let mut out = writer(args.out.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &result)?;
            writeln!(out)?;
            out.flush()?;
            if let Some(p) = &args.violations {
                let mut w = BufWriter::new(File::create(p)?);
                for v in &result.violations {
                    serde_json::to_writer(&mut w, v)?;
                    writeln!(w)?;
                }
                w.flush()?;
            }
            let stragglers = result.stragglers();
            if !stragglers.is_empty() {
                log::warn!("{} node(s) missed the runtime budget: {stragglers:?}", stragglers.len());
            }
            Ok(if result.safety_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Sweep(args) => {
            let base = args.common.config(args.seed, None, args.n_list.first().copied())?;
            let seeds: Vec<u64> = (args.seed..args.seed + args.seeds).collect();
            let rows = sweep(&base, &args.n_list, &args.f_list, &seeds);
            write_csv(&rows, writer(args.out.as_deref())?)?;
            Ok(if rows.iter().any(|r| r.flagged) {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::GenGraph(args) => {
            let spec = args
                .graph
                .spec()
                .ok_or_else(|| HarnessError::Config("give --graph with --n".into()))?;
            let g = spec.build(args.seed)?;
            let mut out = writer(args.out.as_deref())?;
            out.write_all(g.to_edge_list().as_bytes())?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyTrace { trace } => {
            let t = read_trace(&trace)?;
            let check = verify_trace(&t);
            println!("{}", serde_json::to_string_pretty(&check)?);
            Ok(if check.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::ReplayNode { trace, node } => {
            let t = read_trace(&trace)?;
            let summary = t.summary.as_ref().ok_or_else(|| HarnessError::Trace {
                path: trace.clone(),
                msg: "no summary record".into(),
            })?;
            let wake = *summary.wake.get(node).ok_or_else(|| HarnessError::Config(format!("no node {node}")))?;
            let replayed = replay_node(&summary.params, summary.seed, node, wake, summary.rounds, &t.deliveries);
            let logged: Vec<_> = t.transitions.iter().filter(|r| r.node == node).copied().collect();
            let matches = replayed == logged;
            println!(
                "{}",
                serde_json::json!({ "node": node, "matches": matches, "transitions": replayed.len() })
            );
            Ok(if matches { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
