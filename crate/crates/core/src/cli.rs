//! The `knowshare` command line: ingest → graph → simulate → export.
//!
//! Exit status is 0 on success, 1 on usage errors and 2 on data errors.
//! Diagnostics go to stderr; data goes to files or stdout.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diffusion::{monte_carlo, simulate, trace_root, SpreadConfig, SpreadModel, Transmission};
use crate::error::Result;
use crate::graph::{build_graph, KnowledgeGraph, WeightMode};
use crate::ids::ActorId;
use crate::io::{export_graph, export_trace, ingest, json_bytes, load_json, save_json, write_bytes, GraphFormat, InputFormat, TraceFormat};
use crate::model::KnowledgeBase;
use crate::overlap::{overlap_matrix, OverlapMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "knowshare", version, about = "Knowledge-overlap actor networks and spread simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransmissionKind {
    Unit,
    Proportional,
    Scaled,
}

#[derive(Debug, clap::Args)]
struct Dynamics {
    #[arg(long, value_enum, default_value_t = SpreadModel::Si)]
    model: SpreadModel,
    #[arg(long, value_enum, default_value_t = TransmissionKind::Unit)]
    transmission: TransmissionKind,
    /// Rate for scaled transmission, p = 1 - exp(-lambda * weight)
    #[arg(long, default_value_t = crate::diffusion::DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = 100)]
    rounds: u32,
    #[arg(long = "rng-seed", default_value_t = 0)]
    rng_seed: u64,
}

impl Dynamics {
    fn config(&self, seeds: impl IntoIterator<Item = ActorId>) -> SpreadConfig {
        let transmission = match self.transmission {
            TransmissionKind::Unit => Transmission::Unit,
            TransmissionKind::Proportional => Transmission::Proportional,
            TransmissionKind::Scaled => Transmission::Scaled { lambda: self.lambda },
        };
        SpreadConfig::new(self.model, seeds)
            .with_transmission(transmission)
            .with_max_rounds(self.rounds)
            .with_rng_seed(self.rng_seed)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read incidence data and write a knowledge base file
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Csv)]
        format: InputFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the actor graph from a knowledge base file
    Graph {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long, value_enum, default_value_t = WeightMode::Intersection)]
        mode: WeightMode,
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = OverlapMode::Count)]
        overlap: OverlapMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print order, size, degree histogram and components as JSON
    Stats {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Run one spread simulation; with --trials also print estimates
    Simulate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_actor)]
        seeds: Vec<ActorId>,
        #[command(flatten)]
        dynamics: Dynamics,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = TraceFormat::Json)]
        format: TraceFormat,
    },
    /// Rank candidate origins of an observed infected set
    TraceRoot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_actor)]
        infected: Vec<ActorId>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[command(flatten)]
        dynamics: Dynamics,
    },
    /// Write a graph file to stdout in another format
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphFormat::EdgeJson)]
        format: GraphFormat,
    },
}

fn parse_actor(s: &str) -> std::result::Result<ActorId, String> {
    ActorId::new(s).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct RankedCandidate {
    actor: ActorId,
    score: f64,
}

fn execute(command: Command) -> Result<Vec<u8>> {
    let mut printed = Vec::new();
    match command {
        Command::Ingest { input, format, out } => {
            let kb = ingest(&input, format)?;
            save_json(&out, &kb)?;
        }
        Command::Graph {
            kb,
            mode,
            threshold,
            overlap,
            out,
        } => {
            let kb: KnowledgeBase = load_json(&kb)?;
            let matrix = overlap_matrix(&kb, overlap);
            let g = build_graph(&kb, &matrix, mode, threshold)?;
            save_json(&out, &g)?;
        }
        Command::Stats { graph } => {
            let g: KnowledgeGraph = load_json(&graph)?;
            printed = json_bytes(&g.stats());
        }
        Command::Simulate {
            graph,
            seeds,
            dynamics,
            trials,
            out,
            format,
        } => {
            let g: KnowledgeGraph = load_json(&graph)?;
            let cfg = dynamics.config(seeds);
            let trace = simulate(&g, &cfg)?;
            if let Some(trials) = trials {
                printed = json_bytes(&monte_carlo(&g, &cfg, trials)?);
            }
            write_bytes(&out, &export_trace(&trace, format))?;
        }
        Command::TraceRoot {
            graph,
            infected,
            trials,
            dynamics,
        } => {
            let g: KnowledgeGraph = load_json(&graph)?;
            let infected: BTreeSet<ActorId> = infected.into_iter().collect();
            let ranked: Vec<RankedCandidate> = trace_root(&g, &infected, &dynamics.config([]), trials)?
                .into_iter()
                .map(|(actor, score)| RankedCandidate { actor, score })
                .collect();
            printed = json_bytes(&ranked);
        }
        Command::Export { graph, format } => {
            let g: KnowledgeGraph = load_json(&graph)?;
            printed = export_graph(&g, format);
        }
    }
    Ok(printed)
}

/// Runs the command line with explicit arguments (including the program
/// name) and output streams; returns the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(bytes) => match stdout.write_all(&bytes).and_then(|_| stdout.flush()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(stderr, "error: writing output: {e}");
                EXIT_DATA
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_DATA
        }
    }
}
