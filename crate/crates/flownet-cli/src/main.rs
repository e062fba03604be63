//! Command-line front end for the flownet pipeline.
//!
//! Subcommands map one-to-one onto the library stages: `synth`, `lscc`,
//! `shuffle`, `simulate`, `stats`, and `reproduce`. Stages exchange data
//! through files (tab-separated edge lists, headered CSV) so they can be
//! chained from a shell. Progress and reports go to stderr as JSON lines;
//! usage errors exit with 2, stage failures with 1 after naming the stage.

use clap::{Args, Parser, Subcommand, ValueEnum};
use flownet::graph::{largest_scc, load_edge_list, write_edge_list, DirectedGraph, IngestOptions};
use flownet::shuffle::{degree_preserving_shuffle, ShuffleConfig};
use flownet::stats::{
    ccdf, conditional_mean_log_binned, fit_tail_exponent, knn_curve, weighted_neighbor_sums,
    DegreeKind, FitMethod, DEFAULT_BINS_PER_DECADE, DEFAULT_MIN_OCCUPANCY, DEFAULT_TAIL_FRACTION,
};
use flownet::synth::{generate, SynthConfig};
use flownet::transport::{build_kernel, run_to_steady, InitialState, ModelKind, TransportConfig};
use flownet_cli::artifacts::{
    log_line, read_values, write_binned_csv, write_ccdf_csv, write_nbrsums_csv, write_report_csv,
    write_steady_csv,
};
use flownet_cli::experiments::{fail, run_experiment, ExperimentKind, ExperimentSpec, StageError};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "flownet",
    version,
    about = "Transport simulation and degree-law statistics on directed networks"
)]
struct Cli {
    /// Worker threads for the parallel stages. Defaults to the FLOWNET_THREADS
    /// environment variable, then to all available cores. Results do not
    /// depend on the thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scale-free digraph and write its edge list.
    Synth(SynthArgs),
    /// Extract the largest strongly connected component of an edge list.
    Lscc {
        /// Input edge list (tab-separated source/target per line).
        #[arg(long = "in")]
        input: PathBuf,
        /// Output edge list over densely renumbered nodes.
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomize an edge list while preserving every node's degrees.
    Shuffle {
        /// Input edge list.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output edge list.
        #[arg(long)]
        out: PathBuf,
        /// Attempted swaps per edge.
        #[arg(long, default_value_t = 10.0)]
        multiplier: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Relax a transport model to its steady state on a graph.
    Simulate(SimulateArgs),
    /// Distribution and correlation statistics over graphs and value files.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Run a named end-to-end experiment preset.
    Reproduce {
        /// Which preset to run.
        #[arg(long, value_enum)]
        experiment: ExperimentKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Nodes in the synthetic core.
        #[arg(long, default_value_t = 100_000)]
        nodes: usize,
        /// Parent directory for artifacts; the run writes into
        /// <out-dir>/<experiment>-seed<seed>/.
        #[arg(long, default_value = "runs")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    nodes: usize,
    /// Tail exponent of the in-degree distribution.
    #[arg(long, default_value_t = 1.3)]
    alpha_in: f64,
    /// Tail exponent of the out-degree distribution.
    #[arg(long, default_value_t = 1.3)]
    alpha_out: f64,
    #[arg(long, default_value_t = 1)]
    k_min: u32,
    /// Edge-wise degree correlation to rewire toward (0 skips rewiring).
    #[arg(long, default_value_t = 0.0)]
    correlation_target: f64,
    /// Rewiring proposals per edge.
    #[arg(long, default_value_t = 10.0)]
    rewire_budget: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output edge list.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Closed,
    Open,
}

#[derive(Args)]
struct SimulateArgs {
    /// Transport model: 1 splits uniformly over out-neighbors, 2 biases by
    /// the destination's in-degree.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    model: u8,
    /// Closed conserves the initial total on a strongly connected graph;
    /// open applies retention r plus injection f at every node.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Retention per step (open mode only).
    #[arg(long, default_value_t = 0.95)]
    r: f64,
    /// Injection per node per step (open mode only).
    #[arg(long, default_value_t = 1.0)]
    f: f64,
    /// Relative change per step below which the state counts as steady.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: u64,
    /// Initial state: "uniform:<c>" or "file:<path>" with one value per line.
    #[arg(long, default_value = "uniform:1")]
    init: String,
    /// Input edge list.
    #[arg(long)]
    graph: PathBuf,
    /// Output CSV (node_id,x_steady).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DegreeArg {
    Total,
    In,
    Out,
}

impl From<DegreeArg> for DegreeKind {
    fn from(arg: DegreeArg) -> DegreeKind {
        match arg {
            DegreeArg::Total => DegreeKind::Total,
            DegreeArg::In => DegreeKind::In,
            DegreeArg::Out => DegreeKind::Out,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Hill,
    Rank,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Complementary cumulative distribution of a value file.
    Ccdf {
        /// Value file: bare numbers or the last column of a headered CSV.
        #[arg(long)]
        values: PathBuf,
        /// Output CSV (value,ccdf).
        #[arg(long)]
        out: PathBuf,
    },
    /// Power-law tail exponent of a value file.
    Fit {
        #[arg(long)]
        values: PathBuf,
        /// Estimator: hill (maximum likelihood) or rank (log-log regression).
        #[arg(long, value_enum, default_value_t = MethodArg::Hill)]
        method: MethodArg,
        /// Top fraction of the sample treated as the tail.
        #[arg(long, default_value_t = DEFAULT_TAIL_FRACTION)]
        tail_fraction: f64,
        /// Output CSV (metric,value).
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean neighbor degree as a function of node degree.
    Knn {
        /// Input edge list.
        #[arg(long)]
        graph: PathBuf,
        /// Which degree to bin nodes by.
        #[arg(long, value_enum, default_value_t = DegreeArg::Total)]
        degree: DegreeArg,
        /// Output CSV (bin_center,mean,count,p05,p95,mode).
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean of a per-node value as a function of node degree, log-binned.
    Condmean {
        #[arg(long)]
        graph: PathBuf,
        /// Per-node values aligned with the graph's dense node ids.
        #[arg(long)]
        values: PathBuf,
        #[arg(long, value_enum, default_value_t = DegreeArg::In)]
        degree: DegreeArg,
        #[arg(long, default_value_t = DEFAULT_BINS_PER_DECADE)]
        bins_per_decade: u32,
        #[arg(long, default_value_t = DEFAULT_MIN_OCCUPANCY)]
        min_occupancy: usize,
        /// Output CSV (bin_center,mean,count,p05,p95,mode).
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-node weighted sums of a value over out-neighbors.
    Nbrsums {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        values: PathBuf,
        /// Output CSV (node_id,s1,s2).
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = init_threads(cli.threads) {
        // Invalid thread settings are usage errors, same as bad flags.
        eprintln!("error: {message}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Synth(args) => run_synth(args),
        Command::Lscc { input, out } => run_lscc(input, out),
        Command::Shuffle {
            input,
            out,
            multiplier,
            seed,
        } => run_shuffle(input, out, multiplier, seed),
        Command::Simulate(args) => run_simulate(args),
        Command::Stats(command) => run_stats(command),
        Command::Reproduce {
            experiment,
            seed,
            nodes,
            out_dir,
        } => {
            let spec = ExperimentSpec {
                kind: experiment,
                nodes,
                seed,
                out_dir: out_dir.join(format!("{}-seed{seed}", experiment.name())),
            };
            run_experiment(&spec).map(|_| ())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log_line(e.stage, json!({ "error": e.message }));
            ExitCode::from(1)
        }
    }
}

/// Sizes the global worker pool from the flag or FLOWNET_THREADS.
fn init_threads(flag: Option<usize>) -> Result<(), String> {
    let threads = match flag {
        Some(n) => Some(n),
        None => match std::env::var("FLOWNET_THREADS") {
            Ok(raw) => Some(
                raw.parse::<usize>()
                    .map_err(|_| format!("FLOWNET_THREADS must be a number, got {raw:?}"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err("thread count must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn load_graph(path: &PathBuf, stage: &'static str) -> Result<DirectedGraph, StageError> {
    let (graph, report) = load_edge_list(path, &IngestOptions::default()).map_err(fail(stage))?;
    log_line(
        stage,
        json!({
            "input": path.display().to_string(),
            "nodes": graph.node_count(),
            "edges": graph.edge_count(),
            "lines_read": report.lines_read,
            "self_loops_dropped": report.self_loops_dropped,
            "duplicates_dropped": report.duplicates_dropped,
        }),
    );
    Ok(graph)
}

fn run_synth(args: SynthArgs) -> Result<(), StageError> {
    let cfg = SynthConfig {
        node_count: args.nodes,
        alpha_in: args.alpha_in,
        alpha_out: args.alpha_out,
        k_min: args.k_min,
        correlation_target: args.correlation_target,
        seed: args.seed,
        rewire_budget: args.rewire_budget,
    };
    let (graph, report) = generate(&cfg).map_err(fail("synth"))?;
    write_edge_list(&graph, &args.out).map_err(fail("synth"))?;
    log_line(
        "synth",
        json!({
            "nodes": graph.node_count(),
            "edges": graph.edge_count(),
            "requested_edges": report.requested_edges,
            "kept_edges": report.matching.kept_edges,
            "dropped_pairs": report.matching.dropped_pairs,
            "mismatched_nodes": report.matching.mismatched_nodes,
            "rewire_accepted": report.rewire.accepted,
            "initial_correlation": report.rewire.initial_correlation,
            "final_correlation": report.rewire.final_correlation,
            "out": args.out.display().to_string(),
        }),
    );
    Ok(())
}

fn run_lscc(input: PathBuf, out: PathBuf) -> Result<(), StageError> {
    let graph = load_graph(&input, "lscc")?;
    let (core, _) = largest_scc(&graph);
    write_edge_list(&core, &out).map_err(fail("lscc"))?;
    log_line(
        "lscc",
        json!({
            "nodes_in": graph.node_count(),
            "edges_in": graph.edge_count(),
            "nodes_out": core.node_count(),
            "edges_out": core.edge_count(),
            "out": out.display().to_string(),
        }),
    );
    Ok(())
}

fn run_shuffle(input: PathBuf, out: PathBuf, multiplier: f64, seed: u64) -> Result<(), StageError> {
    if !(multiplier.is_finite() && multiplier > 0.0) {
        return Err(StageError {
            stage: "shuffle",
            message: format!("multiplier must be positive, got {multiplier}"),
        });
    }
    let graph = load_graph(&input, "shuffle")?;
    let cfg = ShuffleConfig {
        swap_multiplier: multiplier,
        seed,
    };
    let (mixed, report) = degree_preserving_shuffle(&graph, &cfg);
    write_edge_list(&mixed, &out).map_err(fail("shuffle"))?;
    log_line(
        "shuffle",
        json!({
            "attempts": report.attempts,
            "accepted": report.accepted,
            "rejected": report.rejected,
            "out": out.display().to_string(),
        }),
    );
    Ok(())
}

fn parse_init(raw: &str, nodes: usize) -> Result<InitialState, StageError> {
    if let Some(c) = raw.strip_prefix("uniform:") {
        let value: f64 = c.parse().map_err(|_| StageError {
            stage: "simulate",
            message: format!("init constant must be a number, got {c:?}"),
        })?;
        return Ok(InitialState::Uniform(value));
    }
    if let Some(path) = raw.strip_prefix("file:") {
        let values = read_values(&PathBuf::from(path)).map_err(fail("simulate"))?;
        if values.len() != nodes {
            return Err(StageError {
                stage: "simulate",
                message: format!(
                    "init file has {} values but the graph has {nodes} nodes",
                    values.len()
                ),
            });
        }
        return Ok(InitialState::Custom(values));
    }
    Err(StageError {
        stage: "simulate",
        message: format!("init must be uniform:<c> or file:<path>, got {raw:?}"),
    })
}

fn run_simulate(args: SimulateArgs) -> Result<(), StageError> {
    let graph = load_graph(&args.graph, "simulate")?;
    let model = match args.model {
        1 => ModelKind::UniformSplit,
        _ => ModelKind::InDegreeBiased,
    };
    let mut cfg = match args.mode {
        ModeArg::Closed => TransportConfig::closed(model),
        ModeArg::Open => TransportConfig::open(model, args.r, args.f),
    };
    cfg.tolerance = args.tol;
    cfg.max_iters = args.max_iters;
    cfg.initial = parse_init(&args.init, graph.node_count())?;
    let kernel = build_kernel(&graph, model);
    let result = run_to_steady(&kernel, &cfg).map_err(fail("simulate"))?;
    write_steady_csv(&args.out, &graph, &result.state).map_err(fail("simulate"))?;
    log_line(
        "simulate",
        json!({
            "model": args.model,
            "mode": match args.mode { ModeArg::Closed => "closed", ModeArg::Open => "open" },
            "iterations": result.iterations,
            "last_change": result.last_change,
            "residual": result.residual,
            "converged": result.converged,
            "total": result.total(),
            "out": args.out.display().to_string(),
        }),
    );
    Ok(())
}

fn run_stats(command: StatsCommand) -> Result<(), StageError> {
    match command {
        StatsCommand::Ccdf { values, out } => {
            let sample = read_values(&values).map_err(fail("stats"))?;
            let curve = ccdf(&sample).map_err(fail("stats"))?;
            write_ccdf_csv(&out, &curve).map_err(fail("stats"))?;
            log_line(
                "stats",
                json!({
                    "mode": "ccdf",
                    "samples": sample.len(),
                    "distinct_values": curve.len(),
                    "out": out.display().to_string(),
                }),
            );
        }
        StatsCommand::Fit {
            values,
            method,
            tail_fraction,
            out,
        } => {
            let sample = read_values(&values).map_err(fail("stats"))?;
            let method = match method {
                MethodArg::Hill => FitMethod::Hill,
                MethodArg::Rank => FitMethod::RankRegression,
            };
            let fit = fit_tail_exponent(&sample, method, tail_fraction).map_err(fail("stats"))?;
            write_report_csv(
                &out,
                &[
                    ("exponent".into(), fit.exponent),
                    ("tail_fraction".into(), fit.tail_fraction),
                    ("x_min".into(), fit.x_min),
                    ("tail_count".into(), fit.tail_count as f64),
                ],
            )
            .map_err(fail("stats"))?;
            log_line(
                "stats",
                json!({
                    "mode": "fit",
                    "exponent": fit.exponent,
                    "x_min": fit.x_min,
                    "tail_count": fit.tail_count,
                    "out": out.display().to_string(),
                }),
            );
        }
        StatsCommand::Knn { graph, degree, out } => {
            let g = load_graph(&graph, "stats")?;
            let curve = knn_curve(&g, degree.into()).map_err(fail("stats"))?;
            write_binned_csv(&out, &curve).map_err(fail("stats"))?;
            log_line(
                "stats",
                json!({
                    "mode": "knn",
                    "bins": curve.bins.len(),
                    "out": out.display().to_string(),
                }),
            );
        }
        StatsCommand::Condmean {
            graph,
            values,
            degree,
            bins_per_decade,
            min_occupancy,
            out,
        } => {
            let g = load_graph(&graph, "stats")?;
            let sample = read_values(&values).map_err(fail("stats"))?;
            if sample.len() != g.node_count() {
                return Err(StageError {
                    stage: "stats",
                    message: format!(
                        "value file has {} entries but the graph has {} nodes",
                        sample.len(),
                        g.node_count()
                    ),
                });
            }
            let axis: Vec<f64> = (0..g.node_count() as u32)
                .map(|i| match degree {
                    DegreeArg::Total => (g.k_in(i) + g.k_out(i)) as f64,
                    DegreeArg::In => g.k_in(i) as f64,
                    DegreeArg::Out => g.k_out(i) as f64,
                })
                .collect();
            let binned = conditional_mean_log_binned(&axis, &sample, bins_per_decade, min_occupancy)
                .map_err(fail("stats"))?;
            write_binned_csv(&out, &binned).map_err(fail("stats"))?;
            log_line(
                "stats",
                json!({
                    "mode": "condmean",
                    "bins": binned.bins.len(),
                    "log_slope": binned.log_slope(),
                    "out": out.display().to_string(),
                }),
            );
        }
        StatsCommand::Nbrsums { graph, values, out } => {
            let g = load_graph(&graph, "stats")?;
            let sample = read_values(&values).map_err(fail("stats"))?;
            if sample.len() != g.node_count() {
                return Err(StageError {
                    stage: "stats",
                    message: format!(
                        "value file has {} entries but the graph has {} nodes",
                        sample.len(),
                        g.node_count()
                    ),
                });
            }
            let (s1, s2) = weighted_neighbor_sums(&g, &sample);
            write_nbrsums_csv(&out, &g, &s1, &s2).map_err(fail("stats"))?;
            log_line(
                "stats",
                json!({
                    "mode": "nbrsums",
                    "nodes": g.node_count(),
                    "out": out.display().to_string(),
                }),
            );
        }
    }
    Ok(())
}
