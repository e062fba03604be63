//! Canonical experiment presets.
//!
//! Each preset is a fixed pipeline over the library stages: build a
//! synthetic core, optionally randomize or rewire it, relax the transport
//! model to its steady state, and fit the degree laws. All randomness flows
//! from one seed, so a preset run is reproducible bit for bit. Artifacts
//! (edge lists, steady states, curves, and a `metric,value` report) land in
//! the workspace directory; progress is logged as JSON lines on stderr.

use crate::artifacts::{
    log_line, write_binned_csv, write_ccdf_csv, write_report_csv, write_steady_csv,
};
use flownet::graph::{largest_scc, write_edge_list, DirectedGraph};
use flownet::shuffle::{degree_preserving_shuffle, ShuffleConfig};
use flownet::stats::{
    ccdf, conditional_mean_log_binned, edge_degree_correlation, exponent_identity_check,
    fit_tail_exponent, FitMethod, StatsError,
};
use flownet::synth::{
    correlation_rewire, directed_configuration_model, sample_powerlaw_degrees,
    structural_degree_cap, MatchReport, SynthError,
};
use flownet::transport::{
    build_kernel, calibrate_injection, estimate_spectral_radius, run_to_steady, ModelKind,
    SteadyResult, TransportConfig,
};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::path::{Path, PathBuf};

/// Degree-tail exponent used for the synthetic cores.
pub const NETWORK_ALPHA: f64 = 1.3;
/// Minimum degree of the synthetic cores. Two keeps the giant component
/// large enough that trimming to it barely moves the degree tail.
pub const NETWORK_K_MIN: u32 = 2;
/// Top fraction of the state distribution used by the tail fits.
pub const TAIL_FRACTION: f64 = 0.05;
/// Resolution of the conditional-mean curves.
pub const BINS_PER_DECADE: u32 = 5;
/// Bins thinner than this are dropped before fitting the log-log slope.
pub const MIN_OCCUPANCY: usize = 10;
/// Swap attempts per edge for the randomized counterparts.
pub const SHUFFLE_MULTIPLIER: f64 = 10.0;
/// Degree correlation aimed for by the disassortative preset.
pub const CORRELATION_TARGET: f64 = -0.3;
/// Rewiring proposals per edge for the disassortative preset.
pub const REWIRE_BUDGET: f64 = 20.0;
/// Retention per step in the open-mode preset.
pub const OPEN_R: f64 = 0.95;
/// Relative accuracy requested from the injection calibration.
pub const CALIBRATION_TOLERANCE: f64 = 1e-9;

/// A failure in one pipeline stage, tagged with the stage name so the
/// binary can report which stage broke before exiting nonzero.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {} failed: {}", self.stage, self.message)
    }
}

impl std::error::Error for StageError {}

/// Wraps any displayable error with the stage it occurred in.
pub fn fail<E: std::fmt::Display>(stage: &'static str) -> impl FnOnce(E) -> StageError {
    move |e| StageError {
        stage,
        message: e.to_string(),
    }
}

/// The named experiment pipelines exposed by `flownet reproduce`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExperimentKind {
    /// Uniform-split transport on an uncorrelated scale-free core.
    Model1Baseline,
    /// In-degree-biased transport on a degree-preserving shuffle of the core.
    Model2Shuffled,
    /// In-degree-biased transport on a disassortatively rewired core,
    /// contrasted with its shuffled counterpart under both models.
    Model2Corr,
    /// Open-mode dissipative run with the injection calibrated so the
    /// steady state carries a requested total.
    OpenCalibration,
}

impl ExperimentKind {
    /// Kebab-case name, matching the command-line spelling.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Model1Baseline => "model1-baseline",
            ExperimentKind::Model2Shuffled => "model2-shuffled",
            ExperimentKind::Model2Corr => "model2-corr",
            ExperimentKind::OpenCalibration => "open-calibration",
        }
    }
}

/// A fully resolved experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Nodes in the synthetic core before trimming to the giant component.
    pub nodes: usize,
    pub seed: u64,
    /// Directory all artifacts are written into (created if absent).
    pub out_dir: PathBuf,
}

/// Fitted numbers from a preset run, in report-row order.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<(String, f64)>,
}

impl ExperimentReport {
    /// Looks up a metric by name.
    pub fn get(&self, metric: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|(name, _)| name == metric)
            .map(|&(_, value)| value)
    }
}

/// Builds a strongly connected scale-free core with equal in- and
/// out-degrees at every node.
///
/// One capped power-law sequence is sampled and wired as both the in- and
/// the out-degree sequence, so each node re-emits exactly as many edges as
/// it receives. Any weakly connected piece of such a graph is strongly
/// connected, which makes the giant component a closed-mode core without
/// trimming away the degree tail.
pub fn balanced_network(
    nodes: usize,
    alpha: f64,
    k_min: u32,
    seed: u64,
) -> Result<(DirectedGraph, MatchReport), SynthError> {
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let seed_sample = seeder.next_u64();
    let seed_match = seeder.next_u64();
    let cap = structural_degree_cap(nodes).max(k_min);
    let mut degrees = sample_powerlaw_degrees(nodes, alpha, k_min, None, seed_sample)?;
    for d in &mut degrees {
        *d = (*d).min(cap);
    }
    let (matched, report) = directed_configuration_model(&degrees, &degrees, seed_match)?;
    let (core, _) = largest_scc(&matched);
    Ok((core, report))
}

/// Runs one preset end to end, writing artifacts into `spec.out_dir`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, StageError> {
    std::fs::create_dir_all(&spec.out_dir).map_err(fail("setup"))?;
    log_line(
        "reproduce",
        json!({
            "experiment": spec.kind.name(),
            "nodes": spec.nodes,
            "seed": spec.seed,
            "out_dir": spec.out_dir.display().to_string(),
        }),
    );
    let report = match spec.kind {
        ExperimentKind::Model1Baseline => {
            run_degree_law(spec, ModelKind::UniformSplit, Variant::Plain)?
        }
        ExperimentKind::Model2Shuffled => {
            run_degree_law(spec, ModelKind::InDegreeBiased, Variant::Shuffled)?
        }
        ExperimentKind::Model2Corr => run_correlation_contrast(spec)?,
        ExperimentKind::OpenCalibration => run_open_calibration(spec)?,
    };
    write_report_csv(&spec.out_dir.join("report.csv"), &report.rows).map_err(fail("report"))?;
    log_line(
        "report",
        json!({
            "experiment": spec.kind.name(),
            "rows": report.rows.len(),
            "path": spec.out_dir.join("report.csv").display().to_string(),
        }),
    );
    Ok(report)
}

/// Derives the per-stage seeds from the experiment seed.
fn stage_seeds(seed: u64) -> (u64, u64, u64, u64) {
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let synth = seeder.next_u64();
    let shuffle = seeder.next_u64();
    let rewire = seeder.next_u64();
    let spectral = seeder.next_u64();
    (synth, shuffle, rewire, spectral)
}

fn build_core(spec: &ExperimentSpec, synth_seed: u64) -> Result<DirectedGraph, StageError> {
    let (core, matching) =
        balanced_network(spec.nodes, NETWORK_ALPHA, NETWORK_K_MIN, synth_seed)
            .map_err(fail("synth"))?;
    log_line(
        "synth",
        json!({
            "requested_nodes": spec.nodes,
            "core_nodes": core.node_count(),
            "core_edges": core.edge_count(),
            "kept_edges": matching.kept_edges,
            "dropped_pairs": matching.dropped_pairs,
        }),
    );
    write_edge_list(&core, spec.out_dir.join("network.tsv")).map_err(fail("synth"))?;
    Ok(core)
}

fn shuffled_core(
    core: &DirectedGraph,
    shuffle_seed: u64,
    spec: &ExperimentSpec,
) -> Result<DirectedGraph, StageError> {
    let cfg = ShuffleConfig {
        swap_multiplier: SHUFFLE_MULTIPLIER,
        seed: shuffle_seed,
    };
    let (mixed, report) = degree_preserving_shuffle(core, &cfg);
    // A swap sequence can disconnect a weak component, so re-trim before
    // running the closed mode on the result.
    let (trimmed, _) = largest_scc(&mixed);
    log_line(
        "shuffle",
        json!({
            "attempts": report.attempts,
            "accepted": report.accepted,
            "rejected": report.rejected,
            "core_nodes": trimmed.node_count(),
            "core_edges": trimmed.edge_count(),
        }),
    );
    write_edge_list(&trimmed, spec.out_dir.join("network_shuffled.tsv"))
        .map_err(fail("shuffle"))?;
    Ok(trimmed)
}

fn rewired_core(
    core: &DirectedGraph,
    rewire_seed: u64,
    spec: &ExperimentSpec,
) -> Result<DirectedGraph, StageError> {
    let (rewired, report) =
        correlation_rewire(core, CORRELATION_TARGET, REWIRE_BUDGET, rewire_seed);
    let (trimmed, _) = largest_scc(&rewired);
    log_line(
        "rewire",
        json!({
            "target": CORRELATION_TARGET,
            "attempts_used": report.attempts_used,
            "accepted": report.accepted,
            "initial_correlation": report.initial_correlation,
            "final_correlation": report.final_correlation,
            "trimmed_correlation": edge_degree_correlation(&trimmed),
            "core_nodes": trimmed.node_count(),
            "core_edges": trimmed.edge_count(),
        }),
    );
    write_edge_list(&trimmed, spec.out_dir.join("network_rewired.tsv"))
        .map_err(fail("rewire"))?;
    Ok(trimmed)
}

fn solve_closed(g: &DirectedGraph, model: ModelKind) -> Result<SteadyResult, StageError> {
    let kernel = build_kernel(g, model);
    let result = run_to_steady(&kernel, &TransportConfig::closed(model)).map_err(fail("simulate"))?;
    log_line(
        "simulate",
        json!({
            "model": match model { ModelKind::UniformSplit => 1, ModelKind::InDegreeBiased => 2 },
            "mode": "closed",
            "iterations": result.iterations,
            "residual": result.residual,
            "converged": result.converged,
            "total": result.total(),
        }),
    );
    Ok(result)
}

/// Degree-law numbers for one steady state: the log-log slope of the mean
/// state against in-degree, the state's tail exponent, the realized
/// in-degree tail exponent, and the scaling-identity gap between them.
pub struct DegreeLawFit {
    pub slope: f64,
    pub tail_exponent: f64,
    pub alpha_in_realized: f64,
    pub identity_gap: f64,
}

/// Fits the degree law of a steady state on its graph.
pub fn fit_degree_law(g: &DirectedGraph, state: &[f64]) -> Result<DegreeLawFit, StatsError> {
    let k_in: Vec<f64> = (0..g.node_count() as u32).map(|i| g.k_in(i) as f64).collect();
    let binned = conditional_mean_log_binned(&k_in, state, BINS_PER_DECADE, MIN_OCCUPANCY)?;
    let slope = binned
        .log_slope()
        .ok_or_else(|| StatsError::DegenerateFit("conditional-mean slope".into()))?;
    let tail = fit_tail_exponent(state, FitMethod::Hill, TAIL_FRACTION)?;
    let alpha_in = fit_tail_exponent(&k_in, FitMethod::Hill, TAIL_FRACTION)?;
    let identity = exponent_identity_check(alpha_in.exponent, tail.exponent, slope);
    Ok(DegreeLawFit {
        slope,
        tail_exponent: tail.exponent,
        alpha_in_realized: alpha_in.exponent,
        identity_gap: identity.relative_discrepancy,
    })
}

fn write_curves(
    g: &DirectedGraph,
    state: &[f64],
    dir: &Path,
    suffix: &str,
) -> Result<(), StageError> {
    let k_in: Vec<f64> = (0..g.node_count() as u32).map(|i| g.k_in(i) as f64).collect();
    let curve = ccdf(state).map_err(fail("stats"))?;
    write_ccdf_csv(&dir.join(format!("ccdf{suffix}.csv")), &curve).map_err(fail("stats"))?;
    let binned = conditional_mean_log_binned(&k_in, state, BINS_PER_DECADE, MIN_OCCUPANCY)
        .map_err(fail("stats"))?;
    write_binned_csv(&dir.join(format!("condmean{suffix}.csv")), &binned).map_err(fail("stats"))?;
    Ok(())
}

enum Variant {
    Plain,
    Shuffled,
}

fn run_degree_law(
    spec: &ExperimentSpec,
    model: ModelKind,
    variant: Variant,
) -> Result<ExperimentReport, StageError> {
    let (synth_seed, shuffle_seed, _, _) = stage_seeds(spec.seed);
    let core = build_core(spec, synth_seed)?;
    let graph = match variant {
        Variant::Plain => core,
        Variant::Shuffled => shuffled_core(&core, shuffle_seed, spec)?,
    };
    let result = solve_closed(&graph, model)?;
    write_steady_csv(&spec.out_dir.join("steady.csv"), &graph, &result.state)
        .map_err(fail("simulate"))?;
    let law = fit_degree_law(&graph, &result.state).map_err(fail("stats"))?;
    write_curves(&graph, &result.state, &spec.out_dir, "")?;
    log_line(
        "stats",
        json!({
            "slope_x_vs_k_in": law.slope,
            "tail_exponent": law.tail_exponent,
            "alpha_in_realized": law.alpha_in_realized,
            "identity_relative_gap": law.identity_gap,
        }),
    );
    Ok(ExperimentReport {
        rows: vec![
            ("core_nodes".into(), graph.node_count() as f64),
            ("core_edges".into(), graph.edge_count() as f64),
            ("iterations".into(), result.iterations as f64),
            ("residual".into(), result.residual),
            ("slope_x_vs_k_in".into(), law.slope),
            ("tail_exponent".into(), law.tail_exponent),
            ("alpha_in_realized".into(), law.alpha_in_realized),
            ("identity_relative_gap".into(), law.identity_gap),
        ],
    })
}

fn run_correlation_contrast(spec: &ExperimentSpec) -> Result<ExperimentReport, StageError> {
    let (synth_seed, shuffle_seed, rewire_seed, _) = stage_seeds(spec.seed);
    let core = build_core(spec, synth_seed)?;
    let rewired = rewired_core(&core, rewire_seed, spec)?;
    let shuffled = shuffled_core(&core, shuffle_seed, spec)?;

    let mut rows = vec![
        ("rewired_nodes".into(), rewired.node_count() as f64),
        ("rewired_edges".into(), rewired.edge_count() as f64),
        ("shuffled_nodes".into(), shuffled.node_count() as f64),
        ("shuffled_edges".into(), shuffled.edge_count() as f64),
    ];
    if let Some(rho) = edge_degree_correlation(&rewired) {
        rows.push(("rewired_correlation".into(), rho));
    }
    if let Some(rho) = edge_degree_correlation(&shuffled) {
        rows.push(("shuffled_correlation".into(), rho));
    }

    for (model, model_name) in [
        (ModelKind::UniformSplit, "model1"),
        (ModelKind::InDegreeBiased, "model2"),
    ] {
        let mut tails = Vec::new();
        for (graph, variant_name) in [(&rewired, "rewired"), (&shuffled, "shuffled")] {
            let result = solve_closed(graph, model)?;
            let steady_path = spec
                .out_dir
                .join(format!("steady_{model_name}_{variant_name}.csv"));
            write_steady_csv(&steady_path, graph, &result.state).map_err(fail("simulate"))?;
            let law = fit_degree_law(graph, &result.state).map_err(fail("stats"))?;
            write_curves(
                graph,
                &result.state,
                &spec.out_dir,
                &format!("_{model_name}_{variant_name}"),
            )?;
            rows.push((
                format!("{model_name}_tail_{variant_name}"),
                law.tail_exponent,
            ));
            rows.push((format!("{model_name}_slope_{variant_name}"), law.slope));
            tails.push(law.tail_exponent);
        }
        let delta = (tails[0] - tails[1]).abs();
        log_line(
            "stats",
            json!({
                "model": model_name,
                "tail_rewired": tails[0],
                "tail_shuffled": tails[1],
                "tail_delta": delta,
            }),
        );
        rows.push((format!("{model_name}_tail_delta"), delta));
    }
    Ok(ExperimentReport { rows })
}

fn run_open_calibration(spec: &ExperimentSpec) -> Result<ExperimentReport, StageError> {
    let (synth_seed, _, _, spectral_seed) = stage_seeds(spec.seed);
    let core = build_core(spec, synth_seed)?;
    // One unit of throughput per edge is a natural positive scale for the
    // target; any other positive total would calibrate the same way.
    let target = core.edge_count() as f64;
    let model = ModelKind::InDegreeBiased;
    let (injection, result) =
        calibrate_injection(&core, model, OPEN_R, target, CALIBRATION_TOLERANCE)
            .map_err(fail("simulate"))?;
    let total = result.total();
    let kernel = build_kernel(&core, model);
    let spectral = estimate_spectral_radius(&kernel, OPEN_R, 200, spectral_seed);
    write_steady_csv(&spec.out_dir.join("steady.csv"), &core, &result.state)
        .map_err(fail("simulate"))?;
    write_curves(&core, &result.state, &spec.out_dir, "")?;
    log_line(
        "simulate",
        json!({
            "mode": "open",
            "r": OPEN_R,
            "injection": injection,
            "total": total,
            "target": target,
            "iterations": result.iterations,
            "residual": result.residual,
            "spectral_estimate": spectral,
        }),
    );
    Ok(ExperimentReport {
        rows: vec![
            ("core_nodes".into(), core.node_count() as f64),
            ("core_edges".into(), core.edge_count() as f64),
            ("r".into(), OPEN_R),
            ("injection".into(), injection),
            ("target_total".into(), target),
            ("achieved_total".into(), total),
            (
                "calibration_relative_gap".into(),
                (total - target).abs() / target,
            ),
            ("iterations".into(), result.iterations as f64),
            ("residual".into(), result.residual),
            ("spectral_estimate".into(), spectral),
        ],
    })
}
