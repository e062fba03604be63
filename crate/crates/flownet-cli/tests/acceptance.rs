//! Acceptance suite: one test per release criterion, each printing a PASS
//! line with the measured numbers when it holds.
//!
//! The small-graph tests check the iterative solver, the spectral probe,
//! and the calibration against dense linear algebra on random instances.
//! The large-graph tests build a balanced scale-free core (equal in- and
//! out-degrees at every node, so the giant component is strongly connected
//! by construction) and verify the degree laws of both transport models,
//! their sensitivity to degree correlations, and the throughput needed for
//! realistic network sizes. Every tolerance is pinned here as a named
//! constant next to the test that enforces it.

use flownet::graph::{largest_scc, DirectedGraph};
use flownet::shuffle::{degree_preserving_shuffle, ShuffleConfig};
use flownet::stats::{
    edge_degree_correlation, fit_tail_exponent, weighted_neighbor_sums, FitMethod,
};
use flownet::synth::{
    directed_configuration_model, generate, sample_powerlaw_degrees, SynthConfig,
};
use flownet::transport::{
    build_kernel, calibrate_injection, estimate_spectral_radius, run_to_steady, step,
    InitialState, ModelKind, TransportConfig,
};
use flownet_cli::experiments::{
    balanced_network, fit_degree_law, DegreeLawFit, CORRELATION_TARGET, NETWORK_ALPHA,
    NETWORK_K_MIN, REWIRE_BUDGET, SHUFFLE_MULTIPLIER,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::sync::LazyLock;
use std::time::Instant;

// ---------------------------------------------------------------------------
// Shared fixtures and helpers
// ---------------------------------------------------------------------------

/// Nodes in the shared large core before trimming to the giant component.
const FIXTURE_NODES: usize = 100_000;
const FIXTURE_SEED: u64 = 7;

struct Fixture {
    graph: DirectedGraph,
    m1: DegreeLawFit,
    m2: DegreeLawFit,
}

/// Solves the closed steady state and fits its degree law.
fn solve_and_fit(graph: &DirectedGraph, model: ModelKind) -> DegreeLawFit {
    let kernel = build_kernel(graph, model);
    let result = run_to_steady(&kernel, &TransportConfig::closed(model)).unwrap();
    assert!(result.converged, "steady-state iteration must converge");
    fit_degree_law(graph, &result.state).unwrap()
}

static FIXTURE: LazyLock<Fixture> = LazyLock::new(|| {
    let (graph, _) =
        balanced_network(FIXTURE_NODES, NETWORK_ALPHA, NETWORK_K_MIN, FIXTURE_SEED).unwrap();
    assert!(graph.node_count() > FIXTURE_NODES / 2, "giant component too small");
    let m1 = solve_and_fit(&graph, ModelKind::UniformSplit);
    let m2 = solve_and_fit(&graph, ModelKind::InDegreeBiased);
    Fixture { graph, m1, m2 }
});

struct Contrast {
    rewired_rho: f64,
    shuffled_rho: f64,
    m1_rewired: DegreeLawFit,
    m1_shuffled: DegreeLawFit,
    m2_rewired: DegreeLawFit,
    m2_shuffled: DegreeLawFit,
}

static CONTRAST: LazyLock<Contrast> = LazyLock::new(|| {
    let base = &FIXTURE.graph;
    let (rewired, _) =
        flownet::synth::correlation_rewire(base, CORRELATION_TARGET, REWIRE_BUDGET, 1303);
    let (rewired, _) = largest_scc(&rewired);
    let (shuffled, _) = degree_preserving_shuffle(
        base,
        &ShuffleConfig {
            swap_multiplier: SHUFFLE_MULTIPLIER,
            seed: 1304,
        },
    );
    let (shuffled, _) = largest_scc(&shuffled);
    Contrast {
        rewired_rho: edge_degree_correlation(&rewired).unwrap(),
        shuffled_rho: edge_degree_correlation(&shuffled).unwrap(),
        m1_rewired: solve_and_fit(&rewired, ModelKind::UniformSplit),
        m1_shuffled: solve_and_fit(&shuffled, ModelKind::UniformSplit),
        m2_rewired: solve_and_fit(&rewired, ModelKind::InDegreeBiased),
        m2_shuffled: solve_and_fit(&shuffled, ModelKind::InDegreeBiased),
    }
});

/// Largest relative deviation, normalized by the largest expected entry.
fn rel_linf(actual: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(actual.len(), expected.len());
    let scale = expected
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    actual
        .iter()
        .zip(expected)
        .fold(0.0f64, |m, (a, e)| m.max((a - e).abs()))
        / scale
}

/// Random simple digraph with up to `max_n` nodes and a sparse edge set.
fn random_digraph(rng: &mut ChaCha8Rng, max_n: usize) -> DirectedGraph {
    let n = rng.random_range(2..=max_n);
    let m = rng.random_range(1..=(n * (n - 1)).min(3 * n));
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    while edges.len() < m {
        let s = rng.random_range(0..n as u32);
        let t = rng.random_range(0..n as u32);
        if s != t && seen.insert((s, t)) {
            edges.push((s, t));
        }
    }
    DirectedGraph::from_edges(n, &edges)
}

/// Strongly connected core of a random digraph, retried until nontrivial.
fn random_scc(rng: &mut ChaCha8Rng, max_n: usize) -> DirectedGraph {
    loop {
        let (core, _) = largest_scc(&random_digraph(rng, max_n));
        if core.node_count() >= 2 {
            return core;
        }
    }
}

/// Column-stochastic transition matrix built straight from the model
/// definition, independently of the library kernel.
fn dense_kernel(g: &DirectedGraph, model: ModelKind) -> DMatrix<f64> {
    let n = g.node_count();
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n as u32 {
        let outs = g.out_neighbors(i);
        if outs.is_empty() {
            continue;
        }
        match model {
            ModelKind::UniformSplit => {
                let w = 1.0 / outs.len() as f64;
                for &m in outs {
                    b[(m as usize, i as usize)] += w;
                }
            }
            ModelKind::InDegreeBiased => {
                let d: f64 = outs.iter().map(|&j| g.k_in(j) as f64).sum();
                for &m in outs {
                    b[(m as usize, i as usize)] += g.k_in(m) as f64 / d;
                }
            }
        }
    }
    b
}

/// Closed steady state by direct linear solve: (B - I)x = 0 with the first
/// row replaced by the normalization sum(x) = total.
fn dense_closed(g: &DirectedGraph, model: ModelKind, total: f64) -> Vec<f64> {
    let n = g.node_count();
    let mut a = dense_kernel(g, model) - DMatrix::<f64>::identity(n, n);
    let mut rhs = DVector::zeros(n);
    for col in 0..n {
        a[(0, col)] = 1.0;
    }
    rhs[0] = total;
    a.lu().solve(&rhs).expect("closed system is nonsingular").as_slice().to_vec()
}

/// Open steady state by direct linear solve: (I - rB)x = f.
fn dense_open(g: &DirectedGraph, model: ModelKind, r: f64, f: f64) -> Vec<f64> {
    let n = g.node_count();
    let a = DMatrix::<f64>::identity(n, n) - dense_kernel(g, model) * r;
    let rhs = DVector::from_element(n, f);
    a.lu().solve(&rhs).expect("open system is nonsingular").as_slice().to_vec()
}

const BOTH_MODELS: [ModelKind; 2] = [ModelKind::UniformSplit, ModelKind::InDegreeBiased];

// ---------------------------------------------------------------------------
// Small-graph equivalence with dense linear algebra
// ---------------------------------------------------------------------------

/// Largest relative deviation tolerated against the dense reference.
const ORACLE_REL: f64 = 1e-8;
/// Instances checked per mode (split evenly between the two models).
const ORACLE_INSTANCES: usize = 120;

#[test]
fn a01_small_graphs_match_dense_linear_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);

    let mut closed = 0;
    let mut worst_closed = 0.0f64;
    let mut attempts = 0;
    while closed < ORACLE_INSTANCES {
        attempts += 1;
        assert!(attempts < 10 * ORACLE_INSTANCES, "too many periodic cores");
        let model = BOTH_MODELS[attempts % 2];
        let g = random_scc(&mut rng, 50);
        let kernel = build_kernel(&g, model);
        let mut cfg = TransportConfig::closed(model);
        cfg.tolerance = 1e-12;
        cfg.max_iters = 500_000;
        let result = run_to_steady(&kernel, &cfg).unwrap();
        if !result.converged {
            continue; // periodic core; the iteration has no limit there
        }
        let expected = dense_closed(&g, model, g.node_count() as f64);
        let err = rel_linf(&result.state, &expected);
        assert!(err <= ORACLE_REL, "closed deviation {err} on {} nodes", g.node_count());
        worst_closed = worst_closed.max(err);
        closed += 1;
    }

    let mut open = 0;
    let mut worst_open = 0.0f64;
    let settings = [(0.5, 1.0), (0.9, 0.5), (0.95, 2.0)];
    while open < ORACLE_INSTANCES {
        let model = BOTH_MODELS[open % 2];
        let (r, f) = settings[open % settings.len()];
        let g = random_digraph(&mut rng, 50);
        let kernel = build_kernel(&g, model);
        let mut cfg = TransportConfig::open(model, r, f);
        cfg.tolerance = 1e-12;
        cfg.max_iters = 500_000;
        let result = run_to_steady(&kernel, &cfg).unwrap();
        assert!(result.converged);
        let expected = dense_open(&g, model, r, f);
        let err = rel_linf(&result.state, &expected);
        assert!(err <= ORACLE_REL, "open deviation {err} on {} nodes", g.node_count());
        worst_open = worst_open.max(err);
        open += 1;
    }

    println!(
        "PASS dense-oracle equivalence: {closed} closed and {open} open instances, \
         worst deviations {worst_closed:.2e} / {worst_open:.2e} (bound {ORACLE_REL:.0e})"
    );
}

// ---------------------------------------------------------------------------
// Conservation and uniqueness of the closed mode
// ---------------------------------------------------------------------------

/// Relative drift of the conserved total allowed over the long run.
const DRIFT_REL: f64 = 1e-9;
const DRIFT_STEPS: usize = 10_000;
/// Agreement required between steady states from different initializations.
const UNIQUENESS_REL: f64 = 1e-6;

#[test]
fn a02_closed_mode_conserves_mass_and_forgets_its_initialization() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_drift = 0.0f64;
    let mut worst_gap = 0.0f64;
    let mut compared = 0;
    for case in 0..12 {
        let model = BOTH_MODELS[case % 2];
        let g = random_scc(&mut rng, 50);
        let kernel = build_kernel(&g, model);
        let n = g.node_count();

        let mut state: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.1).collect();
        let total0: f64 = state.iter().sum();
        for _ in 0..DRIFT_STEPS {
            state = step(&kernel, &state, 1.0, 0.0).unwrap();
        }
        let total1: f64 = state.iter().sum();
        let drift = (total1 - total0).abs() / total0;
        assert!(drift < DRIFT_REL, "drift {drift} after {DRIFT_STEPS} steps");
        worst_drift = worst_drift.max(drift);

        // Two random starts with the same total must meet at the same point.
        let mut starts = Vec::new();
        for _ in 0..2 {
            let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.1).collect();
            let sum: f64 = raw.iter().sum();
            starts.push(raw.into_iter().map(|v| v * n as f64 / sum).collect::<Vec<f64>>());
        }
        let mut solved = Vec::new();
        for start in starts {
            let mut cfg = TransportConfig::closed(model);
            cfg.tolerance = 1e-12;
            cfg.max_iters = 500_000;
            cfg.initial = InitialState::Custom(start);
            let result = run_to_steady(&kernel, &cfg).unwrap();
            if result.converged {
                solved.push(result.state);
            }
        }
        if solved.len() == 2 {
            let gap = rel_linf(&solved[0], &solved[1]);
            assert!(gap <= UNIQUENESS_REL, "initialization gap {gap}");
            worst_gap = worst_gap.max(gap);
            compared += 1;
        }
    }
    assert!(compared >= 8, "only {compared} instances converged from both starts");
    println!(
        "PASS conservation and uniqueness: worst drift {worst_drift:.2e} over {DRIFT_STEPS} \
         steps (bound {DRIFT_REL:.0e}), worst initialization gap {worst_gap:.2e} on \
         {compared} instances (bound {UNIQUENESS_REL:.0e})"
    );
}

// ---------------------------------------------------------------------------
// Degree laws of the two models on the large uncorrelated core
// ---------------------------------------------------------------------------

const M1_SLOPE_BAND: (f64, f64) = (0.9, 1.1);
const M1_TAIL_BAND: (f64, f64) = (1.15, 1.45);
const M2_SLOPE_BAND: (f64, f64) = (1.7, 2.3);
const M2_TAIL_BAND: (f64, f64) = (0.55, 0.75);
/// Largest relative gap tolerated by the exponent scaling identity.
const IDENTITY_MAX_GAP: f64 = 0.15;

#[test]
fn a03_uniform_split_state_is_linear_in_degree_with_the_degree_tail() {
    let law = &FIXTURE.m1;
    assert!(
        law.slope > M1_SLOPE_BAND.0 && law.slope < M1_SLOPE_BAND.1,
        "slope {} outside {M1_SLOPE_BAND:?}",
        law.slope
    );
    assert!(
        law.tail_exponent > M1_TAIL_BAND.0 && law.tail_exponent < M1_TAIL_BAND.1,
        "tail exponent {} outside {M1_TAIL_BAND:?}",
        law.tail_exponent
    );
    println!(
        "PASS uniform-split degree law: slope {:.4} in {M1_SLOPE_BAND:?}, tail exponent \
         {:.4} in {M1_TAIL_BAND:?} ({} nodes, {} edges)",
        law.slope,
        law.tail_exponent,
        FIXTURE.graph.node_count(),
        FIXTURE.graph.edge_count()
    );
}

#[test]
fn a04_biased_state_grows_quadratically_and_halves_the_tail_exponent() {
    let law = &FIXTURE.m2;
    assert!(
        law.slope > M2_SLOPE_BAND.0 && law.slope < M2_SLOPE_BAND.1,
        "slope {} outside {M2_SLOPE_BAND:?}",
        law.slope
    );
    assert!(
        law.tail_exponent > M2_TAIL_BAND.0 && law.tail_exponent < M2_TAIL_BAND.1,
        "tail exponent {} outside {M2_TAIL_BAND:?}",
        law.tail_exponent
    );
    println!(
        "PASS in-degree-biased degree law: slope {:.4} in {M2_SLOPE_BAND:?}, tail exponent \
         {:.4} in {M2_TAIL_BAND:?}",
        law.slope, law.tail_exponent
    );
}

#[test]
fn a05_measured_exponents_satisfy_the_scaling_identity() {
    for (name, law) in [("uniform-split", &FIXTURE.m1), ("in-degree-biased", &FIXTURE.m2)] {
        assert!(
            law.identity_gap <= IDENTITY_MAX_GAP,
            "{name} identity gap {} exceeds {IDENTITY_MAX_GAP}",
            law.identity_gap
        );
    }
    println!(
        "PASS scaling identity: relative gaps {:.4} (uniform-split) and {:.4} \
         (in-degree-biased), bound {IDENTITY_MAX_GAP}",
        FIXTURE.m1.identity_gap, FIXTURE.m2.identity_gap
    );
}

// ---------------------------------------------------------------------------
// Sensitivity to degree correlations
// ---------------------------------------------------------------------------

/// The biased model must move at least this much between the disassortative
/// core and its shuffled counterpart.
const M2_MIN_DELTA: f64 = 0.15;
/// The uniform model must stay within this band across the same pair.
const M1_MAX_DELTA: f64 = 0.1;

#[test]
fn a06_only_the_biased_model_reacts_to_degree_correlations() {
    let c = &CONTRAST;
    let m2_delta = (c.m2_rewired.tail_exponent - c.m2_shuffled.tail_exponent).abs();
    let m1_delta = (c.m1_rewired.tail_exponent - c.m1_shuffled.tail_exponent).abs();
    assert!(
        c.rewired_rho < -0.15,
        "rewiring should leave a clearly negative correlation, got {}",
        c.rewired_rho
    );
    assert!(
        m2_delta >= M2_MIN_DELTA,
        "biased-model tail moved only {m2_delta} between correlation {} and {}",
        c.rewired_rho,
        c.shuffled_rho
    );
    assert!(
        m1_delta < M1_MAX_DELTA,
        "uniform-model tail moved {m1_delta}, expected insensitivity"
    );
    println!(
        "PASS correlation sensitivity: biased tail {:.4} -> {:.4} (delta {m2_delta:.4} >= \
         {M2_MIN_DELTA}) across correlations {:.3} -> {:.3}; uniform tail delta {m1_delta:.4} \
         < {M1_MAX_DELTA}",
        c.m2_rewired.tail_exponent,
        c.m2_shuffled.tail_exponent,
        c.rewired_rho,
        c.shuffled_rho
    );
}

// ---------------------------------------------------------------------------
// Spectral safety of the open mode
// ---------------------------------------------------------------------------

const OPEN_R: f64 = 0.95;
/// Deviation allowed from r on strongly connected graphs.
const SPECTRAL_TOL: f64 = 1e-6;

#[test]
fn a07_open_mode_spectral_radius_stays_below_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst_general = 0.0f64;
    for case in 0..40 {
        let model = BOTH_MODELS[case % 2];
        let g = random_digraph(&mut rng, 60);
        let kernel = build_kernel(&g, model);
        let estimate = estimate_spectral_radius(&kernel, OPEN_R, 300, 707 + case as u64);
        assert!(estimate < 1.0, "estimate {estimate} on a general digraph");
        worst_general = worst_general.max(estimate);
    }
    let mut worst_gap = 0.0f64;
    for case in 0..25 {
        let model = BOTH_MODELS[case % 2];
        let g = random_scc(&mut rng, 60);
        let kernel = build_kernel(&g, model);
        let estimate = estimate_spectral_radius(&kernel, OPEN_R, 300, 1707 + case as u64);
        let gap = (estimate - OPEN_R).abs();
        assert!(gap <= SPECTRAL_TOL, "estimate {estimate} off r={OPEN_R}");
        worst_gap = worst_gap.max(gap);
    }
    println!(
        "PASS spectral safety: 40 general digraphs all below one (max {worst_general:.4}), \
         25 strongly connected cores within {worst_gap:.2e} of r={OPEN_R}"
    );
}

// ---------------------------------------------------------------------------
// Injection calibration
// ---------------------------------------------------------------------------

/// Relative error allowed between the calibrated total and its target.
const CALIBRATION_REL: f64 = 1e-6;

#[test]
fn a08_calibrated_injection_hits_the_requested_total() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let targets = [1.0, 350.0, 1e6];
    let mut worst = 0.0f64;
    for case in 0..30 {
        let model = BOTH_MODELS[case % 2];
        let target = targets[case % targets.len()];
        let g = random_digraph(&mut rng, 50);
        let (injection, result) =
            calibrate_injection(&g, model, OPEN_R, target, 1e-9).unwrap();
        assert!(injection > 0.0);
        let gap = (result.total() - target).abs() / target;
        assert!(gap <= CALIBRATION_REL, "calibration gap {gap} for target {target}");
        worst = worst.max(gap);
    }
    // The same contract must hold at realistic scale.
    let target = 1e6;
    let (_, result) =
        calibrate_injection(&FIXTURE.graph, ModelKind::InDegreeBiased, OPEN_R, target, 1e-9)
            .unwrap();
    let gap = (result.total() - target).abs() / target;
    assert!(gap <= CALIBRATION_REL, "large-core calibration gap {gap}");
    worst = worst.max(gap);
    println!(
        "PASS injection calibration: 30 small instances plus the large core within \
         {worst:.2e} of their targets (bound {CALIBRATION_REL:.0e})"
    );
}

// ---------------------------------------------------------------------------
// Fixed-point identities of the steady states
// ---------------------------------------------------------------------------

/// Defect allowed at each node, relative to that node's own state value.
const FIXED_POINT_REL: f64 = 1e-10;

#[test]
fn a09_steady_states_satisfy_their_fixed_point_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for case in 0..12 {
        let model = BOTH_MODELS[case % 2];
        let g = random_scc(&mut rng, 50);
        let kernel = build_kernel(&g, model);
        let mut cfg = TransportConfig::closed(model);
        // Solve well past the bound under test so iteration error cannot
        // masquerade as an identity violation.
        cfg.tolerance = 1e-13;
        cfg.max_iters = 1_000_000;
        let result = run_to_steady(&kernel, &cfg).unwrap();
        if !result.converged {
            continue;
        }
        let (s1, s2) = weighted_neighbor_sums(&g, &result.state);
        let image = match model {
            ModelKind::UniformSplit => &s1,
            ModelKind::InDegreeBiased => &s2,
        };
        // Steady states on a strongly connected core are strictly positive,
        // so the per-node relative defect is well defined.
        let defect = image
            .iter()
            .zip(&result.state)
            .fold(0.0f64, |m, (a, x)| m.max((a - x).abs() / x));
        assert!(defect <= FIXED_POINT_REL, "fixed-point defect {defect}");
        worst = worst.max(defect);
        checked += 1;
    }
    assert!(checked >= 8, "only {checked} instances converged");
    println!(
        "PASS fixed-point identities: {checked} instances with worst per-node relative \
         defect {worst:.2e} (bound {FIXED_POINT_REL:.0e})"
    );
}

// ---------------------------------------------------------------------------
// Degree preservation and decorrelation at the million-edge scale
// ---------------------------------------------------------------------------

/// Residual degree correlation allowed after shuffling.
const DECORRELATED_MAX: f64 = 0.05;

#[test]
fn a10_shuffling_preserves_degrees_and_removes_correlations_at_scale() {
    // Two differently wired million-edge graphs: one pushed clearly
    // disassortative, one left at the configuration-model baseline.
    let configs = [
        SynthConfig {
            node_count: 200_000,
            alpha_in: 1.3,
            alpha_out: 1.3,
            k_min: 3,
            correlation_target: -0.2,
            seed: 1010,
            rewire_budget: 10.0,
        },
        SynthConfig {
            node_count: 150_000,
            alpha_in: 1.3,
            alpha_out: 1.5,
            k_min: 3,
            correlation_target: 0.0,
            seed: 1020,
            rewire_budget: 10.0,
        },
    ];
    let mut summary = String::new();
    for (index, cfg) in configs.iter().enumerate() {
        let (g, _) = generate(cfg).unwrap();
        assert!(
            g.edge_count() >= 1_000_000,
            "expected a million-edge graph, got {}",
            g.edge_count()
        );
        let rho_before = edge_degree_correlation(&g).unwrap();

        let (mixed, _) = degree_preserving_shuffle(
            &g,
            &ShuffleConfig {
                swap_multiplier: 10.0,
                seed: 1011 + index as u64,
            },
        );
        for i in 0..g.node_count() as u32 {
            assert_eq!(g.k_in(i), mixed.k_in(i), "in-degree changed at node {i}");
            assert_eq!(g.k_out(i), mixed.k_out(i), "out-degree changed at node {i}");
        }
        let rho_after = edge_degree_correlation(&mixed).unwrap();
        assert!(
            rho_after.abs() < DECORRELATED_MAX,
            "correlation {rho_after} survived the shuffle"
        );
        summary.push_str(&format!(
            " [{} edges, {rho_before:.4} -> {rho_after:.4}]",
            g.edge_count()
        ));
    }
    println!(
        "PASS shuffle at scale: every degree preserved, correlations removed \
         (bound |rho| < {DECORRELATED_MAX}):{summary}"
    );
}

// ---------------------------------------------------------------------------
// Tail-exponent estimators on constructed samples
// ---------------------------------------------------------------------------

/// Absolute recovery error allowed for both estimators.
const ESTIMATOR_TOL: f64 = 0.1;

#[test]
fn a11_both_estimators_recover_known_tail_exponents() {
    let n = 100_000;
    let mut report = String::new();
    for alpha in [0.65, 1.0, 1.3, 2.0] {
        // Inverting the CCDF at the rank points gives a sample whose tail
        // follows the target exponent exactly.
        let sample: Vec<f64> = (1..=n)
            .map(|i| (n as f64 / i as f64).powf(1.0 / alpha))
            .collect();
        for method in [FitMethod::Hill, FitMethod::RankRegression] {
            let fit = fit_tail_exponent(&sample, method, 0.05).unwrap();
            let err = (fit.exponent - alpha).abs();
            assert!(
                err <= ESTIMATOR_TOL,
                "{method:?} recovered {} for alpha {alpha}",
                fit.exponent
            );
            report.push_str(&format!(" {alpha}:{:.3}", fit.exponent));
        }
    }
    println!(
        "PASS estimator recovery: hill/rank pairs per target{report} \
         (tolerance {ESTIMATOR_TOL})"
    );
}

// ---------------------------------------------------------------------------
// Throughput at realistic network size
// ---------------------------------------------------------------------------

/// Wall-clock budget for a single transport step.
const STEP_SECONDS: f64 = 1.0;
/// Wall-clock budget for full convergence at the default tolerance.
const CONVERGE_SECONDS: f64 = 120.0;
/// Node and edge counts mirroring a national-scale trading network.
const BIG_NODES: usize = 462_602;
const BIG_EDGES: u64 = 2_583_620;

#[test]
fn a12_transport_scales_to_realistic_network_sizes() {
    let degrees =
        sample_powerlaw_degrees(BIG_NODES, NETWORK_ALPHA, NETWORK_K_MIN, Some(BIG_EDGES), 1212)
            .unwrap();
    let (matched, _) = directed_configuration_model(&degrees, &degrees, 1213).unwrap();
    let (core, _) = largest_scc(&matched);
    assert!(
        core.edge_count() as u64 >= BIG_EDGES * 93 / 100,
        "giant component kept only {} edges",
        core.edge_count()
    );

    let kernel = build_kernel(&core, ModelKind::InDegreeBiased);
    let state = vec![1.0; core.node_count()];
    let start = Instant::now();
    let next = step(&kernel, &state, 1.0, 0.0).unwrap();
    let step_time = start.elapsed().as_secs_f64();
    assert!(next.iter().all(|v| v.is_finite()));
    assert!(step_time < STEP_SECONDS, "one step took {step_time:.3}s");

    let start = Instant::now();
    let result = run_to_steady(&kernel, &TransportConfig::closed(ModelKind::InDegreeBiased))
        .unwrap();
    let solve_time = start.elapsed().as_secs_f64();
    assert!(result.converged, "no convergence after {} iterations", result.iterations);
    assert!(
        solve_time < CONVERGE_SECONDS,
        "convergence took {solve_time:.1}s for {} iterations",
        result.iterations
    );
    println!(
        "PASS realistic scale: {} nodes, {} edges; one step {step_time:.3}s \
         (budget {STEP_SECONDS}s), convergence in {} iterations, {solve_time:.1}s \
         (budget {CONVERGE_SECONDS}s)",
        core.node_count(),
        core.edge_count(),
        result.iterations
    );
}
