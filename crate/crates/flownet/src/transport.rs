//! Linear transport dynamics on directed graphs.
//!
//! A transition kernel distributes each node's scalar to its out-neighbors,
//! either in equal shares (`UniformSplit`) or proportionally to the
//! receivers' in-degrees (`InDegreeBiased`). Nodes without out-edges keep
//! nothing and send nothing: their contribution simply vanishes, there is
//! no redistribution patch. The closed dynamics x <- Bx conserve the total
//! on strongly connected graphs; the open dynamics x <- rBx + f dissipate
//! a fraction (1-r) per hop and inject f at every node, which makes them
//! converge on any graph.
//!
//! `step` pulls contributions per destination in fixed order, so results
//! are bit-identical at any worker count.

use crate::graph::{strongly_connected_components, DirectedGraph};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// How each node's scalar is split among its out-neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Equal share 1/k_out to every out-neighbor.
    UniformSplit,
    /// Share proportional to the receiver's in-degree.
    InDegreeBiased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Conservative dynamics x <- Bx; requires a strongly connected graph.
    Closed,
    /// Dissipative dynamics x <- rBx + f with 0 < r < 1, f > 0.
    Open,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Every node starts at the given value.
    Uniform(f64),
    Custom(Vec<f64>),
}

#[derive(Debug, thiserror::Error)]
pub enum TransportError {
    #[error("state contains a non-finite value at index {index}")]
    NonFiniteState { index: usize },
    #[error(
        "closed mode requires one strongly connected component with at least one edge; \
         graph has {components} components and {edges} edges"
    )]
    NotStronglyConnected { components: usize, edges: usize },
    #[error("invalid transport configuration: {0}")]
    InvalidConfig(String),
    #[error("open steady-state total at f=1 is zero; cannot calibrate the injection")]
    DegenerateCalibration,
}

/// Iteration settings for `run_to_steady`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportConfig {
    pub model: ModelKind,
    pub mode: Mode,
    pub r: f64,
    pub f: f64,
    /// Relative L1 step-change threshold.
    pub tolerance: f64,
    pub max_iters: u64,
    pub initial: InitialState,
}

impl TransportConfig {
    pub fn closed(model: ModelKind) -> Self {
        TransportConfig {
            model,
            mode: Mode::Closed,
            r: 1.0,
            f: 0.0,
            tolerance: 1e-10,
            max_iters: 100_000,
            initial: InitialState::Uniform(1.0),
        }
    }

    pub fn open(model: ModelKind, r: f64, f: f64) -> Self {
        TransportConfig {
            model,
            mode: Mode::Open,
            r,
            f,
            tolerance: 1e-10,
            max_iters: 100_000,
            initial: InitialState::Uniform(1.0),
        }
    }

    fn validate(&self, node_count: usize) -> Result<(), TransportError> {
        match self.mode {
            Mode::Closed => {
                if self.r != 1.0 || self.f != 0.0 {
                    return Err(TransportError::InvalidConfig(format!(
                        "closed mode runs with r=1, f=0; got r={}, f={}",
                        self.r, self.f
                    )));
                }
            }
            Mode::Open => {
                if !(self.r.is_finite() && 0.0 < self.r && self.r < 1.0) {
                    return Err(TransportError::InvalidConfig(format!(
                        "open mode requires 0 < r < 1, got {}",
                        self.r
                    )));
                }
                if !(self.f.is_finite() && self.f > 0.0) {
                    return Err(TransportError::InvalidConfig(format!(
                        "open mode requires f > 0, got {}",
                        self.f
                    )));
                }
            }
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(TransportError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iters == 0 {
            return Err(TransportError::InvalidConfig("max_iters must be >= 1".into()));
        }
        match &self.initial {
            InitialState::Uniform(c) => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(TransportError::InvalidConfig(format!(
                        "uniform initial value must be finite and nonnegative, got {c}"
                    )));
                }
            }
            InitialState::Custom(v) => {
                if v.len() != node_count {
                    return Err(TransportError::InvalidConfig(format!(
                        "initial state has {} entries, graph has {} nodes",
                        v.len(),
                        node_count
                    )));
                }
                if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                    return Err(TransportError::InvalidConfig(format!(
                        "initial state entries must be finite and nonnegative, found {bad}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn initial_vector(&self, node_count: usize) -> Vec<f64> {
        match &self.initial {
            InitialState::Uniform(c) => vec![*c; node_count],
            InitialState::Custom(v) => v.clone(),
        }
    }
}

/// Per-edge transition weights, aligned with the graph's in-adjacency.
///
/// Column i is the weight vector leaving node i. Sources with no out-edges
/// (or, in the biased model, no receiving in-degree) are inactive: their
/// column is all zero. Active columns sum to 1 within 1e-12, checked at
/// build time.
pub struct TransitionKernel<'g> {
    graph: &'g DirectedGraph,
    model: ModelKind,
    /// weights[in_start(m) + t] multiplies x[src] for the t-th in-neighbor
    /// src of node m.
    weights: Vec<f64>,
    in_starts: Vec<usize>,
    active: Vec<bool>,
}

const COLUMN_SUM_TOL: f64 = 1e-12;

pub fn build_kernel(g: &DirectedGraph, model: ModelKind) -> TransitionKernel<'_> {
    let n = g.node_count();
    // Per-source normalizer: out-degree for the uniform split, total
    // in-degree of the out-neighborhood for the biased split.
    let denom: Vec<f64> = (0..n as u32)
        .map(|i| match model {
            ModelKind::UniformSplit => g.k_out(i) as f64,
            ModelKind::InDegreeBiased => g
                .out_neighbors(i)
                .iter()
                .map(|&j| g.k_in(j) as f64)
                .sum(),
        })
        .collect();
    let active: Vec<bool> = denom.iter().map(|&d| d > 0.0).collect();

    let mut in_starts = Vec::with_capacity(n + 1);
    let mut weights = Vec::with_capacity(g.edge_count());
    in_starts.push(0);
    for m in 0..n as u32 {
        for &src in g.in_neighbors(m) {
            let w = match model {
                ModelKind::UniformSplit => 1.0 / denom[src as usize],
                ModelKind::InDegreeBiased => g.k_in(m) as f64 / denom[src as usize],
            };
            weights.push(w);
        }
        in_starts.push(weights.len());
    }

    let mut column_sums = vec![0.0f64; n];
    for m in 0..n as u32 {
        let start = in_starts[m as usize];
        for (t, &src) in g.in_neighbors(m).iter().enumerate() {
            column_sums[src as usize] += weights[start + t];
        }
    }
    for (i, &sum) in column_sums.iter().enumerate() {
        if active[i] {
            assert!(
                (sum - 1.0).abs() <= COLUMN_SUM_TOL,
                "column {i} sums to {sum}, expected 1"
            );
        } else {
            assert!(sum == 0.0, "inactive column {i} sums to {sum}");
        }
    }

    TransitionKernel {
        graph: g,
        model,
        weights,
        in_starts,
        active,
    }
}

impl<'g> TransitionKernel<'g> {
    pub fn graph(&self) -> &'g DirectedGraph {
        self.graph
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn is_active(&self, i: u32) -> bool {
        self.active[i as usize]
    }

    /// Weight on the edge src -> dst, if present.
    pub fn weight(&self, src: u32, dst: u32) -> Option<f64> {
        let nbrs = self.graph.in_neighbors(dst);
        let t = nbrs.binary_search(&src).ok()?;
        Some(self.weights[self.in_starts[dst as usize] + t])
    }

    /// One application of x <- r Bx + f, destinations computed independently
    /// in fixed per-destination order.
    fn apply(&self, x: &[f64], r: f64, f: f64) -> Vec<f64> {
        let g = self.graph;
        (0..g.node_count() as u32)
            .into_par_iter()
            .map(|m| {
                let start = self.in_starts[m as usize];
                let mut acc = 0.0;
                for (t, &src) in g.in_neighbors(m).iter().enumerate() {
                    acc += self.weights[start + t] * x[src as usize];
                }
                r * acc + f
            })
            .collect()
    }
}

/// Relative L1 distance from `from` to `to`, with a zero-vector guard.
fn relative_l1_change(from: &[f64], to: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in from.iter().zip(to.iter()) {
        num += (b - a).abs();
        den += a.abs();
    }
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Advances the state by one step.
pub fn step(
    k: &TransitionKernel<'_>,
    x: &[f64],
    r: f64,
    f: f64,
) -> Result<Vec<f64>, TransportError> {
    assert_eq!(x.len(), k.graph.node_count(), "state length must match node count");
    assert!(r.is_finite() && 0.0 < r && r <= 1.0, "r must lie in (0, 1]");
    assert!(f.is_finite() && f >= 0.0, "f must be nonnegative");
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(TransportError::NonFiniteState { index });
    }
    Ok(k.apply(x, r, f))
}

/// Where the iteration ended up.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyResult {
    pub state: Vec<f64>,
    pub iterations: u64,
    /// Relative L1 change of the final step.
    pub last_change: f64,
    /// Relative L1 fixed-point defect of the returned state.
    pub residual: f64,
    pub converged: bool,
}

impl SteadyResult {
    pub fn total(&self) -> f64 {
        self.state.iter().sum()
    }
}

/// Iterates until the relative L1 step change drops below the tolerance.
///
/// Closed mode insists on a strongly connected graph with at least one
/// edge; anything else would drain mass and the unique-steady-state
/// guarantee would be lost. Hitting max_iters is reported via the
/// converged flag, not as an error.
pub fn run_to_steady(
    k: &TransitionKernel<'_>,
    cfg: &TransportConfig,
) -> Result<SteadyResult, TransportError> {
    let n = k.graph.node_count();
    cfg.validate(n)?;
    if cfg.mode == Mode::Closed {
        let partition = strongly_connected_components(k.graph);
        if partition.component_count != 1 || k.graph.edge_count() == 0 {
            return Err(TransportError::NotStronglyConnected {
                components: partition.component_count,
                edges: k.graph.edge_count(),
            });
        }
    }

    let mut x = cfg.initial_vector(n);
    let mut last_change = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for t in 1..=cfg.max_iters {
        let next = step(k, &x, cfg.r, cfg.f)?;
        last_change = relative_l1_change(&x, &next);
        x = next;
        iterations = t;
        if last_change < cfg.tolerance {
            converged = true;
            break;
        }
    }

    let probe = step(k, &x, cfg.r, cfg.f)?;
    let residual = relative_l1_change(&x, &probe);
    Ok(SteadyResult {
        state: x,
        iterations,
        last_change,
        residual,
        converged,
    })
}

/// Power-iteration estimate of the dominant eigenvalue magnitude of rB.
///
/// Starts from a seeded strictly positive vector and reports the geometric
/// mean of the last min(50, iters/2) L1 growth ratios. A ratio of zero
/// (nilpotent kernel annihilates the state) short-circuits to 0.
pub fn estimate_spectral_radius(k: &TransitionKernel<'_>, r: f64, iters: u64, seed: u64) -> f64 {
    assert!(iters >= 10, "need at least 10 power iterations");
    assert!(r.is_finite() && 0.0 < r && r <= 1.0, "r must lie in (0, 1]");
    let n = k.graph.node_count();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    let total: f64 = x.iter().sum();
    for v in &mut x {
        *v /= total;
    }

    let mut ratios = Vec::with_capacity(iters as usize);
    for _ in 0..iters {
        let y = k.apply(&x, r, 0.0);
        let norm: f64 = y.iter().sum();
        if norm <= 0.0 {
            return 0.0;
        }
        ratios.push(norm);
        x = y;
        for v in &mut x {
            *v /= norm;
        }
    }
    let tail = ((iters / 2) as usize).min(50);
    let last = &ratios[ratios.len() - tail..];
    let log_mean = last.iter().map(|v| v.ln()).sum::<f64>() / tail as f64;
    log_mean.exp()
}

/// Finds the injection f whose open steady state carries the requested
/// total. The fixed point is linear in f, so one solve at f=1 and a scale
/// suffice; the scaled state's relative residual is the f=1 solve's own.
pub fn calibrate_injection(
    g: &DirectedGraph,
    model: ModelKind,
    r: f64,
    total_target: f64,
    tolerance: f64,
) -> Result<(f64, SteadyResult), TransportError> {
    if !(total_target.is_finite() && total_target > 0.0) {
        return Err(TransportError::InvalidConfig(format!(
            "total_target must be positive, got {total_target}"
        )));
    }
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(TransportError::InvalidConfig(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let kernel = build_kernel(g, model);
    let mut cfg = TransportConfig::open(model, r, 1.0);
    // Solve well below the requested accuracy; the scale step is exact.
    cfg.tolerance = tolerance.min(1e-13);
    let unit = run_to_steady(&kernel, &cfg)?;
    let unit_total = unit.total();
    if unit_total <= 0.0 {
        return Err(TransportError::DegenerateCalibration);
    }
    let f = total_target / unit_total;
    let state = unit.state.iter().map(|v| v * f).collect();
    Ok((
        f,
        SteadyResult {
            state,
            iterations: unit.iterations,
            last_change: unit.last_change,
            residual: unit.residual,
            converged: unit.converged,
        },
    ))
}
