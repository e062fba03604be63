//! Empirical statistics for heavy-tailed node scalars: complementary CDFs,
//! tail-exponent fits, degree-correlation curves, log-binned conditional
//! means, and the weighted neighbor sums that tie node scalars to network
//! structure.
//!
//! Exponents follow the CCDF convention throughout: alpha such that
//! P(X >= x) is proportional to x^(-alpha).

use crate::graph::DirectedGraph;

/// Hill tail fraction used when a caller has no better choice.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.1;
/// Log-binning defaults shared by the binned statistics.
pub const DEFAULT_BINS_PER_DECADE: u32 = 5;
pub const DEFAULT_MIN_OCCUPANCY: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("input is empty")]
    EmptyInput,
    #[error("input contains a non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("tail fraction {0} lies outside (0, 0.5]")]
    InvalidTailFraction(f64),
    #[error("tail holds only {got} samples, need at least 10")]
    TooFewTailSamples { got: usize },
    #[error("tail values must be positive for a log-scale fit")]
    NonPositiveTail,
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn check_finite(values: &[f64]) -> Result<(), StatsError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(StatsError::NonFinite { index }),
        None => Ok(()),
    }
}

/// Empirical complementary CDF over the distinct sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    /// Distinct values, ascending.
    pub values: Vec<f64>,
    /// Fraction of samples >= the matching value; starts at 1, strictly
    /// decreasing.
    pub fractions: Vec<f64>,
}

impl CcdfCurve {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.fractions.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Empirical P(X >= v) at every distinct v. Ties resolve toward >=.
pub fn ccdf(values: &[f64]) -> Result<CcdfCurve, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    check_finite(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut distinct = Vec::new();
    let mut fractions = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        distinct.push(sorted[i]);
        fractions.push((sorted.len() - i) as f64 / n);
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        i = j;
    }
    Ok(CcdfCurve {
        values: distinct,
        fractions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Maximum-likelihood estimator on the tail order statistics.
    Hill,
    /// Least-squares slope of log-CCDF against log-value on the tail.
    RankRegression,
}

/// A fitted CCDF tail exponent and the window it was measured on.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub tail_fraction: f64,
    /// Smallest value treated as tail (Hill: the threshold order statistic).
    pub x_min: f64,
    pub method: FitMethod,
    pub tail_count: usize,
}

/// Fits alpha with P(X >= x) ~ x^(-alpha) on the top `tail_fraction` of the
/// sample.
pub fn fit_tail_exponent(
    values: &[f64],
    method: FitMethod,
    tail_fraction: f64,
) -> Result<PowerLawFit, StatsError> {
    let n = values.len();
    if n < 100 {
        return Err(StatsError::TooFewSamples { needed: 100, got: n });
    }
    check_finite(values)?;
    if !(tail_fraction > 0.0 && tail_fraction <= 0.5) {
        return Err(StatsError::InvalidTailFraction(tail_fraction));
    }
    let k = (tail_fraction * n as f64).floor() as usize;
    if k < 10 {
        return Err(StatsError::TooFewTailSamples { got: k });
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| f64::total_cmp(b, a));

    let (exponent, x_min) = match method {
        FitMethod::Hill => {
            let threshold = sorted[k];
            if threshold <= 0.0 {
                return Err(StatsError::NonPositiveTail);
            }
            let log_sum: f64 = sorted[..k].iter().map(|v| (v / threshold).ln()).sum();
            if log_sum <= 0.0 {
                return Err(StatsError::DegenerateFit(
                    "tail values are all equal to the threshold".into(),
                ));
            }
            (k as f64 / log_sum, threshold)
        }
        FitMethod::RankRegression => {
            if sorted[k - 1] <= 0.0 {
                return Err(StatsError::NonPositiveTail);
            }
            let points: Vec<(f64, f64)> = sorted[..k]
                .iter()
                .enumerate()
                .map(|(i, v)| (v.ln(), ((i + 1) as f64 / n as f64).ln()))
                .collect();
            let slope = ols_slope(&points).ok_or_else(|| {
                StatsError::DegenerateFit("tail values carry no spread".into())
            })?;
            (-slope, sorted[k - 1])
        }
    };
    if !(exponent.is_finite() && exponent > 0.0) {
        return Err(StatsError::DegenerateFit(format!(
            "estimated exponent {exponent} is not a positive tail index"
        )));
    }
    Ok(PowerLawFit {
        exponent,
        tail_fraction,
        x_min,
        method,
        tail_count: k,
    })
}

/// Least-squares slope; None when fewer than two points or no x spread.
fn ols_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// One logarithmic bin of a conditional distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalBin {
    /// Geometric bin center (0 for the underflow bin).
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean: f64,
    pub p05: f64,
    pub p95: f64,
    /// Midpoint of the fullest log-y histogram sub-bin; NaN when the bin
    /// holds no positive y.
    pub mode: f64,
}

/// Conditional statistics of y given x, on logarithmic x bins.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedConditional {
    /// Occupied bins with count >= the minimum occupancy, ascending in x.
    pub bins: Vec<ConditionalBin>,
    /// Statistics of the x = 0 entries, when they meet the occupancy.
    pub underflow: Option<ConditionalBin>,
    pub bins_per_decade: u32,
    pub min_occupancy: usize,
}

impl BinnedConditional {
    /// The reported bin whose [lo, hi) range contains x.
    pub fn bin_containing(&self, x: f64) -> Option<&ConditionalBin> {
        self.bins.iter().find(|b| b.lo <= x && x < b.hi)
    }

    /// Least-squares slope of log10(mean) against log10(center); None when
    /// fewer than two bins carry a positive mean.
    pub fn log_slope(&self) -> Option<f64> {
        let points: Vec<(f64, f64)> = self
            .bins
            .iter()
            .filter(|b| b.mean > 0.0 && b.center > 0.0)
            .map(|b| (b.center.log10(), b.mean.log10()))
            .collect();
        ols_slope(&points)
    }
}

const MODE_SUB_BINS: usize = 20;

fn bin_stats(ys: &[f64], center: f64, lo: f64, hi: f64) -> ConditionalBin {
    let count = ys.len();
    let mean = ys.iter().sum::<f64>() / count as f64;
    let mut sorted = ys.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let nearest_rank = |q: f64| -> f64 {
        let rank = ((q * count as f64).ceil() as usize).clamp(1, count);
        sorted[rank - 1]
    };
    let positive_logs: Vec<f64> = sorted.iter().filter(|v| **v > 0.0).map(|v| v.log10()).collect();
    let mode = if positive_logs.is_empty() {
        f64::NAN
    } else {
        let lo_l = positive_logs[0];
        let hi_l = positive_logs[positive_logs.len() - 1];
        if hi_l - lo_l < 1e-12 {
            10f64.powf(lo_l)
        } else {
            let width = (hi_l - lo_l) / MODE_SUB_BINS as f64;
            let mut counts = [0usize; MODE_SUB_BINS];
            for &v in &positive_logs {
                let idx = (((v - lo_l) / width) as usize).min(MODE_SUB_BINS - 1);
                counts[idx] += 1;
            }
            let fullest = counts
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .unwrap();
            10f64.powf(lo_l + (fullest as f64 + 0.5) * width)
        }
    };
    ConditionalBin {
        center,
        lo,
        hi,
        count,
        mean,
        p05: nearest_rank(0.05),
        p95: nearest_rank(0.95),
        mode,
    }
}

/// Bins x logarithmically and reports per-bin mean, count, 5th and 95th
/// percentiles, and mode of y. Zeros in x land in a dedicated underflow
/// bin; bins under the occupancy threshold are not reported.
pub fn conditional_mean_log_binned(
    x: &[f64],
    y: &[f64],
    bins_per_decade: u32,
    min_occupancy: usize,
) -> Result<BinnedConditional, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    check_finite(x)?;
    check_finite(y)?;
    if bins_per_decade == 0 {
        return Err(StatsError::InvalidInput("bins_per_decade must be >= 1".into()));
    }
    if min_occupancy == 0 {
        return Err(StatsError::InvalidInput("min_occupancy must be >= 1".into()));
    }
    if let Some(bad) = x.iter().find(|v| **v < 0.0) {
        return Err(StatsError::InvalidInput(format!(
            "x values must be nonnegative for log binning, found {bad}"
        )));
    }

    let bpd = bins_per_decade as f64;
    let mut grouped: std::collections::BTreeMap<i64, Vec<f64>> = std::collections::BTreeMap::new();
    let mut underflow_ys = Vec::new();
    for (&xv, &yv) in x.iter().zip(y.iter()) {
        if xv == 0.0 {
            underflow_ys.push(yv);
        } else {
            let idx = (bpd * xv.log10()).floor() as i64;
            grouped.entry(idx).or_default().push(yv);
        }
    }

    let bins = grouped
        .into_iter()
        .filter(|(_, ys)| ys.len() >= min_occupancy)
        .map(|(idx, ys)| {
            let lo = 10f64.powf(idx as f64 / bpd);
            let hi = 10f64.powf((idx + 1) as f64 / bpd);
            let center = 10f64.powf((idx as f64 + 0.5) / bpd);
            bin_stats(&ys, center, lo, hi)
        })
        .collect();
    let underflow = if underflow_ys.len() >= min_occupancy {
        Some(bin_stats(&underflow_ys, 0.0, 0.0, 0.0))
    } else {
        None
    };
    Ok(BinnedConditional {
        bins,
        underflow,
        bins_per_decade,
        min_occupancy,
    })
}

/// Which degree a node contributes to the k_nn curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeKind {
    /// k_in + k_out.
    Total,
    In,
    Out,
}

impl DegreeKind {
    fn of(self, g: &DirectedGraph, v: u32) -> f64 {
        match self {
            DegreeKind::Total => (g.k_in(v) + g.k_out(v)) as f64,
            DegreeKind::In => g.k_in(v) as f64,
            DegreeKind::Out => g.k_out(v) as f64,
        }
    }
}

/// Mean neighbor degree as a function of node degree, binned in k.
///
/// Neighbors are taken over the combined in- and out-adjacency; a
/// reciprocated pair therefore counts twice, consistently with the total
/// degree convention. Isolated nodes are skipped. Occupancy is 1 so that
/// lone hubs still appear.
pub fn knn_curve(g: &DirectedGraph, kind: DegreeKind) -> Result<BinnedConditional, StatsError> {
    if g.node_count() == 0 {
        return Err(StatsError::EmptyInput);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for v in 0..g.node_count() as u32 {
        let neighbor_count = g.k_in(v) + g.k_out(v);
        if neighbor_count == 0 {
            continue;
        }
        let sum: f64 = g
            .in_neighbors(v)
            .iter()
            .chain(g.out_neighbors(v).iter())
            .map(|&u| kind.of(g, u))
            .sum();
        xs.push(kind.of(g, v));
        ys.push(sum / neighbor_count as f64);
    }
    if xs.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    conditional_mean_log_binned(&xs, &ys, DEFAULT_BINS_PER_DECADE, 1)
}

/// Push-based weighted neighbor sums.
///
/// s1_m collects equal shares s_i/k_out(i) over the in-neighbors i of m;
/// s2_m collects shares biased by the receiver in-degree,
/// s_i * k_in(m) / sum_j k_in(j) over i's out-neighborhood. Sources with a
/// zero denominator contribute nothing.
pub fn weighted_neighbor_sums(g: &DirectedGraph, s: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = g.node_count();
    assert_eq!(s.len(), n, "scalar length must match node count");
    let mut s1 = vec![0.0; n];
    let mut s2 = vec![0.0; n];
    for i in 0..n as u32 {
        let outs = g.out_neighbors(i);
        if outs.is_empty() {
            continue;
        }
        let equal_share = s[i as usize] / outs.len() as f64;
        let denom: f64 = outs.iter().map(|&j| g.k_in(j) as f64).sum();
        for &m in outs {
            s1[m as usize] += equal_share;
            if denom > 0.0 {
                s2[m as usize] += s[i as usize] * g.k_in(m) as f64 / denom;
            }
        }
    }
    (s1, s2)
}

/// Pearson correlation of (k_out(src), k_in(dst)) over the edges, the
/// quantity the rewiring stage steers. Computed directly in floating point,
/// independent of the incremental integer bookkeeping used there. None when
/// a marginal has no spread or the graph has fewer than two edges.
pub fn edge_degree_correlation(g: &DirectedGraph) -> Option<f64> {
    let e = g.edge_count();
    if e < 2 {
        return None;
    }
    let en = e as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (src, dst) in g.edges() {
        let x = g.k_out(src) as f64;
        let y = g.k_in(dst) as f64;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let var_x = sxx / en - (sx / en) * (sx / en);
    let var_y = syy / en - (sy / en) * (sy / en);
    if var_x <= 0.0 || var_y <= 0.0 {
        return None;
    }
    let cov = sxy / en - (sx / en) * (sy / en);
    Some(cov / (var_x.sqrt() * var_y.sqrt()))
}

/// Comparison of a measured conditional-mean exponent against the value
/// predicted from the two tail exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub predicted_beta: f64,
    pub measured_beta: f64,
    pub relative_discrepancy: f64,
}

/// Predicts beta = alpha_in / alpha_s for the scaling <y>_k ~ k^beta and
/// reports how far a measured slope strays from it.
pub fn exponent_identity_check(alpha_in: f64, alpha_s: f64, beta_measured: f64) -> IdentityReport {
    assert!(alpha_in > 0.0 && alpha_s > 0.0 && beta_measured > 0.0, "exponents must be positive");
    let predicted_beta = alpha_in / alpha_s;
    IdentityReport {
        predicted_beta,
        measured_beta: beta_measured,
        relative_discrepancy: (beta_measured - predicted_beta).abs() / predicted_beta,
    }
}
