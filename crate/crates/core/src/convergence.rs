//! Seeded sweeps of the conflict-resolution time `T` and the statistics used
//! to test its logarithmic growth at desk scale.
//!
//! "Logarithmic" is checked as: the ratios `mean/ln n` and `var/(ln n)^2` do
//! not increase across sizes, together with fitted envelope constants and
//! tail frequencies.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Dynamics, PlayOptions};
use crate::graph::{generate_er, Graph};
use crate::rng::derive_seed;
use crate::stats::{quantile, summarize};

/// Per-vertex two-round resolution constant from the literature bound,
/// `1 / (1050 e^9)`. Kept for reference only: it is far too small to act as
/// a threshold.
pub const TWO_ROUND_CONSTANT: f64 = 1.0 / (1050.0 * 8_103.083_927_575_384);

pub const MIN_TRIALS_PER_SIZE: usize = 100;
pub const DEFAULT_EPSILON: f64 = 0.05;
pub const PROP3_DELTAS: [f64; 3] = [0.5, 0.1, 0.01];
/// Relative slack in ratio comparisons, absorbing floating-point rounding only.
const RATIO_ROUNDING: f64 = 1e-12;

fn nonincreasing(ratios: &[f64]) -> bool {
    ratios.windows(2).all(|w| w[1] <= w[0] + RATIO_ROUNDING * w[0].abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphFamily {
    ErdosRenyi { p: f64 },
    /// Erdős–Rényi with `p = degree / (n - 1)`, capped at one.
    ExpectedDegree { degree: f64 },
    Complete,
    Path,
    Edgeless,
}

impl GraphFamily {
    pub fn generate(&self, n: usize, seed: u64) -> Result<Graph> {
        match *self {
            GraphFamily::ErdosRenyi { p } => generate_er(n, p, seed),
            GraphFamily::ExpectedDegree { degree } => {
                let p = if n > 1 { (degree / (n - 1) as f64).min(1.0) } else { 0.0 };
                generate_er(n, p, seed)
            }
            GraphFamily::Complete => Ok(Graph::complete(n)),
            GraphFamily::Path => Ok(Graph::path(n)),
            GraphFamily::Edgeless => Ok(Graph::empty(n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum PaletteRule {
    /// `q = max_degree + k` for each generated instance.
    MaxDegreePlus(usize),
    Fixed(usize),
}

impl PaletteRule {
    pub fn palette(&self, g: &Graph) -> usize {
        match *self {
            PaletteRule::MaxDegreePlus(k) => g.max_degree() + k,
            PaletteRule::Fixed(q) => q,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub family: GraphFamily,
    pub palette: PaletteRule,
    pub trials: usize,
    /// Consecutive trials sharing one generated graph.
    pub trials_per_graph: usize,
    pub master_seed: u64,
    pub max_rounds: usize,
}

impl SweepConfig {
    pub fn new(sizes: Vec<usize>, family: GraphFamily, trials: usize, master_seed: u64) -> Self {
        Self {
            sizes,
            family,
            palette: PaletteRule::MaxDegreePlus(2),
            trials,
            trials_per_graph: 1,
            master_seed,
            max_rounds: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSize("sizes must be non-empty and strictly increasing".into()));
        }
        if self.sizes[0] == 0 {
            return Err(Error::InvalidSize("graph sizes must be positive".into()));
        }
        if self.trials == 0 || self.trials_per_graph == 0 {
            return Err(Error::InvalidSize("trials and trials per graph must be at least one".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialSample {
    pub n: usize,
    pub graph_id: usize,
    pub trial_id: usize,
    pub rounds: usize,
    pub seed: u64,
}

/// Run every trial of the sweep. Graph `g` of size `n` is drawn from stream
/// `[n, 0, g]` and trial `t` plays on stream `[n, 1, t]`, so the output is a
/// pure function of the config regardless of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<TrialSample>> {
    cfg.validate()?;
    let mut samples = Vec::with_capacity(cfg.sizes.len() * cfg.trials);
    for &n in &cfg.sizes {
        let batch: Vec<TrialSample> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial_id| {
                let graph_id = trial_id / cfg.trials_per_graph;
                let g = cfg.family.generate(n, derive_seed(cfg.master_seed, &[n as u64, 0, graph_id as u64]))?;
                let q = cfg.palette.palette(&g);
                let seed = derive_seed(cfg.master_seed, &[n as u64, 1, trial_id as u64]);
                let opts = PlayOptions { max_rounds: cfg.max_rounds, record_trajectory: false };
                let result = Dynamics::new(&g, q)?.play(seed, opts).map_err(|e| match e {
                    Error::Timeout { rounds, .. } => Error::TrialTimeout { n, trial: trial_id, seed, rounds },
                    other => other,
                })?;
                Ok(TrialSample { n, graph_id, trial_id, rounds: result.rounds, seed })
            })
            .collect::<Result<_>>()?;
        samples.extend(batch);
    }
    Ok(samples)
}

fn group_by_size(samples: &[TrialSample]) -> BTreeMap<usize, Vec<f64>> {
    let mut by_size: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for s in samples {
        by_size.entry(s.n).or_default().push(s.rounds as f64);
    }
    by_size
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeStats {
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_dev: f64,
    pub std_err: f64,
    pub variance_std_err: f64,
    /// `mean / ln n`, only for `n >= 3`.
    pub mean_ratio: Option<f64>,
    /// `variance / (ln n)^2`, only for `n >= 3`.
    pub variance_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub sizes: Vec<SizeStats>,
    /// `C = max mean / ln n` over sizes with `n >= 3`.
    pub mean_envelope: f64,
    /// `D = max variance / (ln n)^2` over sizes with `n >= 3`.
    pub variance_envelope: f64,
    /// Ratios are non-increasing over all sizes after the smallest two.
    pub mean_ratio_nonincreasing: bool,
    pub variance_ratio_nonincreasing: bool,
    pub two_round_constant: f64,
}

impl ScalingReport {
    /// Whether both ratio sequences are non-increasing over sizes `>= min_n`.
    pub fn nonincreasing_from(&self, min_n: usize) -> (bool, bool) {
        let tail: Vec<&SizeStats> = self.sizes.iter().filter(|s| s.n >= min_n).collect();
        let check = |f: fn(&SizeStats) -> Option<f64>| {
            let ratios: Vec<f64> = tail.iter().filter_map(|s| f(s)).collect();
            nonincreasing(&ratios)
        };
        (check(|s| s.mean_ratio), check(|s| s.variance_ratio))
    }
}

fn size_stats(n: usize, ts: &[f64]) -> SizeStats {
    let s = summarize(ts);
    let ln = (n as f64).ln();
    let log_scaled = n >= 3;
    SizeStats {
        n,
        trials: s.count,
        mean: s.mean,
        variance: s.variance,
        std_dev: s.std_dev,
        std_err: s.std_err,
        variance_std_err: s.variance_std_err,
        mean_ratio: log_scaled.then(|| s.mean / ln),
        variance_ratio: log_scaled.then(|| s.variance / (ln * ln)),
    }
}

fn envelopes(stats: &[SizeStats]) -> (f64, f64) {
    stats.iter().fold((0.0f64, 0.0f64), |(c, d), s| {
        (c.max(s.mean_ratio.unwrap_or(0.0)), d.max(s.variance_ratio.unwrap_or(0.0)))
    })
}

/// Per-size moments, envelope constants and the ratio monotonicity verdicts.
/// Needs at least two sizes with `min_trials` trials each.
pub fn scaling_report(samples: &[TrialSample], min_trials: usize) -> Result<ScalingReport> {
    let by_size = group_by_size(samples);
    if by_size.len() < 2 {
        return Err(Error::InvalidSize(format!("scaling needs at least two sizes, found {}", by_size.len())));
    }
    if let Some((&n, ts)) = by_size.iter().find(|(_, ts)| ts.len() < min_trials) {
        return Err(Error::InsufficientTrials { n, trials: ts.len(), required: min_trials });
    }
    let sizes: Vec<SizeStats> = by_size.iter().map(|(&n, ts)| size_stats(n, ts)).collect();
    let (mean_envelope, variance_envelope) = envelopes(&sizes);
    let beyond = |f: fn(&SizeStats) -> Option<f64>| {
        let ratios: Vec<f64> = sizes.iter().skip(2).filter_map(f).collect();
        nonincreasing(&ratios)
    };
    Ok(ScalingReport {
        mean_ratio_nonincreasing: beyond(|s| s.mean_ratio),
        variance_ratio_nonincreasing: beyond(|s| s.variance_ratio),
        sizes,
        mean_envelope,
        variance_envelope,
        two_round_constant: TWO_ROUND_CONSTANT,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub n: usize,
    pub trials: usize,
    /// `M ln n`.
    pub threshold: f64,
    /// Fraction of trials with `T > M ln n`.
    pub exceed_threshold: f64,
    /// Fraction of trials with `T >= n`.
    pub at_least_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub epsilon: f64,
    pub mean_envelope: f64,
    pub variance_envelope: f64,
    /// `M = sqrt(D / (2 epsilon)) + C`.
    pub m: f64,
    pub rows: Vec<TailRow>,
    pub below_epsilon_at_largest: bool,
    pub at_least_n_nonincreasing: bool,
    pub at_least_n_zero_at_largest: bool,
}

/// Stochastic-boundedness tails: `P[T > M ln n]` with `M` built from the
/// fitted envelopes, and `P[T >= n]`.
pub fn tail_checks(samples: &[TrialSample], epsilon: f64) -> Result<TailReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidProbability(epsilon));
    }
    let by_size = group_by_size(samples);
    let stats: Vec<SizeStats> = by_size.iter().map(|(&n, ts)| size_stats(n, ts)).collect();
    let (c, d) = envelopes(&stats);
    let m = (d / (2.0 * epsilon)).sqrt() + c;
    let rows: Vec<TailRow> = by_size
        .iter()
        .map(|(&n, ts)| {
            let threshold = m * (n as f64).ln();
            let frac = |pred: &dyn Fn(f64) -> bool| ts.iter().filter(|&&t| pred(t)).count() as f64 / ts.len() as f64;
            TailRow {
                n,
                trials: ts.len(),
                threshold,
                exceed_threshold: frac(&|t| t > threshold),
                at_least_n: frac(&|t| t >= n as f64),
            }
        })
        .collect();
    let last = rows.last();
    Ok(TailReport {
        epsilon,
        mean_envelope: c,
        variance_envelope: d,
        m,
        below_epsilon_at_largest: last.is_some_and(|r| r.exceed_threshold < epsilon),
        at_least_n_nonincreasing: rows.windows(2).all(|w| w[1].at_least_n <= w[0].at_least_n),
        at_least_n_zero_at_largest: last.is_some_and(|r| r.at_least_n == 0.0),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileRow {
    pub delta: f64,
    /// Empirical `(1 - delta)`-quantile of `T`.
    pub quantile: f64,
    /// `ln(n / delta) / c_hat`.
    pub fitted_bound: Option<f64>,
    /// `2 ln(n / delta) / c` with the literature constant.
    pub reference_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileTable {
    pub n: usize,
    pub trials: usize,
    /// Largest `c` for which `ln(n / delta) / c` covers every quantile;
    /// `None` when every quantile is zero.
    pub fitted_c: Option<f64>,
    pub two_round_constant: f64,
    pub rows: Vec<QuantileRow>,
}

/// High-probability convergence table for one size over the deltas in
/// [`PROP3_DELTAS`].
pub fn prop3_tail_curve(samples: &[TrialSample]) -> Result<QuantileTable> {
    let by_size = group_by_size(samples);
    let (n, ts) = match by_size.into_iter().collect::<Vec<_>>().as_slice() {
        [(n, ts)] => (*n, ts.clone()),
        other => return Err(Error::InvalidSize(format!("quantile table needs exactly one size, found {}", other.len()))),
    };
    let mut sorted = ts;
    sorted.sort_by(f64::total_cmp);
    let log_term = |delta: f64| (n as f64 / delta).ln();
    let quantiles: Vec<(f64, f64)> = PROP3_DELTAS.iter().map(|&d| (d, quantile(&sorted, 1.0 - d))).collect();
    let fitted_c = quantiles
        .iter()
        .filter(|(_, q)| *q > 0.0)
        .map(|&(d, q)| log_term(d) / q)
        .min_by(f64::total_cmp);
    let rows = quantiles
        .into_iter()
        .map(|(delta, q)| QuantileRow {
            delta,
            quantile: q,
            fitted_bound: fitted_c.map(|c| log_term(delta) / c),
            reference_bound: 2.0 * log_term(delta) / TWO_ROUND_CONSTANT,
        })
        .collect();
    Ok(QuantileTable { n, trials: sorted.len(), fitted_c, two_round_constant: TWO_ROUND_CONSTANT, rows })
}

pub fn write_samples_csv<W: Write>(mut w: W, header: &[String], samples: &[TrialSample]) -> Result<()> {
    let mut out = String::new();
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("n,graph_id,trial_id,T,seed\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{},{},{}", s.n, s.graph_id, s.trial_id, s.rounds, s.seed);
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn synthetic(sizes: &[usize], trials: usize, t: impl Fn(usize, usize) -> usize) -> Vec<TrialSample> {
        sizes
            .iter()
            .flat_map(|&n| {
                let t = &t;
                (0..trials).map(move |i| TrialSample { n, graph_id: i, trial_id: i, rounds: t(n, i), seed: 0 })
            })
            .collect()
    }

    #[test]
    fn two_round_constant_value() {
        assert_abs_diff_eq!(TWO_ROUND_CONSTANT, 1.0 / (1050.0 * 9f64.exp()), epsilon = 1e-20);
    }

    #[test]
    fn k2_sweep_mean() {
        let mut cfg = SweepConfig::new(vec![2], GraphFamily::Complete, 100_000, 7);
        cfg.palette = PaletteRule::Fixed(3);
        let samples = run_sweep(&cfg).unwrap();
        let mean = samples.iter().map(|s| s.rounds as f64).sum::<f64>() / samples.len() as f64;
        assert!((mean - 2.0 / 3.0).abs() <= 0.02, "mean {mean}");

        let tails = tail_checks(&samples, DEFAULT_EPSILON).unwrap();
        // collision at the start (1/3) that survives the first round (1/2)
        assert!((tails.rows[0].at_least_n - 1.0 / 6.0).abs() <= 0.01);

        let table = prop3_tail_curve(&samples).unwrap();
        assert_eq!(table.rows[0].quantile, 0.0);
    }

    #[test]
    fn single_vertex_sweep_is_all_zero() {
        let samples = run_sweep(&SweepConfig::new(vec![1], GraphFamily::Edgeless, 50, 1)).unwrap();
        assert!(samples.iter().all(|s| s.rounds == 0));
        let tails = tail_checks(&samples, 0.05).unwrap();
        assert_eq!(tails.rows[0].exceed_threshold, 0.0);
        assert_eq!(tails.rows[0].at_least_n, 0.0);
    }

    #[test]
    fn sweep_is_reproducible_and_validated() {
        let cfg = SweepConfig::new(vec![8, 16], GraphFamily::ExpectedDegree { degree: 3.0 }, 40, 99);
        assert_eq!(run_sweep(&cfg).unwrap(), run_sweep(&cfg).unwrap());
        let bad = SweepConfig::new(vec![16, 8], GraphFamily::Complete, 10, 0);
        assert!(matches!(run_sweep(&bad), Err(Error::InvalidSize(_))));
        let mut small = SweepConfig::new(vec![4], GraphFamily::Complete, 10, 0);
        small.palette = PaletteRule::Fixed(4);
        assert!(matches!(run_sweep(&small), Err(Error::PaletteTooSmall { .. })));
    }

    #[test]
    fn trials_per_graph_share_graphs() {
        let mut cfg = SweepConfig::new(vec![10], GraphFamily::ErdosRenyi { p: 0.3 }, 9, 5);
        cfg.trials_per_graph = 3;
        let ids: Vec<usize> = run_sweep(&cfg).unwrap().iter().map(|s| s.graph_id).collect();
        assert_eq!(ids, vec![0, 0, 0, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn constant_samples_report() {
        let samples = synthetic(&[4, 8, 16], 100, |_, _| 5);
        let r = scaling_report(&samples, MIN_TRIALS_PER_SIZE).unwrap();
        assert_abs_diff_eq!(r.mean_envelope, 5.0 / 4f64.ln(), epsilon = 1e-12);
        assert_eq!(r.variance_envelope, 0.0);
        assert!(r.mean_ratio_nonincreasing && r.variance_ratio_nonincreasing);
    }

    #[test]
    fn log2_samples_have_flat_ratio() {
        let samples = synthetic(&[8, 16, 32, 64], 100, |n, _| (n as f64).log2().ceil() as usize);
        let r = scaling_report(&samples, MIN_TRIALS_PER_SIZE).unwrap();
        for s in &r.sizes {
            assert_abs_diff_eq!(s.mean_ratio.unwrap(), 1.0 / 2f64.ln(), epsilon = 1e-12);
        }
        assert_eq!(r.nonincreasing_from(8), (true, true));
    }

    #[test]
    fn report_refuses_thin_input() {
        let samples = synthetic(&[4, 8], 99, |_, _| 1);
        assert!(matches!(scaling_report(&samples, 100), Err(Error::InsufficientTrials { trials: 99, .. })));
        let one = synthetic(&[4], 200, |_, _| 1);
        assert!(matches!(scaling_report(&one, 100), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn small_sizes_have_no_ratio() {
        let samples = synthetic(&[1, 2, 3], 100, |_, i| i % 2);
        let r = scaling_report(&samples, 100).unwrap();
        assert!(r.sizes[0].mean_ratio.is_none() && r.sizes[1].mean_ratio.is_none());
        assert!(r.sizes[2].mean_ratio.is_some());
    }

    #[test]
    fn zero_samples_have_empty_tails() {
        let samples = synthetic(&[1, 5, 50], 20, |_, _| 0);
        let tails = tail_checks(&samples, 0.05).unwrap();
        assert_eq!(tails.m, 0.0);
        assert!(tails.rows.iter().all(|r| r.exceed_threshold == 0.0 && r.at_least_n == 0.0));
        assert!(tails.below_epsilon_at_largest && tails.at_least_n_zero_at_largest);
    }

    #[test]
    fn quantile_table_on_constant_samples() {
        let samples = synthetic(&[32], 50, |_, _| 4);
        let table = prop3_tail_curve(&samples).unwrap();
        assert!(table.rows.iter().all(|r| r.quantile == 4.0));
        let c = table.fitted_c.unwrap();
        assert_abs_diff_eq!(c, (32.0f64 / 0.5).ln() / 4.0, epsilon = 1e-12);
        for r in &table.rows {
            assert!(r.fitted_bound.unwrap() >= r.quantile - 1e-12);
            assert!(r.reference_bound > 1e6);
        }
        assert!(prop3_tail_curve(&synthetic(&[3, 4], 5, |_, _| 0)).is_err());
    }

    #[test]
    fn samples_csv_layout() {
        let mut buf = Vec::new();
        let s = [TrialSample { n: 2, graph_id: 0, trial_id: 1, rounds: 3, seed: 42 }];
        write_samples_csv(&mut buf, &[], &s).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,graph_id,trial_id,T,seed\n2,0,1,3,42\n");
    }
}
