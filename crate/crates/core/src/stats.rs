//! Sample summaries and goodness-of-fit tests.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub std_dev: f64,
    /// Standard error of the mean.
    pub std_err: f64,
    /// Large-sample standard error of the sample variance,
    /// `sqrt((m4 - s^4) / count)` with `m4` the fourth central moment.
    pub variance_std_err: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let count = xs.len();
    let nf = count as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let (m2, m4) = xs.iter().fold((0.0, 0.0), |(m2, m4), &x| {
        let d = x - mean;
        (m2 + d * d, m4 + d * d * d * d)
    });
    let variance = if count > 1 { m2 / (nf - 1.0) } else { 0.0 };
    let biased = m2 / nf;
    let m4 = m4 / nf;
    Summary {
        count,
        mean,
        variance,
        std_dev: variance.sqrt(),
        std_err: (variance / nf).sqrt(),
        variance_std_err: ((m4 - biased * biased).max(0.0) / nf).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `counts` against cell probabilities `probs`.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> ChiSquare {
    assert_eq!(counts.len(), probs.len(), "one probability per cell");
    assert!(counts.len() >= 2, "need at least two cells");
    let total = counts.iter().sum::<u64>() as f64;
    let statistic = counts
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = total * p;
            (o as f64 - e).powi(2) / e
        })
        .sum::<f64>();
    let dof = counts.len() - 1;
    let p_value = ChiSquared::new(dof as f64).expect("positive dof").sf(statistic);
    ChiSquare { statistic, dof, p_value }
}

pub fn chi_square_uniform(counts: &[u64]) -> ChiSquare {
    let k = counts.len();
    chi_square_gof(counts, &vec![1.0 / k as f64; k])
}

/// Empirical `level`-quantile: the smallest sample `x` with `F(x) >= level`.
pub fn quantile(sorted: &[f64], level: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let rank = (level * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn summary_of_small_sample() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert_abs_diff_eq!(s.variance, 5.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.std_err, (5.0 / 12.0f64).sqrt(), epsilon = 1e-15);
        let c = summarize(&[7.0; 10]);
        assert_eq!((c.variance, c.variance_std_err), (0.0, 0.0));
    }

    #[test]
    fn chi_square_reference_value() {
        // scipy.stats.chisquare([28, 31, 40, 35]) -> (2.4179104477611943, 0.4903093069653883)
        let r = chi_square_uniform(&[28, 31, 40, 35]);
        assert_abs_diff_eq!(r.statistic, 2.417_910_447_761_194, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_value, 0.490_309_306_965_388_3, epsilon = 1e-9);
        assert_eq!(r.dof, 3);
    }

    #[test]
    fn chi_square_detects_skew() {
        assert!(chi_square_uniform(&[500, 100, 100, 100]).p_value < 1e-10);
        let r = chi_square_gof(&[250, 750], &[0.25, 0.75]);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn quantiles() {
        let xs = [0.0, 0.0, 1.0, 2.0, 5.0];
        assert_eq!(quantile(&xs, 0.5), 1.0);
        assert_eq!(quantile(&xs, 0.4), 0.0);
        assert_eq!(quantile(&xs, 0.99), 5.0);
        assert_eq!(quantile(&xs, 0.0), 0.0);
    }
}
