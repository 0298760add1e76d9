use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correlation::{has_variance, kendall_tau, spearman, TauVariant};
use super::MetaEvalError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSeries {
    pub metric_values: Vec<f64>,
    pub human_values: Vec<f64>,
    pub labels: Vec<String>,
}

impl PairedSeries {
    pub fn new(metric_values: Vec<f64>, human_values: Vec<f64>, labels: Vec<String>) -> Result<Self, MetaEvalError> {
        if metric_values.len() != human_values.len() || labels.len() != metric_values.len() {
            return Err(MetaEvalError::LengthMismatch { left: metric_values.len(), right: human_values.len() });
        }
        if metric_values.len() < 2 {
            return Err(MetaEvalError::TooShort(metric_values.len()));
        }
        Ok(PairedSeries { metric_values, human_values, labels })
    }

    /// Unlabelled series; labels are positions.
    pub fn unlabelled(metric_values: Vec<f64>, human_values: Vec<f64>) -> Result<Self, MetaEvalError> {
        let labels = (0..metric_values.len()).map(|i| i.to_string()).collect();
        Self::new(metric_values, human_values, labels)
    }

    pub fn len(&self) -> usize {
        self.metric_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metric_values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMethod {
    #[default]
    KendallTauB,
    KendallTauA,
    Spearman,
}

impl CorrelationMethod {
    /// Correlation of two equally long series, `None` when either is constant.
    pub fn compute(self, x: &[f64], y: &[f64]) -> Result<Option<f64>, MetaEvalError> {
        if !has_variance(x) || !has_variance(y) {
            if x.len() != y.len() {
                return Err(MetaEvalError::LengthMismatch { left: x.len(), right: y.len() });
            }
            return Ok(None);
        }
        Ok(Some(match self {
            CorrelationMethod::KendallTauB => kendall_tau(x, y, TauVariant::B)?,
            CorrelationMethod::KendallTauA => kendall_tau(x, y, TauVariant::A)?,
            CorrelationMethod::Spearman => spearman(x, y)?.value,
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub n_boot: usize,
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { n_boot: 1000, sample_size: 70, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub method: CorrelationMethod,
    pub point_estimate: f64,
    pub bootstrap_mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_boot: usize,
    pub sample_size: usize,
    /// Resamples dropped because one side had zero variance.
    pub skipped: usize,
}

/// Index draws (with replacement) for resample `b`.
///
/// Each resample has its own ChaCha8 stream derived from `seed`, so the draws
/// do not depend on evaluation order or thread count.
pub fn resample_indices(seed: u64, b: usize, n: usize, sample_size: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(b as u64);
    (0..sample_size).map(|_| rng.random_range(0..n)).collect()
}

/// Linear-interpolated percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Bootstrap distribution of a correlation with a 95% percentile interval.
pub fn bootstrap_correlation(
    series: &PairedSeries,
    method: CorrelationMethod,
    config: BootstrapConfig,
) -> Result<CorrelationResult, MetaEvalError> {
    if config.n_boot == 0 || config.sample_size == 0 {
        return Err(MetaEvalError::InvalidConfig("n_boot and sample_size must be at least 1".into()));
    }
    let point_estimate = method
        .compute(&series.metric_values, &series.human_values)?
        .ok_or(MetaEvalError::DegenerateSeries)?;
    let n = series.len();
    let draws: Vec<Option<f64>> = (0..config.n_boot)
        .into_par_iter()
        .map(|b| {
            let idx = resample_indices(config.seed, b, n, config.sample_size);
            let x: Vec<f64> = idx.iter().map(|&i| series.metric_values[i]).collect();
            let y: Vec<f64> = idx.iter().map(|&i| series.human_values[i]).collect();
            method.compute(&x, &y)
        })
        .collect::<Result<_, _>>()?;
    let mut values: Vec<f64> = draws.iter().flatten().copied().collect();
    let skipped = draws.len() - values.len();
    if values.is_empty() {
        return Err(MetaEvalError::DegenerateSeries);
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let bootstrap_mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(CorrelationResult {
        method,
        point_estimate,
        bootstrap_mean,
        ci_low: percentile(&values, 0.025),
        ci_high: percentile(&values, 0.975),
        n_boot: config.n_boot,
        sample_size: config.sample_size,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_series_give_degenerate_free_unit_interval() {
        let x: Vec<f64> = (0..100).map(|i| (i % 7) as f64).collect();
        let s = PairedSeries::unlabelled(x.clone(), x).unwrap();
        let r = bootstrap_correlation(&s, CorrelationMethod::KendallTauB, BootstrapConfig { seed: 3, ..Default::default() }).unwrap();
        assert_eq!((r.ci_low, r.ci_high, r.bootstrap_mean, r.point_estimate), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn resample_streams_are_independent_of_order() {
        let a = resample_indices(9, 5, 100, 70);
        let _ = resample_indices(9, 4, 100, 70);
        assert_eq!(a, resample_indices(9, 5, 100, 70));
        assert_ne!(a, resample_indices(9, 6, 100, 70));
        assert!(a.iter().all(|&i| i < 100));
    }

    #[test]
    fn constant_resamples_are_skipped() {
        // two distinct values among 100: small resamples are often constant
        let mut x = vec![0.0; 100];
        x[0] = 1.0;
        let s = PairedSeries::unlabelled(x.clone(), x).unwrap();
        let r = bootstrap_correlation(&s, CorrelationMethod::Spearman, BootstrapConfig { n_boot: 200, sample_size: 5, seed: 1 }).unwrap();
        assert!(r.skipped > 0);
        assert_eq!(r.bootstrap_mean, 1.0);
    }

    #[test]
    fn percentile_interpolates() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.5), 2.0);
        assert_eq!(percentile(&v, 0.025), 0.1);
        assert_eq!(percentile(&v, 1.0), 4.0);
    }
}
