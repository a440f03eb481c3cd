//! Small statistics helpers for the Monte Carlo checks.

use serde::{Deserialize, Serialize};

/// Binomial standard error `sqrt(p (1 - p) / n)` at the hypothesised `p`.
pub fn binomial_se(p: f64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// One-sided check of an observed frequency against a lower bound `p0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyCheck {
    pub trials: u64,
    pub hits: u64,
    pub frequency: f64,
    pub expected_min: f64,
    pub se: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl FrequencyCheck {
    /// Passes iff `hits / trials >= p0 - z * se(p0)`.
    pub fn at_least(hits: u64, trials: u64, p0: f64, z: f64) -> Self {
        let frequency = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        let se = binomial_se(p0, trials);
        let threshold = p0 - z * se;
        Self { trials, hits, frequency, expected_min: p0, se, threshold, pass: trials > 0 && frequency >= threshold }
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub n: u64,
    pub mean: f64,
    pub se: f64,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Self { n: 0, mean: f64::NAN, se: f64::INFINITY };
        }
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Self { n: xs.len() as u64, mean, se: (var / n).sqrt() }
    }
}
