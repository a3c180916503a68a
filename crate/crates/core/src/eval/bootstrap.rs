use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EvalError;

/// Linear-interpolation quantile of sorted data (`p` in `[0, 1]`).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap interval for the mean of `samples`.
///
/// Draws `resamples` resamples with replacement from a generator seeded
/// with `seed` and returns the `(1 − level)/2` and `(1 + level)/2`
/// quantiles of their means.
pub fn bootstrap_ci(samples: &[f64], level: f64, resamples: usize, seed: u64) -> Result<(f64, f64), EvalError> {
    if samples.len() < 2 {
        return Err(EvalError::TooFewSamples(samples.len()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(EvalError::InvalidConfig(format!(
            "confidence level {level} not in (0, 1)"
        )));
    }
    if resamples == 0 {
        return Err(EvalError::InvalidConfig("resamples must be at least 1".into()));
    }
    let n = samples.len();
    if samples.iter().all(|&x| x == samples[0]) {
        return Ok((samples[0], samples[0]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| samples[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok((quantile(&means, tail), quantile(&means, 1.0 - tail)))
}
