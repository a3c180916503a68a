use std::collections::HashSet;
use std::marker::PhantomData;

use rayon::prelude::*;
use serde::Serialize;

use super::{bootstrap_ci, EvalError};
use crate::detect::{detect_change, ChangeConfig};
use crate::embed::TrainConfig;
use crate::scalar::Scalar;

pub const DEFAULT_K_LIST: [usize; 7] = [10, 20, 50, 100, 200, 500, 1000];

/// `|top_k(a) ∩ top_k(b)| / k`.
pub fn intersection_at_k<S: AsRef<str>>(a: &[S], b: &[S], k: usize) -> Result<f64, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidK);
    }
    for list in [a, b] {
        if list.len() < k {
            return Err(EvalError::TooShort { len: list.len(), k });
        }
    }
    fn top<S: AsRef<str>>(l: &[S], k: usize) -> Result<HashSet<&str>, EvalError> {
        let mut set = HashSet::with_capacity(k);
        for w in &l[..k] {
            if !set.insert(w.as_ref()) {
                return Err(EvalError::DuplicateEntry(w.as_ref().to_string()));
            }
        }
        Ok(set)
    }
    let (ta, tb) = (top(a, k)?, top(b, k)?);
    Ok(ta.intersection(&tb).count() as f64 / k as f64)
}

pub type DetectorError = Box<dyn std::error::Error + Send + Sync>;

/// Anything that produces a most-changed-first word list for a seed.
pub trait ChangeDetector: Sync {
    fn label(&self) -> String;
    fn ranking(&self, seed: u64) -> Result<Vec<String>, DetectorError>;
}

/// Retrains and rescores a slice pair for every seed.
pub struct PipelineDetector<'a, S, F = f32> {
    pub a: (&'a str, &'a [S]),
    pub b: (&'a str, &'a [S]),
    pub train: TrainConfig,
    pub change: ChangeConfig,
    _scalar: PhantomData<F>,
}

impl<'a, S, F> PipelineDetector<'a, S, F> {
    pub fn new(a: (&'a str, &'a [S]), b: (&'a str, &'a [S]), train: TrainConfig, change: ChangeConfig) -> Self {
        Self {
            a,
            b,
            train,
            change,
            _scalar: PhantomData,
        }
    }
}

impl<S: AsRef<str> + Sync, F: Scalar> ChangeDetector for PipelineDetector<'_, S, F> {
    fn label(&self) -> String {
        self.change.method.to_string()
    }

    fn ranking(&self, seed: u64) -> Result<Vec<String>, DetectorError> {
        let train = TrainConfig {
            seed,
            ..self.train.clone()
        };
        let d = detect_change::<F, S>(self.a, self.b, &train, &self.change)?;
        Ok(d.ranking.order())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityConfig {
    pub n_runs: usize,
    pub k_list: Vec<usize>,
    /// Run `i` uses seed `base_seed + i`.
    pub base_seed: u64,
    pub bootstrap_resamples: usize,
    pub level: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            n_runs: 10,
            k_list: DEFAULT_K_LIST.to_vec(),
            base_seed: 0,
            bootstrap_resamples: 10_000,
            level: 0.95,
        }
    }
}

impl StabilityConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.n_runs < 2 {
            return Err(EvalError::InvalidConfig("n_runs must be at least 2".into()));
        }
        if self.k_list.is_empty() || self.k_list[0] == 0 || self.k_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EvalError::InvalidConfig(
                "k list must be positive and strictly ascending".into(),
            ));
        }
        Ok(())
    }

    pub fn pair_count(&self) -> usize {
        self.n_runs * (self.n_runs - 1) / 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    pub k: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub method: String,
    pub n_runs: usize,
    pub seeds: Vec<u64>,
    pub rows: Vec<StabilityRow>,
    /// k values longer than the shortest ranking.
    pub skipped_k: Vec<usize>,
    /// Each run's top list, cut at the largest evaluated k.
    pub top_lists: Vec<Vec<String>>,
}

/// Runs the detector once per seed and measures pairwise top-k overlap.
pub fn run_stability<D: ChangeDetector + ?Sized>(
    detector: &D,
    config: &StabilityConfig,
) -> Result<StabilityReport, EvalError> {
    config.validate()?;
    let seeds: Vec<u64> = (0..config.n_runs as u64).map(|i| config.base_seed + i).collect();
    let results: Vec<Result<Vec<String>, DetectorError>> = seeds.par_iter().map(|&s| detector.ranking(s)).collect();
    let mut runs = Vec::with_capacity(seeds.len());
    for (seed, r) in seeds.iter().zip(results) {
        runs.push(r.map_err(|e| EvalError::RunFailed {
            seed: *seed,
            message: e.to_string(),
        })?);
    }
    let shortest = runs.iter().map(Vec::len).min().unwrap_or(0);
    let mut rows = Vec::new();
    let mut skipped_k = Vec::new();
    for &k in &config.k_list {
        if k > shortest {
            skipped_k.push(k);
            continue;
        }
        let mut values = Vec::with_capacity(config.pair_count());
        for i in 0..runs.len() {
            for j in i + 1..runs.len() {
                values.push(intersection_at_k(&runs[i], &runs[j], k)?);
            }
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let (ci_low, ci_high) = bootstrap_ci(&values, config.level, config.bootstrap_resamples, config.base_seed)?;
        rows.push(StabilityRow {
            k,
            mean,
            ci_low,
            ci_high,
            pairs: values.len(),
        });
    }
    if !skipped_k.is_empty() {
        log::warn!("skipped k = {skipped_k:?}: shortest ranking has {shortest} words");
    }
    let keep = rows.last().map_or(0, |r| r.k);
    Ok(StabilityReport {
        method: detector.label(),
        n_runs: config.n_runs,
        seeds,
        rows,
        skipped_k,
        top_lists: runs
            .into_iter()
            .map(|mut r| {
                r.truncate(keep);
                r
            })
            .collect(),
    })
}
