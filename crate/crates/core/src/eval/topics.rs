use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::{bootstrap_ci, EvalError};
use crate::embed::{cosine_similarity, train_compass, TrainConfig, WordSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct TrackConfig {
    pub n_seeds: usize,
    /// Run `j` trains with seed `base_seed + j`.
    pub base_seed: u64,
    /// Compass training settings; its seed is replaced per run.
    pub train: TrainConfig,
    pub bootstrap_resamples: usize,
    pub level: f64,
    /// Neighbours listed in party reports.
    pub neighbors: usize,
}

impl Default for TrackConfig {
    fn default() -> Self {
        Self {
            n_seeds: 50,
            base_seed: 0,
            train: TrainConfig::compass(),
            bootstrap_resamples: 10_000,
            level: 0.95,
            neighbors: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicRow {
    pub word: String,
    pub pair_index: usize,
    pub slice_a: String,
    pub slice_b: String,
    /// Mean cosine similarity of the word's free vectors over seeds.
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartyNeighbors {
    pub word: String,
    pub slice_a: String,
    pub slice_b: String,
    pub neighbors_a: Vec<String>,
    pub neighbors_b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TopicReport {
    /// Ordered by word, then pair.
    pub rows: Vec<TopicRow>,
    /// `(word, slice_a, slice_b)` for pairs where the word is missing.
    pub absent: Vec<(String, String, String)>,
    pub neighbors: Vec<PartyNeighbors>,
}

impl TopicReport {
    pub fn rows_for<'a>(&'a self, word: &'a str) -> impl Iterator<Item = &'a TopicRow> + 'a {
        self.rows.iter().filter(move |r| r.word == word)
    }

    /// The word's row with the lowest mean similarity.
    pub fn minimum(&self, word: &str) -> Option<&TopicRow> {
        self.rows
            .iter()
            .filter(|r| r.word == word)
            .min_by(|a, b| a.mean.total_cmp(&b.mean))
    }
}

/// Cosine similarity of each word across consecutive slices, averaged over
/// compass retrainings. Low similarity means high usage change.
pub fn track_topics<S: AsRef<str> + Sync>(
    topics: &[String],
    slices: &[(String, Vec<S>)],
    config: &TrackConfig,
) -> Result<TopicReport, EvalError> {
    let (report, missing) = similarity_series(topics, slices, config)?;
    if !missing.is_empty() {
        return Err(EvalError::Absent(missing));
    }
    Ok(report)
}

/// [`track_topics`] for party tags, plus the neighbours of each tag in
/// both slices of its lowest-similarity pair (base-seed run). Tags missing
/// from a pair are reported and skipped there.
pub fn party_drift<S: AsRef<str> + Sync>(
    tags: &[String],
    slices: &[(String, Vec<S>)],
    config: &TrackConfig,
) -> Result<TopicReport, EvalError> {
    let (mut report, missing) = similarity_series(tags, slices, config)?;
    if !missing.is_empty() {
        log::warn!("party tags absent from every pair: {}", missing.join(", "));
    }
    let mut by_pair: HashMap<usize, Vec<&str>> = HashMap::new();
    for tag in tags {
        if let Some(row) = report.minimum(tag) {
            by_pair.entry(row.pair_index).or_default().push(tag.as_str());
        }
    }
    let mut pairs: Vec<_> = by_pair.into_iter().collect();
    pairs.sort();
    let mut neighbors = Vec::new();
    for (p, words) in pairs {
        let pair = pair_slices(slices, p);
        let train = TrainConfig {
            seed: config.base_seed,
            ..config.train.clone()
        };
        let models = train_compass::<f32, _>(&pair, &train)?;
        let role = models.free_role();
        let (sa, sb) = (
            WordSpace::new(&models.slices[0], role),
            WordSpace::new(&models.slices[1], role),
        );
        for w in words {
            let names = |s: &WordSpace<'_, f32>| -> Result<Vec<String>, EvalError> {
                Ok(s.neighbors(w, config.neighbors, None)?
                    .into_iter()
                    .map(|n| n.word)
                    .collect())
            };
            neighbors.push(PartyNeighbors {
                word: w.to_string(),
                slice_a: slices[p].0.clone(),
                slice_b: slices[p + 1].0.clone(),
                neighbors_a: names(&sa)?,
                neighbors_b: names(&sb)?,
            });
        }
    }
    neighbors.sort_by(|a, b| a.word.cmp(&b.word));
    report.neighbors = neighbors;
    Ok(report)
}

fn pair_slices<S: AsRef<str>>(slices: &[(String, Vec<S>)], p: usize) -> Vec<(String, Vec<&str>)> {
    slices[p..p + 2]
        .iter()
        .map(|(id, t)| (id.clone(), t.iter().map(AsRef::as_ref).collect()))
        .collect()
}

/// Returns the report and the words missing from every pair.
fn similarity_series<S: AsRef<str> + Sync>(
    words: &[String],
    slices: &[(String, Vec<S>)],
    config: &TrackConfig,
) -> Result<(TopicReport, Vec<String>), EvalError> {
    if slices.len() < 2 {
        return Err(EvalError::TooFewSlices(slices.len()));
    }
    if config.n_seeds < 2 {
        return Err(EvalError::InvalidConfig("n_seeds must be at least 2".into()));
    }
    config.train.validate()?;
    let wanted: BTreeSet<&str> = words.iter().map(String::as_str).collect();
    // A word gets a slice vector when it reaches min_count in that slice.
    let present: Vec<BTreeSet<&str>> = slices
        .iter()
        .map(|(_, tokens)| {
            let mut counts: HashMap<&str, u64> = HashMap::new();
            for t in tokens {
                let t = t.as_ref();
                if wanted.contains(t) {
                    *counts.entry(t).or_default() += 1;
                }
            }
            counts
                .into_iter()
                .filter(|&(_, c)| c >= config.train.min_count)
                .map(|(w, _)| w)
                .collect()
        })
        .collect();
    let n_pairs = slices.len() - 1;
    let mut absent = Vec::new();
    let mut missing = Vec::new();
    let mut tracked: Vec<Vec<usize>> = vec![Vec::new(); n_pairs];
    for (wi, w) in words.iter().enumerate() {
        let mut anywhere = false;
        for (p, pairs) in tracked.iter_mut().enumerate() {
            if present[p].contains(w.as_str()) && present[p + 1].contains(w.as_str()) {
                pairs.push(wi);
                anywhere = true;
            } else {
                absent.push((w.clone(), slices[p].0.clone(), slices[p + 1].0.clone()));
            }
        }
        if !anywhere {
            missing.push(w.clone());
        }
    }

    let jobs: Vec<(usize, usize)> = (0..n_pairs)
        .filter(|&p| !tracked[p].is_empty())
        .flat_map(|p| (0..config.n_seeds).map(move |j| (p, j)))
        .collect();
    let sims: Vec<Result<(usize, Vec<f64>), EvalError>> = jobs
        .par_iter()
        .map(|&(p, j)| {
            let pair = pair_slices(slices, p);
            let train = TrainConfig {
                seed: config.base_seed + j as u64,
                ..config.train.clone()
            };
            let models = train_compass::<f32, _>(&pair, &train)?;
            let role = models.free_role();
            let (a, b) = (&models.slices[0], &models.slices[1]);
            let values = tracked[p]
                .iter()
                .map(|&wi| {
                    let w = &words[wi];
                    let c = cosine_similarity(a.vector(w, role)?, b.vector(w, role)?)?;
                    Ok(c as f64)
                })
                .collect::<Result<Vec<f64>, EvalError>>()?;
            Ok((p, values))
        })
        .collect();
    let mut samples: Vec<Vec<Vec<f64>>> = tracked.iter().map(|t| vec![Vec::new(); t.len()]).collect();
    for r in sims {
        let (p, values) = r?;
        for (slot, v) in samples[p].iter_mut().zip(values) {
            slot.push(v);
        }
    }
    let mut rows = Vec::new();
    for (p, idx) in tracked.iter().enumerate() {
        for (slot, &wi) in idx.iter().enumerate() {
            let values = &samples[p][slot];
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let (ci_low, ci_high) = bootstrap_ci(values, config.level, config.bootstrap_resamples, config.base_seed)?;
            rows.push(TopicRow {
                word: words[wi].clone(),
                pair_index: p,
                slice_a: slices[p].0.clone(),
                slice_b: slices[p + 1].0.clone(),
                mean,
                ci_low,
                ci_high,
                samples: values.len(),
            });
        }
    }
    let order: HashMap<&str, usize> = words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    rows.sort_by_key(|r| (order[r.word.as_str()], r.pair_index));
    Ok((
        TopicReport {
            rows,
            absent,
            neighbors: Vec::new(),
        },
        missing,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absent_topic_is_an_error() {
        let slice: Vec<String> = (0..200).map(|i| format!("w{}", i % 7)).collect();
        let slices = vec![("a".to_string(), slice.clone()), ("b".to_string(), slice)];
        let config = TrackConfig {
            n_seeds: 2,
            bootstrap_resamples: 10,
            train: TrainConfig {
                dim: 4,
                epochs: 1,
                ..TrainConfig::compass()
            },
            ..TrackConfig::default()
        };
        let err = track_topics(&["nowhere".to_string()], &slices, &config).unwrap_err();
        assert!(matches!(err, EvalError::Absent(w) if w == ["nowhere"]));
        let report = party_drift(&["nowhere".to_string(), "w3".to_string()], &slices, &config).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.absent.len(), 1);
        assert_eq!(report.neighbors.len(), 1);
        assert_eq!(report.neighbors[0].neighbors_a.len(), 6);
    }
}
