//! Word-usage change scores and rankings for a pair of slices.
//!
//! Every score reads "higher = more change": `1 − cosine` for the
//! vector-based methods (range `[0, 2]`) and `1 − intersection@k` for the
//! neighbour method (range `[0, 1]`).

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::align::{align_models, AlignError, AlignOptions, AlignmentResult};
use crate::embed::{
    cosine_similarity, derive_seed, train, train_compass, Architecture, EmbedError, EmbeddingModel, MatrixRole,
    TrainConfig, Vocabulary, WordSpace,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChangeMethod {
    Procrustes,
    Compass,
    CompassCutoff,
    Nn,
    SecondOrder,
}

impl ChangeMethod {
    pub const ALL: [ChangeMethod; 5] = [
        ChangeMethod::Procrustes,
        ChangeMethod::Compass,
        ChangeMethod::CompassCutoff,
        ChangeMethod::Nn,
        ChangeMethod::SecondOrder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChangeMethod::Procrustes => "procrustes",
            ChangeMethod::Compass => "compass",
            ChangeMethod::CompassCutoff => "compass_cutoff",
            ChangeMethod::Nn => "nn",
            ChangeMethod::SecondOrder => "second_order",
        }
    }

    /// Candidates come from the frequency-cutoff vocabulary.
    pub fn uses_cutoffs(self) -> bool {
        matches!(self, ChangeMethod::CompassCutoff | ChangeMethod::Nn)
    }

    pub fn uses_compass(self) -> bool {
        matches!(self, ChangeMethod::Compass | ChangeMethod::CompassCutoff)
    }

    /// Scores are `1 − cosine` of a word's two vectors.
    pub fn is_cosine(self) -> bool {
        matches!(
            self,
            ChangeMethod::Procrustes | ChangeMethod::Compass | ChangeMethod::CompassCutoff
        )
    }

    /// Training defaults: CBOW for compass methods, skip-gram otherwise.
    pub fn default_train_config(self) -> TrainConfig {
        if self.uses_compass() {
            TrainConfig::compass()
        } else {
            TrainConfig {
                architecture: Architecture::SkipGram,
                ..TrainConfig::default()
            }
        }
    }
}

impl fmt::Display for ChangeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChangeMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        ChangeMethod::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChangeConfig {
    pub method: ChangeMethod,
    /// Neighbourhood size for `nn` and `second_order`.
    pub neighbor_k: usize,
    /// Number of most frequent words removed by the cutoffs.
    pub top_freq_cut: usize,
    /// Words rarer than this are removed by the cutoffs.
    pub min_freq_cut: u64,
    /// Candidate threshold (either slice) for methods without cutoffs.
    pub candidate_min_occurrences: u64,
}

impl Default for ChangeConfig {
    fn default() -> Self {
        Self {
            method: ChangeMethod::Compass,
            neighbor_k: 1000,
            top_freq_cut: 200,
            min_freq_cut: 200,
            candidate_min_occurrences: 50,
        }
    }
}

impl ChangeConfig {
    pub fn validate(&self) -> Result<(), DetectError> {
        if self.neighbor_k == 0 {
            return Err(DetectError::InvalidConfig("neighbor_k must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DetectError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error("invalid change configuration: {0}")]
    InvalidConfig(String),
    #[error("word {word:?} is not in the vocabulary of slice {slice:?}")]
    MissingWord { word: String, slice: String },
    #[error("word {0:?} was removed by the frequency cutoffs")]
    FilteredOut(String),
    #[error("frequency cutoffs leave no words")]
    EmptyFilter,
    #[error("word {word:?} has {available} candidate neighbours, need k = {k}")]
    TooFewNeighbors { word: String, available: usize, k: usize },
    #[error("neighbourhood of {0:?} has fewer than 2 words")]
    NeighborhoodTooSmall(String),
    #[error("no candidate words to rank")]
    NoCandidates,
}

/// Vocabulary flags after removing the `top_cut` most frequent entries
/// (ties by vocabulary order) and entries counted fewer than `min_cut`
/// times.
pub fn cutoff_mask(vocab: &Vocabulary, top_cut: usize, min_cut: u64) -> Vec<bool> {
    // Vocabulary order is already count-descending with a stable tie order.
    vocab
        .counts()
        .iter()
        .enumerate()
        .map(|(i, &c)| i >= top_cut && c >= min_cut)
        .collect()
}

pub fn apply_frequency_cutoffs<F: Scalar>(
    model: &EmbeddingModel<F>,
    top_cut: usize,
    min_cut: u64,
) -> Result<BTreeSet<String>, DetectError> {
    let mask = cutoff_mask(model.vocab(), top_cut, min_cut);
    let kept: BTreeSet<String> = model
        .vocab()
        .words()
        .iter()
        .zip(&mask)
        .filter(|(_, &k)| k)
        .map(|(w, _)| w.clone())
        .collect();
    if kept.is_empty() {
        return Err(DetectError::EmptyFilter);
    }
    Ok(kept)
}

/// Shared vocabulary and unit-vector views of two models, reused across
/// many scored words.
pub struct PairScorer<'a, F> {
    a: WordSpace<'a, F>,
    b: WordSpace<'a, F>,
    role: MatrixRole,
    a_to_b: Vec<Option<usize>>,
    b_to_a: Vec<Option<usize>>,
    shared_a: Vec<bool>,
    shared_b: Vec<bool>,
    /// Shared and surviving the cutoffs in both models.
    filtered: Option<(Vec<bool>, Vec<bool>)>,
}

impl<'a, F: Scalar> PairScorer<'a, F> {
    pub fn new(a: &'a EmbeddingModel<F>, b: &'a EmbeddingModel<F>, role: MatrixRole) -> Self {
        let a_to_b: Vec<Option<usize>> = a.vocab().words().iter().map(|w| b.vocab().index_of(w)).collect();
        let mut b_to_a = vec![None; b.len()];
        for (i, j) in a_to_b.iter().enumerate() {
            if let Some(j) = *j {
                b_to_a[j] = Some(i);
            }
        }
        Self {
            shared_a: a_to_b.iter().map(Option::is_some).collect(),
            shared_b: b_to_a.iter().map(Option::is_some).collect(),
            a: WordSpace::new(a, role),
            b: WordSpace::new(b, role),
            role,
            a_to_b,
            b_to_a,
            filtered: None,
        }
    }

    /// Applies frequency cutoffs to each model's vocabulary.
    pub fn with_cutoffs(mut self, top_cut: usize, min_cut: u64) -> Result<Self, DetectError> {
        let fa = cutoff_mask(self.a.model().vocab(), top_cut, min_cut);
        let fb = cutoff_mask(self.b.model().vocab(), top_cut, min_cut);
        let ma: Vec<bool> = (0..fa.len())
            .map(|i| fa[i] && self.a_to_b[i].is_some_and(|j| fb[j]))
            .collect();
        let mb: Vec<bool> = (0..fb.len())
            .map(|j| fb[j] && self.b_to_a[j].is_some_and(|i| fa[i]))
            .collect();
        if !ma.iter().any(|&x| x) {
            return Err(DetectError::EmptyFilter);
        }
        self.filtered = Some((ma, mb));
        Ok(self)
    }

    pub fn model_a(&self) -> &'a EmbeddingModel<F> {
        self.a.model()
    }

    pub fn model_b(&self) -> &'a EmbeddingModel<F> {
        self.b.model()
    }

    fn indices(&self, word: &str) -> Result<(usize, usize), DetectError> {
        let missing = |m: &EmbeddingModel<F>| DetectError::MissingWord {
            word: word.to_string(),
            slice: m.slice_id().to_string(),
        };
        let ia = self
            .a
            .model()
            .vocab()
            .index_of(word)
            .ok_or_else(|| missing(self.a.model()))?;
        let ib = self
            .b
            .model()
            .vocab()
            .index_of(word)
            .ok_or_else(|| missing(self.b.model()))?;
        Ok((ia, ib))
    }

    fn check_filtered(&self, word: &str, ia: usize) -> Result<(), DetectError> {
        match &self.filtered {
            Some((ma, _)) if !ma[ia] => Err(DetectError::FilteredOut(word.to_string())),
            _ => Ok(()),
        }
    }

    /// `1 − cos` of the word's raw vectors.
    pub fn cosine_change(&self, word: &str) -> Result<f64, DetectError> {
        let (ia, ib) = self.indices(word)?;
        self.check_filtered(word, ia)?;
        let u = self.a.model().matrix(self.role).row(ia);
        let v = self.b.model().matrix(self.role).row(ib);
        Ok(1.0 - cosine_similarity(u, v)?.to_f64_lossy())
    }

    /// `1 − |top_k(a) ∩ top_k(b)| / k`, neighbours drawn from the shared
    /// vocabulary (cutoff-filtered when cutoffs are set).
    pub fn nn_change(&self, word: &str, k: usize) -> Result<f64, DetectError> {
        let (ia, ib) = self.indices(word)?;
        self.check_filtered(word, ia)?;
        let (ma, mb) = match &self.filtered {
            Some((ma, mb)) => (ma.as_slice(), mb.as_slice()),
            None => (self.shared_a.as_slice(), self.shared_b.as_slice()),
        };
        let available = ma.iter().enumerate().filter(|&(i, &m)| m && i != ia).count();
        if available < k {
            return Err(DetectError::TooFewNeighbors {
                word: word.to_string(),
                available,
                k,
            });
        }
        let na: BTreeSet<usize> = self
            .a
            .neighbors_of_index(ia, k, Some(ma))?
            .into_iter()
            .map(|n| n.index)
            .collect();
        let shared = self
            .b
            .neighbors_of_index(ib, k, Some(mb))?
            .into_iter()
            .filter(|n| self.b_to_a[n.index].is_some_and(|i| na.contains(&i)))
            .count();
        Ok(1.0 - shared as f64 / k as f64)
    }

    /// Compares the word's cosine profile over the union of both top-`k`
    /// neighbourhoods (shared vocabulary only).
    pub fn second_order_change(&self, word: &str, k: usize) -> Result<f64, DetectError> {
        let (ia, ib) = self.indices(word)?;
        let mut union: BTreeSet<usize> = self
            .a
            .neighbors_of_index(ia, k, Some(&self.shared_a))?
            .into_iter()
            .map(|n| n.index)
            .collect();
        for n in self.b.neighbors_of_index(ib, k, Some(&self.shared_b))? {
            union.insert(self.b_to_a[n.index].expect("restricted to shared words"));
        }
        if union.len() < 2 {
            return Err(DetectError::NeighborhoodTooSmall(word.to_string()));
        }
        let sa: Vec<F> = union.iter().map(|&n| self.a.similarity(ia, n)).collect();
        let sb: Vec<F> = union
            .iter()
            .map(|&n| self.b.similarity(ib, self.a_to_b[n].expect("shared")))
            .collect();
        Ok(1.0 - cosine_similarity(&sa, &sb)?.to_f64_lossy())
    }

    pub fn score(&self, word: &str, config: &ChangeConfig) -> Result<f64, DetectError> {
        match config.method {
            ChangeMethod::Procrustes | ChangeMethod::Compass | ChangeMethod::CompassCutoff => self.cosine_change(word),
            ChangeMethod::Nn => self.nn_change(word, config.neighbor_k),
            ChangeMethod::SecondOrder => self.second_order_change(word, config.neighbor_k),
        }
    }

    /// Candidate words in model-a vocabulary order.
    pub fn candidates(&self, config: &ChangeConfig) -> Vec<usize> {
        match &self.filtered {
            Some((ma, _)) => (0..ma.len()).filter(|&i| ma[i]).collect(),
            None => (0..self.a_to_b.len())
                .filter(|&i| match self.a_to_b[i] {
                    Some(j) => {
                        let ca = self.a.model().vocab().count(i);
                        let cb = self.b.model().vocab().count(j);
                        ca.max(cb) >= config.candidate_min_occurrences
                    }
                    None => false,
                })
                .collect(),
        }
    }
}

/// `1 − cos` between a word's vectors in an aligned model and a reference.
pub fn score_procrustes<F: Scalar>(
    aligned_a: &EmbeddingModel<F>,
    b: &EmbeddingModel<F>,
    word: &str,
) -> Result<f64, DetectError> {
    PairScorer::new(aligned_a, b, MatrixRole::Target).cosine_change(word)
}

/// `1 − cos` between a word's free vectors in two compass-trained slices.
/// `cutoffs` gives `(top_cut, min_cut)` for the cutoff variant.
pub fn score_compass<F: Scalar>(
    a: &EmbeddingModel<F>,
    b: &EmbeddingModel<F>,
    word: &str,
    free_role: MatrixRole,
    cutoffs: Option<(usize, u64)>,
) -> Result<f64, DetectError> {
    let scorer = PairScorer::new(a, b, free_role);
    let scorer = match cutoffs {
        Some((top, min)) => scorer.with_cutoffs(top, min)?,
        None => scorer,
    };
    scorer.cosine_change(word)
}

pub fn score_nn<F: Scalar>(
    a: &EmbeddingModel<F>,
    b: &EmbeddingModel<F>,
    word: &str,
    k: usize,
    cutoffs: Option<(usize, u64)>,
) -> Result<f64, DetectError> {
    let scorer = PairScorer::new(a, b, MatrixRole::Target);
    let scorer = match cutoffs {
        Some((top, min)) => scorer.with_cutoffs(top, min)?,
        None => scorer,
    };
    scorer.nn_change(word, k)
}

pub fn score_second_order<F: Scalar>(
    a: &EmbeddingModel<F>,
    b: &EmbeddingModel<F>,
    word: &str,
    k: usize,
) -> Result<f64, DetectError> {
    PairScorer::new(a, b, MatrixRole::Target).second_order_change(word, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedWord {
    pub word: String,
    pub score: f64,
    pub count_a: u64,
    pub count_b: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChangeRanking {
    pub method: ChangeMethod,
    pub slices: (String, String),
    /// Descending score; ties keep slice-a vocabulary order.
    pub entries: Vec<RankedWord>,
}

impl ChangeRanking {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn order(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.word.clone()).collect()
    }

    pub fn top(&self, k: usize) -> Vec<&str> {
        self.entries.iter().take(k).map(|e| e.word.as_str()).collect()
    }

    pub fn score(&self, word: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.word == word).map(|e| e.score)
    }

    pub fn rank_of(&self, word: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.word == word).map(|p| p + 1)
    }

    /// Tab-separated `rank word score count_a count_b`. With `similarity`,
    /// cosine methods report `1 − score` (the raw cosine) instead.
    pub fn write_tsv<W: Write>(&self, mut w: W, similarity: bool) -> std::io::Result<()> {
        let as_sim = similarity && self.method.is_cosine();
        let column = if as_sim { "similarity" } else { "score" };
        writeln!(w, "rank\tword\t{column}\tcount_a\tcount_b")?;
        for (i, e) in self.entries.iter().enumerate() {
            let value = if as_sim { 1.0 - e.score } else { e.score };
            writeln!(w, "{}\t{}\t{}\t{}\t{}", i + 1, e.word, value, e.count_a, e.count_b)?;
        }
        Ok(())
    }
}

/// Scores every candidate word and sorts by descending change.
pub fn rank_changed_words<F: Scalar>(
    a: &EmbeddingModel<F>,
    b: &EmbeddingModel<F>,
    role: MatrixRole,
    config: &ChangeConfig,
) -> Result<ChangeRanking, DetectError> {
    config.validate()?;
    let scorer = PairScorer::new(a, b, role);
    let scorer = if config.method.uses_cutoffs() {
        scorer.with_cutoffs(config.top_freq_cut, config.min_freq_cut)?
    } else {
        scorer
    };
    let candidates = scorer.candidates(config);
    if candidates.is_empty() {
        return Err(DetectError::NoCandidates);
    }
    let mut entries = candidates
        .par_iter()
        .map(|&i| {
            let word = a.vocab().word(i);
            let score = scorer.score(word, config)?;
            Ok(RankedWord {
                word: word.to_string(),
                score,
                count_a: a.vocab().count(i),
                count_b: b.count(word).unwrap_or(0),
            })
        })
        .collect::<Result<Vec<_>, DetectError>>()?;
    entries.sort_by(|x, y| y.score.total_cmp(&x.score));
    Ok(ChangeRanking {
        method: config.method,
        slices: (a.slice_id().to_string(), b.slice_id().to_string()),
        entries,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborRow {
    pub word: String,
    pub neighbors_a: Vec<String>,
    pub neighbors_b: Vec<String>,
}

/// Top-`n` neighbours of each word in both slices.
pub fn neighbor_report<F: Scalar>(
    a: &EmbeddingModel<F>,
    b: &EmbeddingModel<F>,
    role: MatrixRole,
    words: &[&str],
    n: usize,
) -> Result<Vec<NeighborRow>, DetectError> {
    let sa = WordSpace::new(a, role);
    let sb = WordSpace::new(b, role);
    words
        .iter()
        .map(|&w| {
            let names = |s: &WordSpace<'_, F>| -> Result<Vec<String>, DetectError> {
                Ok(s.neighbors(w, n, None)?.into_iter().map(|x| x.word).collect())
            };
            Ok(NeighborRow {
                word: w.to_string(),
                neighbors_a: names(&sa)?,
                neighbors_b: names(&sb)?,
            })
        })
        .collect()
}

pub fn write_neighbor_report<W: Write>(rows: &[NeighborRow], slices: (&str, &str), mut w: W) -> std::io::Result<()> {
    writeln!(w, "word\t{}\t{}", slices.0, slices.1)?;
    for r in rows {
        writeln!(
            w,
            "{}\t{}\t{}",
            r.word,
            r.neighbors_a.join(", "),
            r.neighbors_b.join(", ")
        )?;
    }
    Ok(())
}

/// Models and ranking produced by [`detect_change`].
#[derive(Debug, Clone)]
pub struct Detection<F> {
    pub ranking: ChangeRanking,
    pub model_a: EmbeddingModel<F>,
    pub model_b: EmbeddingModel<F>,
    /// Matrix the scores were read from.
    pub role: MatrixRole,
    pub alignment: Option<AlignmentResult<F>>,
}

/// Trains what `change.method` needs on two slices and ranks their words.
///
/// Compass methods train both slices jointly; the others train one model
/// per slice, slice `a` with `train.seed` and slice `b` with
/// `derive_seed(train.seed, 1)`. Procrustes then rotates `a` onto `b`.
pub fn detect_change<F: Scalar, S: AsRef<str> + Sync>(
    a: (&str, &[S]),
    b: (&str, &[S]),
    train_config: &TrainConfig,
    change: &ChangeConfig,
) -> Result<Detection<F>, DetectError> {
    change.validate()?;
    let (model_a, model_b, role, alignment) = if change.method.uses_compass() {
        let slices = vec![
            (a.0.to_string(), a.1.iter().map(|t| t.as_ref()).collect::<Vec<_>>()),
            (b.0.to_string(), b.1.iter().map(|t| t.as_ref()).collect::<Vec<_>>()),
        ];
        let models = train_compass::<F, _>(&slices, train_config)?;
        let role = models.free_role();
        let mut it = models.slices.into_iter();
        let ma = it.next().expect("two slices");
        let mb = it.next().expect("two slices");
        (ma, mb, role, None)
    } else {
        let config_b = TrainConfig {
            seed: derive_seed(train_config.seed, 1),
            ..train_config.clone()
        };
        let (ra, rb) = rayon::join(|| train::<F, _>(a.1, train_config), || train::<F, _>(b.1, &config_b));
        let ma = ra?.model.with_slice_id(a.0);
        let mb = rb?.model.with_slice_id(b.0);
        if change.method == ChangeMethod::Procrustes {
            let (aligned, result) = align_models(&ma, &mb, AlignOptions::default())?;
            (aligned, mb, MatrixRole::Target, Some(result))
        } else {
            (ma, mb, MatrixRole::Target, None)
        }
    };
    let ranking = rank_changed_words(&model_a, &model_b, role, change)?;
    Ok(Detection {
        ranking,
        model_a,
        model_b,
        role,
        alignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn model(words: &[(&str, u64)], rows: &[&[f64]], id: &str) -> EmbeddingModel<f64> {
        let vocab = Vocabulary::from_ordered(words.iter().map(|&(w, c)| (w.to_string(), c)).collect()).unwrap();
        let m = Matrix::from_rows(rows);
        EmbeddingModel::new(vocab, m.clone(), m, id, 0).unwrap()
    }

    #[test]
    fn method_names_round_trip() {
        for m in ChangeMethod::ALL {
            assert_eq!(m.name().parse::<ChangeMethod>().unwrap(), m);
        }
        assert_eq!(
            "second-order".parse::<ChangeMethod>().unwrap(),
            ChangeMethod::SecondOrder
        );
        assert!("bert".parse::<ChangeMethod>().is_err());
    }

    #[test]
    fn cutoffs() {
        let words: Vec<(String, u64)> = (0..300).map(|i| (format!("w{i:03}"), 1000 - i as u64)).collect();
        let vocab = Vocabulary::from_ordered(words).unwrap();
        assert_eq!(cutoff_mask(&vocab, 0, 0).iter().filter(|&&x| x).count(), 300);
        assert_eq!(cutoff_mask(&vocab, 200, 0).iter().filter(|&&x| x).count(), 100);
        assert_eq!(cutoff_mask(&vocab, 0, 901).iter().filter(|&&x| x).count(), 100);
        let m = model(&[("a", 5)], &[&[1.0]], "x");
        assert!(matches!(
            apply_frequency_cutoffs(&m, 1, 0),
            Err(DetectError::EmptyFilter)
        ));
    }

    #[test]
    fn antipodal_and_missing() {
        let a = model(&[("x", 3), ("y", 2)], &[&[1.0, 0.0], &[0.0, 1.0]], "a");
        let b = model(&[("x", 3)], &[&[-1.0, 0.0]], "b");
        assert_eq!(score_procrustes(&a, &b, "x").unwrap(), 2.0);
        assert!(matches!(
            score_procrustes(&a, &b, "y"),
            Err(DetectError::MissingWord { slice, .. }) if slice == "b"
        ));
    }

    #[test]
    fn compass_cutoff_filters() {
        let a = model(&[("x", 300), ("y", 10)], &[&[1.0, 0.0], &[0.0, 1.0]], "a");
        assert!(matches!(
            score_compass(&a, &a, "y", MatrixRole::Context, Some((0, 200))),
            Err(DetectError::FilteredOut(_))
        ));
        assert_eq!(
            score_compass(&a, &a, "x", MatrixRole::Context, Some((0, 200))).unwrap(),
            0.0
        );
    }

    #[test]
    fn nn_needs_enough_neighbors() {
        let a = model(&[("x", 3), ("y", 2)], &[&[1.0, 0.0], &[0.0, 1.0]], "a");
        assert!(matches!(
            score_nn(&a, &a, "x", 2, None),
            Err(DetectError::TooFewNeighbors { available: 1, .. })
        ));
        assert_eq!(score_nn(&a, &a, "x", 1, None).unwrap(), 0.0);
        assert!(matches!(
            score_second_order(&a, &a, "x", 5),
            Err(DetectError::NeighborhoodTooSmall(_))
        ));
    }

    #[test]
    fn identical_models_rank_in_vocab_order() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![1.0, i as f64, (i * i) as f64 - 3.0]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let words: Vec<(String, u64)> = (0..6).map(|i| (format!("w{i}"), 100 - i)).collect();
        let wr: Vec<(&str, u64)> = words.iter().map(|(w, c)| (w.as_str(), *c)).collect();
        let m = model(&wr, &refs, "a");
        for method in ChangeMethod::ALL {
            let config = ChangeConfig {
                method,
                neighbor_k: 3,
                top_freq_cut: 0,
                min_freq_cut: 0,
                candidate_min_occurrences: 0,
            };
            let r = rank_changed_words(&m, &m, MatrixRole::Target, &config).unwrap();
            assert!(r.entries.iter().all(|e| e.score == 0.0), "{method}");
            assert_eq!(r.top(6), ["w0", "w1", "w2", "w3", "w4", "w5"]);
        }
    }

    #[test]
    fn tsv_output() {
        let r = ChangeRanking {
            method: ChangeMethod::Compass,
            slices: ("a".into(), "b".into()),
            entries: vec![RankedWord {
                word: "κούρεμα".into(),
                score: 1.25,
                count_a: 60,
                count_b: 70,
            }],
        };
        let mut out = Vec::new();
        r.write_tsv(&mut out, true).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "rank\tword\tsimilarity\tcount_a\tcount_b\n1\tκούρεμα\t-0.25\t60\t70\n"
        );
    }
}
