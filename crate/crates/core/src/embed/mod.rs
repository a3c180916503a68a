//! Word embeddings trained with negative sampling, compass training,
//! nearest neighbours and model files.

mod io;
mod sgns;
mod train;
mod vocab;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalar::{dot, Scalar};

pub use io::{load_model, read_model, save_model, write_model, write_text, MAGIC, VERSION};
pub use sgns::{example_gradient, example_loss, sgd_step, ExampleGradient, Freeze, Rows};
pub use train::{derive_seed, train, train_compass, Architecture, CompassModels, TrainConfig, TrainReport, Trained};
pub use vocab::Vocabulary;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("effective vocabulary is empty")]
    EmptyVocabulary,
    #[error("only {tokens} tokens after min-count filtering, need at least {needed}")]
    TooFewTokens { tokens: usize, needed: usize },
    #[error("compass training needs at least 2 slices, got {0}")]
    TooFewSlices(usize),
    #[error("slice {0:?} has no tokens")]
    EmptySlice(String),
    #[error("slice {0:?} shares no vocabulary with the compass")]
    EmptySliceVocabulary(String),
    #[error("duplicate slice id {0:?}")]
    DuplicateSlice(String),
    #[error("word {0:?} is not in the vocabulary")]
    OutOfVocabulary(String),
    #[error("word {0:?} was removed by the vocabulary filter")]
    FilteredOut(String),
    #[error("cosine similarity of a zero vector")]
    ZeroVector,
    #[error("vector lengths differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The two matrices learned by word2vec. `Target` rows are the input
/// vectors of a word, `Context` rows its output vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MatrixRole {
    #[default]
    Target,
    Context,
}

impl MatrixRole {
    pub fn other(self) -> Self {
        match self {
            MatrixRole::Target => MatrixRole::Context,
            MatrixRole::Context => MatrixRole::Target,
        }
    }
}

impl fmt::Display for MatrixRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixRole::Target => "target",
            MatrixRole::Context => "context",
        })
    }
}

impl FromStr for MatrixRole {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "target" => Ok(MatrixRole::Target),
            "context" => Ok(MatrixRole::Context),
            other => Err(format!("unknown matrix role {other:?}")),
        }
    }
}

/// Vocabulary, counts and both embedding matrices for one time slice.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel<F> {
    vocab: Vocabulary,
    target: Matrix<F>,
    context: Matrix<F>,
    slice_id: String,
    seed: u64,
}

impl<F: Scalar> EmbeddingModel<F> {
    pub fn new(
        vocab: Vocabulary,
        target: Matrix<F>,
        context: Matrix<F>,
        slice_id: impl Into<String>,
        seed: u64,
    ) -> Result<Self, EmbedError> {
        let dim = target.cols();
        if dim == 0 {
            return Err(EmbedError::InvalidModel("dimension must be at least 1".into()));
        }
        if context.cols() != dim {
            return Err(EmbedError::InvalidModel("target and context widths differ".into()));
        }
        if target.rows() != vocab.len() || context.rows() != vocab.len() {
            return Err(EmbedError::InvalidModel(format!(
                "{} words but matrices have {} and {} rows",
                vocab.len(),
                target.rows(),
                context.rows()
            )));
        }
        Ok(Self {
            vocab,
            target,
            context,
            slice_id: slice_id.into(),
            seed,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.target.cols()
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn slice_id(&self) -> &str {
        &self.slice_id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_slice_id(mut self, id: impl Into<String>) -> Self {
        self.slice_id = id.into();
        self
    }

    pub fn target(&self) -> &Matrix<F> {
        &self.target
    }

    pub fn context(&self) -> &Matrix<F> {
        &self.context
    }

    pub fn matrix(&self, role: MatrixRole) -> &Matrix<F> {
        match role {
            MatrixRole::Target => &self.target,
            MatrixRole::Context => &self.context,
        }
    }

    /// Replaces one matrix, keeping shape.
    pub fn with_matrix(mut self, role: MatrixRole, m: Matrix<F>) -> Result<Self, EmbedError> {
        if m.rows() != self.len() || m.cols() != self.dim() {
            return Err(EmbedError::InvalidModel(format!(
                "replacement matrix is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                self.len(),
                self.dim()
            )));
        }
        match role {
            MatrixRole::Target => self.target = m,
            MatrixRole::Context => self.context = m,
        }
        Ok(self)
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.vocab.count_of(word)
    }

    pub fn vector(&self, word: &str, role: MatrixRole) -> Result<&[F], EmbedError> {
        let i = self
            .vocab
            .index_of(word)
            .ok_or_else(|| EmbedError::OutOfVocabulary(word.to_string()))?;
        Ok(self.matrix(role).row(i))
    }

    pub fn cast<G: Scalar>(&self) -> EmbeddingModel<G> {
        EmbeddingModel {
            vocab: self.vocab.clone(),
            target: self.target.cast(),
            context: self.context.cast(),
            slice_id: self.slice_id.clone(),
            seed: self.seed,
        }
    }
}

/// Cosine similarity, clamped to `[-1, 1]`.
///
/// Computed as `u·v / sqrt(|u|²|v|²)`, so `cos(u, u)` is exactly 1.
pub fn cosine_similarity<F: Scalar>(u: &[F], v: &[F]) -> Result<F, EmbedError> {
    if u.len() != v.len() {
        return Err(EmbedError::DimensionMismatch(u.len(), v.len()));
    }
    let (uu, vv) = (dot(u, u), dot(v, v));
    if uu == F::zero() || vv == F::zero() {
        return Err(EmbedError::ZeroVector);
    }
    let c = dot(u, v) / (uu * vv).sqrt();
    Ok(c.max(-F::one()).min(F::one()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor<F> {
    pub word: String,
    pub index: usize,
    pub similarity: F,
}

/// Unit-length copy of one model matrix for repeated neighbour queries.
#[derive(Debug, Clone)]
pub struct WordSpace<'a, F> {
    model: &'a EmbeddingModel<F>,
    role: MatrixRole,
    unit: Matrix<F>,
}

impl<'a, F: Scalar> WordSpace<'a, F> {
    pub fn new(model: &'a EmbeddingModel<F>, role: MatrixRole) -> Self {
        let mut unit = model.matrix(role).clone();
        unit.normalize_rows();
        Self { model, role, unit }
    }

    pub fn model(&self) -> &'a EmbeddingModel<F> {
        self.model
    }

    pub fn role(&self) -> MatrixRole {
        self.role
    }

    pub fn unit(&self, i: usize) -> &[F] {
        self.unit.row(i)
    }

    /// Cosine between two vocabulary entries of this space.
    pub fn similarity(&self, i: usize, j: usize) -> F {
        dot(self.unit.row(i), self.unit.row(j))
    }

    pub fn index(&self, word: &str) -> Result<usize, EmbedError> {
        self.model
            .vocab()
            .index_of(word)
            .ok_or_else(|| EmbedError::OutOfVocabulary(word.to_string()))
    }

    /// Top-`k` neighbours of `word`, optionally restricted to entries whose
    /// `mask` flag is set. The query itself is never returned.
    pub fn neighbors(&self, word: &str, k: usize, mask: Option<&[bool]>) -> Result<Vec<Neighbor<F>>, EmbedError> {
        let q = self.index(word)?;
        if let Some(m) = mask {
            if !m[q] {
                return Err(EmbedError::FilteredOut(word.to_string()));
            }
        }
        self.neighbors_of_index(q, k, mask)
    }

    pub fn neighbors_of_index(
        &self,
        q: usize,
        k: usize,
        mask: Option<&[bool]>,
    ) -> Result<Vec<Neighbor<F>>, EmbedError> {
        if k == 0 {
            return Err(EmbedError::InvalidK);
        }
        let query = self.unit.row(q);
        let mut scored: Vec<(F, usize)> = (0..self.model.len())
            .filter(|&i| i != q && mask.is_none_or(|m| m[i]))
            .map(|i| (dot(query, self.unit.row(i)), i))
            .collect();
        let by_rank =
            |a: &(F, usize), b: &(F, usize)| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1));
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, by_rank);
            scored.truncate(k);
        }
        scored.sort_by(by_rank);
        Ok(scored
            .into_iter()
            .map(|(s, i)| Neighbor {
                word: self.model.vocab().word(i).to_string(),
                index: i,
                similarity: s,
            })
            .collect())
    }
}

/// Top-`k` neighbours of `word` by cosine, descending, ties broken by
/// vocabulary order.
pub fn nearest_neighbors<F: Scalar>(
    model: &EmbeddingModel<F>,
    word: &str,
    k: usize,
    restrict: Option<&BTreeSet<String>>,
    role: MatrixRole,
) -> Result<Vec<Neighbor<F>>, EmbedError> {
    let space = WordSpace::new(model, role);
    let mask: Option<Vec<bool>> = restrict.map(|set| model.vocab().words().iter().map(|w| set.contains(w)).collect());
    space.neighbors(word, k, mask.as_deref())
}
