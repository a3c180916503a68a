use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::marker::PhantomData;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sgns::{sgd_step, Freeze, Rows};
use super::{EmbedError, EmbeddingModel, MatrixRole, Vocabulary};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Architecture {
    #[default]
    SkipGram,
    Cbow,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::SkipGram => "skipgram",
            Architecture::Cbow => "cbow",
        })
    }
}

impl FromStr for Architecture {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "skipgram" | "sg" => Ok(Architecture::SkipGram),
            "cbow" => Ok(Architecture::Cbow),
            other => Err(format!("unknown architecture {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    /// Maximum window radius; each position draws a radius in `1..=window`.
    pub window: usize,
    pub negative: usize,
    pub epochs: usize,
    /// Initial learning rate, decayed linearly over all epochs.
    pub learning_rate: f64,
    /// Floor of the decay, as a fraction of the initial rate.
    pub min_learning_rate_fraction: f64,
    pub min_count: u64,
    /// Frequent-word subsampling threshold; 0 disables.
    pub subsample: f64,
    pub architecture: Architecture,
    pub seed: u64,
    pub workers: usize,
    /// Serialized updates on one worker, bitwise reproducible.
    pub deterministic: bool,
    /// Matrix taken from the compass and frozen in per-slice training.
    pub compass_frozen: MatrixRole,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 100,
            window: 5,
            negative: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate_fraction: 1e-4,
            min_count: 5,
            subsample: 1e-3,
            architecture: Architecture::SkipGram,
            seed: 1,
            workers: 1,
            deterministic: true,
            compass_frozen: MatrixRole::Target,
        }
    }
}

impl TrainConfig {
    /// Defaults for compass training (CBOW).
    pub fn compass() -> Self {
        Self {
            architecture: Architecture::Cbow,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        let positive = [
            ("dim", self.dim),
            ("window", self.window),
            ("negative", self.negative),
            ("epochs", self.epochs),
            ("workers", self.workers),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(EmbedError::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if self.min_count == 0 {
            return Err(EmbedError::InvalidConfig("min_count must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(EmbedError::InvalidConfig("learning rate must be positive".into()));
        }
        if !(self.min_learning_rate_fraction > 0.0 && self.min_learning_rate_fraction <= 1.0) {
            return Err(EmbedError::InvalidConfig(
                "min learning rate fraction must be in (0, 1]".into(),
            ));
        }
        if !(self.subsample.is_finite() && self.subsample >= 0.0) {
            return Err(EmbedError::InvalidConfig("subsample must be non-negative".into()));
        }
        Ok(())
    }

    fn effective_workers(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.workers
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrainReport {
    /// Mean example loss per epoch.
    pub epoch_losses: Vec<f64>,
    pub examples: u64,
    /// Corpus length after min-count filtering.
    pub tokens: usize,
}

#[derive(Debug, Clone)]
pub struct Trained<F> {
    pub model: EmbeddingModel<F>,
    pub report: TrainReport,
}

/// Trains one model on a token sequence.
pub fn train<F: Scalar, S: AsRef<str>>(tokens: &[S], config: &TrainConfig) -> Result<Trained<F>, EmbedError> {
    config.validate()?;
    let vocab = Vocabulary::build(tokens, config.min_count);
    if vocab.is_empty() {
        return Err(EmbedError::EmptyVocabulary);
    }
    let ids = vocab.encode(tokens);
    check_length(ids.len(), config)?;
    let mut target = init_target(vocab.len(), config.dim, config.seed);
    let mut context = Matrix::zeros(vocab.len(), config.dim);
    let report = fit(
        &ids,
        &vocab,
        &mut target,
        &mut context,
        config,
        Freeze::default(),
        config.seed,
    );
    let model = EmbeddingModel::new(vocab, target, context, "", config.seed)?;
    Ok(Trained { model, report })
}

#[derive(Debug, Clone)]
pub struct CompassModels<F> {
    pub compass: EmbeddingModel<F>,
    /// Per-slice models in input order.
    pub slices: Vec<EmbeddingModel<F>>,
    /// Matrix copied from the compass and held fixed in every slice.
    pub frozen: MatrixRole,
    pub compass_report: TrainReport,
    pub slice_reports: Vec<TrainReport>,
}

impl<F: Scalar> CompassModels<F> {
    /// The per-slice matrix that carries usage change.
    pub fn free_role(&self) -> MatrixRole {
        self.frozen.other()
    }

    pub fn slice(&self, id: &str) -> Option<&EmbeddingModel<F>> {
        self.slices.iter().find(|m| m.slice_id() == id)
    }
}

/// Seed for the `index`-th derived training run of a base seed.
pub fn derive_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Two-phase compass training.
///
/// Phase 1 trains one model on the concatenation of all slices. Phase 2
/// trains each slice starting from the compass with the
/// `config.compass_frozen` matrix held fixed; only the other matrix learns.
/// A slice's vocabulary is the compass words reaching `min_count` inside
/// that slice.
pub fn train_compass<F: Scalar, S: AsRef<str>>(
    slices: &[(String, Vec<S>)],
    config: &TrainConfig,
) -> Result<CompassModels<F>, EmbedError> {
    config.validate()?;
    if slices.len() < 2 {
        return Err(EmbedError::TooFewSlices(slices.len()));
    }
    let mut seen = BTreeSet::new();
    for (id, tokens) in slices {
        if !seen.insert(id.as_str()) {
            return Err(EmbedError::DuplicateSlice(id.clone()));
        }
        if tokens.is_empty() {
            return Err(EmbedError::EmptySlice(id.clone()));
        }
    }

    let all: Vec<&str> = slices.iter().flat_map(|(_, t)| t.iter().map(AsRef::as_ref)).collect();
    let Trained {
        model: compass,
        report: compass_report,
    } = train::<F, _>(&all, config)?;
    let compass = compass.with_slice_id("compass");

    let frozen = config.compass_frozen;
    let freeze = Freeze {
        target: frozen == MatrixRole::Target,
        context: frozen == MatrixRole::Context,
    };
    let mut models = Vec::with_capacity(slices.len());
    let mut reports = Vec::with_capacity(slices.len());
    for (s, (id, tokens)) in slices.iter().enumerate() {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for t in tokens {
            let t = t.as_ref();
            if compass.vocab().contains(t) {
                *counts.entry(t).or_default() += 1;
            }
        }
        let vocab = Vocabulary::from_counts(counts.into_iter().filter(|&(_, c)| c >= config.min_count));
        if vocab.is_empty() {
            return Err(EmbedError::EmptySliceVocabulary(id.clone()));
        }
        let ids = vocab.encode(tokens);
        check_length(ids.len(), config)?;
        let rows: Vec<usize> = vocab
            .words()
            .iter()
            .map(|w| compass.vocab().index_of(w).expect("slice words come from the compass"))
            .collect();
        let seed = derive_seed(config.seed, s);
        let fixed = compass.matrix(frozen).select_rows(&rows);
        let (mut target, mut context) = match frozen {
            MatrixRole::Target => (fixed, Matrix::zeros(vocab.len(), config.dim)),
            MatrixRole::Context => (init_target(vocab.len(), config.dim, seed), fixed),
        };
        let report = fit(&ids, &vocab, &mut target, &mut context, config, freeze, seed);
        models.push(EmbeddingModel::new(vocab, target, context, id.clone(), seed)?);
        reports.push(report);
    }
    Ok(CompassModels {
        compass,
        slices: models,
        frozen,
        compass_report,
        slice_reports: reports,
    })
}

fn check_length(len: usize, config: &TrainConfig) -> Result<(), EmbedError> {
    let needed = config.window + 1;
    if len < needed {
        return Err(EmbedError::TooFewTokens { tokens: len, needed });
    }
    Ok(())
}

const INIT_STREAM: u64 = u64::MAX;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform in `[-0.5/dim, 0.5/dim)`.
fn init_target<F: Scalar>(rows: usize, dim: usize, seed: u64) -> Matrix<F> {
    let mut r = rng(seed, INIT_STREAM);
    let scale = 1.0 / dim as f64;
    Matrix::from_fn(rows, dim, |_, _| F::of((r.gen::<f64>() - 0.5) * scale))
}

/// Per-word keep probabilities and the negative-sampling distribution.
struct Plan<'a> {
    keep: Vec<f64>,
    cumulative: Vec<f64>,
    config: &'a TrainConfig,
    freeze: Freeze,
    epochs: usize,
}

impl<'a> Plan<'a> {
    fn new(vocab: &Vocabulary, corpus_len: usize, config: &'a TrainConfig, freeze: Freeze) -> Self {
        let threshold = config.subsample * corpus_len as f64;
        let keep = vocab
            .counts()
            .iter()
            .map(|&c| {
                if config.subsample <= 0.0 {
                    return 1.0;
                }
                let f = c as f64;
                (((f / threshold).sqrt() + 1.0) * threshold / f).min(1.0)
            })
            .collect();
        let mut acc = 0.0;
        let cumulative = vocab
            .counts()
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        Self {
            keep,
            cumulative,
            config,
            freeze,
            epochs: config.epochs,
        }
    }

    /// Draws from the unigram^0.75 distribution.
    fn sample(&self, r: &mut ChaCha8Rng) -> u32 {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let x = r.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= x);
        i.min(self.cumulative.len() - 1) as u32
    }

    fn learning_rate(&self, epoch: usize, pos: usize, len: usize) -> f64 {
        let progress = (epoch as f64 + pos as f64 / len.max(1) as f64) / self.epochs as f64;
        let lr0 = self.config.learning_rate;
        (lr0 * (1.0 - progress)).max(lr0 * self.config.min_learning_rate_fraction)
    }
}

fn fit<F: Scalar>(
    ids: &[u32],
    vocab: &Vocabulary,
    target: &mut Matrix<F>,
    context: &mut Matrix<F>,
    config: &TrainConfig,
    freeze: Freeze,
    seed: u64,
) -> TrainReport {
    let plan = Plan::new(vocab, ids.len(), config, freeze);
    let workers = config.effective_workers().min(ids.len() / (config.window + 1)).max(1);
    let mut report = TrainReport {
        tokens: ids.len(),
        ..TrainReport::default()
    };
    for epoch in 0..config.epochs {
        let (loss, examples) = if workers == 1 {
            run_shard(ids, &plan, epoch, target, context, rng(seed, epoch as u64))
        } else {
            run_hogwild(ids, &plan, epoch, target, context, seed, workers)
        };
        report.examples += examples;
        report
            .epoch_losses
            .push(if examples == 0 { 0.0 } else { loss / examples as f64 });
    }
    report
}

fn run_hogwild<F: Scalar>(
    ids: &[u32],
    plan: &Plan<'_>,
    epoch: usize,
    target: &mut Matrix<F>,
    context: &mut Matrix<F>,
    seed: u64,
    workers: usize,
) -> (f64, u64) {
    let t = SharedRows::new(target);
    let c = SharedRows::new(context);
    let chunk = ids.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = ids
            .chunks(chunk)
            .enumerate()
            .map(|(w, shard)| {
                let (mut t, mut c) = (t, c);
                let stream = (epoch * workers + w) as u64;
                scope.spawn(move || run_shard(shard, plan, epoch, &mut t, &mut c, rng(seed, stream)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training worker panicked"))
            .fold((0.0, 0), |(l, n), (dl, dn)| (l + dl, n + dn))
    })
}

fn run_shard<F: Scalar, I: Rows<F> + ?Sized, O: Rows<F> + ?Sized>(
    ids: &[u32],
    plan: &Plan<'_>,
    epoch: usize,
    input: &mut I,
    output: &mut O,
    mut r: ChaCha8Rng,
) -> (f64, u64) {
    let config = plan.config;
    let kept: Vec<u32> = ids
        .iter()
        .copied()
        .filter(|&w| {
            let p = plan.keep[w as usize];
            p >= 1.0 || r.gen::<f64>() < p
        })
        .collect();
    let n = kept.len();
    let mut scratch = vec![F::zero(); 2 * config.dim];
    let mut window_ids: Vec<u32> = Vec::with_capacity(2 * config.window);
    let mut negatives: Vec<u32> = Vec::with_capacity(config.negative);
    let mut loss = 0.0;
    let mut examples = 0u64;
    let mut lr = F::of(plan.learning_rate(epoch, 0, n));
    let draw = |positive: u32, r: &mut ChaCha8Rng, out: &mut Vec<u32>| {
        out.clear();
        for _ in 0..config.negative {
            let s = plan.sample(r);
            if s != positive {
                out.push(s);
            }
        }
    };
    for pos in 0..n {
        if pos % 256 == 0 {
            lr = F::of(plan.learning_rate(epoch, pos, n));
        }
        let radius = config.window - r.gen_range(0..config.window);
        let lo = pos.saturating_sub(radius);
        let hi = (pos + radius).min(n - 1);
        let center = kept[pos];
        match config.architecture {
            Architecture::SkipGram => {
                for c in (lo..=hi).filter(|&c| c != pos) {
                    draw(kept[c], &mut r, &mut negatives);
                    let l = sgd_step(
                        input,
                        output,
                        &[center],
                        kept[c],
                        &negatives,
                        lr,
                        plan.freeze,
                        &mut scratch,
                    );
                    loss += l.to_f64_lossy();
                    examples += 1;
                }
            }
            Architecture::Cbow => {
                window_ids.clear();
                window_ids.extend((lo..=hi).filter(|&c| c != pos).map(|c| kept[c]));
                if window_ids.is_empty() {
                    continue;
                }
                draw(center, &mut r, &mut negatives);
                let l = sgd_step(
                    input,
                    output,
                    &window_ids,
                    center,
                    &negatives,
                    lr,
                    plan.freeze,
                    &mut scratch,
                );
                loss += l.to_f64_lossy();
                examples += 1;
            }
        }
    }
    (loss, examples)
}

/// Unsynchronized row access shared by parallel workers.
///
/// Several workers may read and write the same row at once; updates can be
/// lost or interleaved. This is the lock-free ("Hogwild") training mode and
/// is only used when determinism is not requested. Deterministic training
/// runs on a single worker and never creates overlapping row borrows.
struct SharedRows<'a, F> {
    ptr: *mut F,
    rows: usize,
    cols: usize,
    _matrix: PhantomData<&'a mut Matrix<F>>,
}

impl<F> Clone for SharedRows<'_, F> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<F> Copy for SharedRows<'_, F> {}

// SAFETY: the pointer is valid for the borrow `'a` of the matrix; concurrent
// access is the documented Hogwild trade-off.
unsafe impl<F: Send> Send for SharedRows<'_, F> {}
unsafe impl<F: Sync> Sync for SharedRows<'_, F> {}

impl<'a, F: Scalar> SharedRows<'a, F> {
    fn new(m: &'a mut Matrix<F>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            ptr: m.as_mut_slice().as_mut_ptr(),
            _matrix: PhantomData,
        }
    }
}

impl<F: Scalar> Rows<F> for SharedRows<'_, F> {
    fn row(&self, i: usize) -> &[F] {
        assert!(i < self.rows);
        // SAFETY: in bounds of the borrowed matrix.
        unsafe { std::slice::from_raw_parts(self.ptr.add(i * self.cols), self.cols) }
    }

    fn row_mut(&mut self, i: usize) -> &mut [F] {
        assert!(i < self.rows);
        // SAFETY: in bounds; see the type-level note on concurrent writes.
        unsafe { std::slice::from_raw_parts_mut(self.ptr.add(i * self.cols), self.cols) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> TrainConfig {
        TrainConfig {
            dim: 8,
            window: 2,
            epochs: 2,
            min_count: 1,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig { dim: 0, ..small() },
            TrainConfig { negative: 0, ..small() },
            TrainConfig {
                learning_rate: 0.0,
                ..small()
            },
            TrainConfig {
                min_count: 0,
                ..small()
            },
            TrainConfig {
                subsample: -1.0,
                ..small()
            },
        ] {
            assert!(matches!(bad.validate(), Err(EmbedError::InvalidConfig(_))));
        }
        assert_eq!("CBOW".parse::<Architecture>().unwrap(), Architecture::Cbow);
        assert_eq!("skip-gram".parse::<Architecture>().unwrap(), Architecture::SkipGram);
    }

    #[test]
    fn short_corpus_rejected() {
        let err = train::<f32, _>(&["a", "b"], &small()).unwrap_err();
        assert!(matches!(err, EmbedError::TooFewTokens { tokens: 2, needed: 3 }));
        let err = train::<f32, _>(
            &["a", "b"],
            &TrainConfig {
                min_count: 5,
                ..small()
            },
        )
        .unwrap_err();
        assert!(matches!(err, EmbedError::EmptyVocabulary));
    }

    #[test]
    fn sampling_follows_counts() {
        let vocab = Vocabulary::from_counts([("a", 16u64), ("b", 1)]);
        let config = small();
        let plan = Plan::new(&vocab, 17, &config, Freeze::default());
        let mut r = rng(3, 0);
        let n = 20_000;
        let hits = (0..n).filter(|_| plan.sample(&mut r) == 1).count() as f64 / n as f64;
        // 1 / (16^0.75 + 1) = 1/9
        assert!((hits - 1.0 / 9.0).abs() < 0.01, "{hits}");
    }

    #[test]
    fn hogwild_mode_runs() {
        let tokens: Vec<String> = (0..4000).map(|i| format!("w{}", (i * 7) % 23)).collect();
        let config = TrainConfig {
            deterministic: false,
            workers: 4,
            ..small()
        };
        let trained = train::<f32, _>(&tokens, &config).unwrap();
        assert_eq!(trained.model.len(), 23);
        assert!(trained.model.target().as_slice().iter().all(|x| x.is_finite()));
    }
}
