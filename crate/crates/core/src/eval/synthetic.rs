//! Synthetic corpora with known usage change.
//!
//! Every sentence picks one topic and draws its words from that topic's
//! word list, mixed with shared function words and the odd rare word. A
//! planted word belongs to one topic before the shift slice and to another
//! topic from the shift slice on, so its contexts change while every other
//! word keeps its distribution.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedShiftConfig {
    pub slices: usize,
    /// First slice in which planted words sit in their new topic.
    pub shift_at: usize,
    pub tokens_per_slice: usize,
    pub sentence_len: usize,
    pub function_words: usize,
    pub topics: usize,
    pub words_per_topic: usize,
    pub rare_words: usize,
    pub planted: usize,
    /// Probability that a position holds a function word.
    pub function_rate: f64,
    /// Probability that a sentence contains one rare word.
    pub rare_rate: f64,
    pub seed: u64,
}

impl Default for PlantedShiftConfig {
    /// Two slices over a 200-word vocabulary: 10 function words, 17 topics
    /// of 10 words, 20 rare words, 5 planted words.
    fn default() -> Self {
        Self {
            slices: 2,
            shift_at: 1,
            tokens_per_slice: 60_000,
            sentence_len: 20,
            function_words: 10,
            topics: 17,
            words_per_topic: 10,
            rare_words: 20,
            planted: 5,
            function_rate: 0.25,
            rare_rate: 0.02,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedCorpus {
    pub slices: Vec<(String, Vec<String>)>,
    pub planted: Vec<String>,
    pub function_words: Vec<String>,
    /// Topic word lists before the shift.
    pub topics: Vec<Vec<String>>,
    pub rare_words: Vec<String>,
}

impl PlantedCorpus {
    pub fn vocabulary_size(&self) -> usize {
        self.function_words.len() + self.topics.iter().map(Vec::len).sum::<usize>() + self.rare_words.len()
    }

    /// Topic words that are not planted.
    pub fn stable_words(&self) -> Vec<String> {
        self.topics
            .iter()
            .flatten()
            .filter(|w| !self.planted.contains(w))
            .cloned()
            .collect()
    }
}

impl PlantedShiftConfig {
    fn validate(&self) -> Result<(), String> {
        if self.slices == 0 || self.shift_at > self.slices {
            return Err("shift_at must lie within the slices".into());
        }
        if self.topics < 2 || self.words_per_topic == 0 || self.sentence_len == 0 {
            return Err("need at least two non-empty topics and non-empty sentences".into());
        }
        if 2 * self.planted > self.topics {
            return Err("at most topics/2 planted words".into());
        }
        if self.function_words == 0 && self.function_rate > 0.0 {
            return Err("function_rate > 0 needs function words".into());
        }
        if self.rare_words == 0 && self.rare_rate > 0.0 {
            return Err("rare_rate > 0 needs rare words".into());
        }
        for p in [self.function_rate, self.rare_rate] {
            if !(0.0..=1.0).contains(&p) {
                return Err("rates must be probabilities".into());
            }
        }
        Ok(())
    }
}

/// Generates the corpus. Planted word `i` is the first word of topic `i`
/// and moves to topic `i + planted`.
pub fn planted_shift_corpus(config: &PlantedShiftConfig) -> Result<PlantedCorpus, String> {
    config.validate()?;
    let function_words: Vec<String> = (0..config.function_words).map(|i| format!("f{i:02}")).collect();
    let topics: Vec<Vec<String>> = (0..config.topics)
        .map(|t| (0..config.words_per_topic).map(|k| format!("t{t:02}w{k:02}")).collect())
        .collect();
    let rare_words: Vec<String> = (0..config.rare_words).map(|i| format!("r{i:02}")).collect();
    let planted: Vec<String> = (0..config.planted).map(|i| topics[i][0].clone()).collect();

    let mut shifted = topics.clone();
    for (i, word) in planted.iter().enumerate() {
        shifted[i].retain(|w| w != word);
        shifted[i + config.planted].push(word.clone());
    }

    let mut slices = Vec::with_capacity(config.slices);
    for s in 0..config.slices {
        let lists = if s >= config.shift_at { &shifted } else { &topics };
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(s as u64);
        let mut tokens = Vec::with_capacity(config.tokens_per_slice);
        while tokens.len() < config.tokens_per_slice {
            let topic = &lists[rng.gen_range(0..lists.len())];
            let start = tokens.len();
            for _ in 0..config.sentence_len {
                let word = if rng.gen::<f64>() < config.function_rate {
                    function_words.choose(&mut rng)
                } else {
                    topic.choose(&mut rng)
                };
                tokens.push(word.expect("non-empty word list").clone());
            }
            if rng.gen::<f64>() < config.rare_rate {
                let pos = start + rng.gen_range(0..config.sentence_len);
                tokens[pos] = rare_words.choose(&mut rng).expect("rare words").clone();
            }
        }
        tokens.truncate(config.tokens_per_slice);
        slices.push((format!("s{s}"), tokens));
    }
    Ok(PlantedCorpus {
        slices,
        planted,
        function_words,
        topics,
        rare_words,
    })
}
