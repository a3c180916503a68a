//! Descriptive statistics: sizes, shared vocabulary, gender participation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Gender, SpeechRecord};

pub const SENTENCE_BOUNDARY: char = '.';

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub characters: u64,
    pub tokens: u64,
    pub unique_tokens: u64,
    pub sentences: u64,
    pub unique_sentences: u64,
}

/// Counts for one text. Sentences are the non-blank pieces of `raw_text`
/// between full stops.
pub fn corpus_stats<S: AsRef<str>>(tokens: &[S], raw_text: &str) -> CorpusStats {
    let unique_tokens: HashSet<&str> = tokens.iter().map(AsRef::as_ref).collect();
    let sentences: Vec<&str> = raw_text
        .split(SENTENCE_BOUNDARY)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let unique_sentences: HashSet<&str> = sentences.iter().copied().collect();
    CorpusStats {
        characters: raw_text.chars().count() as u64,
        tokens: tokens.len() as u64,
        unique_tokens: unique_tokens.len() as u64,
        sentences: sentences.len() as u64,
        unique_sentences: unique_sentences.len() as u64,
    }
}

/// Per-slice averages of [`CorpusStats`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AverageStats {
    pub characters: f64,
    pub tokens: f64,
    pub unique_tokens: f64,
    pub sentences: f64,
    pub unique_sentences: f64,
}

impl AverageStats {
    pub fn of(stats: &[CorpusStats]) -> Self {
        if stats.is_empty() {
            return Self::default();
        }
        let n = stats.len() as f64;
        let mean = |f: fn(&CorpusStats) -> u64| stats.iter().map(|s| f(s) as f64).sum::<f64>() / n;
        Self {
            characters: mean(|s| s.characters),
            tokens: mean(|s| s.tokens),
            unique_tokens: mean(|s| s.unique_tokens),
            sentences: mean(|s| s.sentences),
            unique_sentences: mean(|s| s.unique_sentences),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SharedVocabulary {
    pub words: BTreeSet<String>,
    pub size: usize,
}

pub fn shared_vocabulary<S: AsRef<str>>(a: &[S], b: &[S]) -> SharedVocabulary {
    let va: HashSet<&str> = a.iter().map(AsRef::as_ref).collect();
    let vb: HashSet<&str> = b.iter().map(AsRef::as_ref).collect();
    let words: BTreeSet<String> = va.intersection(&vb).map(|w| w.to_string()).collect();
    SharedVocabulary {
        size: words.len(),
        words,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenderShare {
    /// Female members over members of known gender (head count).
    pub member_pct: f64,
    /// Characters spoken by female members over all characters spoken.
    pub speech_char_pct: f64,
    pub members: usize,
}

/// Female participation per `(party, period)` cell. Cells without any member
/// of known gender are omitted.
pub fn gender_participation<'a>(
    records: impl IntoIterator<Item = &'a SpeechRecord>,
) -> BTreeMap<(String, String), GenderShare> {
    #[derive(Default)]
    struct Cell<'r> {
        members: HashMap<&'r str, Gender>,
        female_chars: u64,
        total_chars: u64,
    }
    let mut cells: BTreeMap<(String, String), Cell<'a>> = BTreeMap::new();
    for r in records {
        let cell = cells
            .entry((r.political_party.clone(), r.parliamentary_period.clone()))
            .or_default();
        let chars = r.speech.chars().count() as u64;
        cell.total_chars += chars;
        if r.member_gender == Gender::Female {
            cell.female_chars += chars;
        }
        let g = cell.members.entry(&r.member_name).or_insert(Gender::Unknown);
        if *g == Gender::Unknown {
            *g = r.member_gender;
        }
    }
    cells
        .into_iter()
        .filter_map(|(key, cell)| {
            let known = cell.members.values().filter(|g| **g != Gender::Unknown).count();
            if known == 0 {
                return None;
            }
            let female = cell.members.values().filter(|g| **g == Gender::Female).count();
            let speech_char_pct = if cell.total_chars == 0 {
                0.0
            } else {
                cell.female_chars as f64 / cell.total_chars as f64
            };
            Some((
                key,
                GenderShare {
                    member_pct: female as f64 / known as f64,
                    speech_char_pct,
                    members: known,
                },
            ))
        })
        .collect()
}
