//! Text normalization before embedding training.
//!
//! Pipeline per speech: party references are tagged as `@<abbreviation>`,
//! then [`normalize_tokens`] strips accents, removes punctuation other than
//! full stops, drops short tokens and masks stopwords with [`STOPWORD_TAG`].

use std::collections::{BTreeMap, HashSet};
use std::io::Read;
use std::path::Path;

use regex::Regex;
use thiserror::Error;

use crate::corpus::{Slicing, TimeSlice};
use crate::text::strip_accents;

pub const STOPWORD_TAG: &str = "@sw";
pub const TAG_PREFIX: char = '@';
pub const FULL_STOP: &str = ".";
/// Tokens shorter than this (in characters, after accent stripping) are
/// dropped.
pub const MIN_TOKEN_CHARS: usize = 2;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("party table: {0}")]
    PartyTable(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("merge map: {0}")]
    Merge(String),
}

/// Party-name patterns (covering grammatical cases and variants) and the
/// abbreviation each one is replaced with.
#[derive(Debug, Clone)]
pub struct PartyTagTable {
    patterns: Vec<(String, String)>,
    matcher: Option<Regex>,
}

impl PartyTagTable {
    /// Patterns are regular expressions matched case-insensitively on whole
    /// words. Longer patterns take precedence.
    pub fn new(patterns: Vec<(String, String)>) -> Result<Self, PreprocessError> {
        let mut seen = HashSet::new();
        let mut abbreviations = HashSet::new();
        for (pattern, abbr) in &patterns {
            if pattern.trim().is_empty() {
                return Err(PreprocessError::PartyTable("empty pattern".into()));
            }
            if abbr.trim().is_empty() || abbr.contains(char::is_whitespace) {
                return Err(PreprocessError::PartyTable(format!(
                    "invalid abbreviation {abbr:?} for {pattern:?}"
                )));
            }
            if !seen.insert(pattern.clone()) {
                return Err(PreprocessError::PartyTable(format!("duplicate pattern {pattern:?}")));
            }
            abbreviations.insert(abbr.clone());
        }
        let mut sorted = patterns.clone();
        sorted.sort_by(|a, b| b.0.chars().count().cmp(&a.0.chars().count()).then(a.0.cmp(&b.0)));
        let matcher = if sorted.is_empty() {
            None
        } else {
            let alternation = sorted
                .iter()
                .enumerate()
                .map(|(i, (p, _))| format!("(?P<p{i}>{p})"))
                .collect::<Vec<_>>()
                .join("|");
            Some(Regex::new(&format!("(?i){alternation}")).map_err(|e| PreprocessError::PartyTable(e.to_string()))?)
        };
        Ok(Self {
            patterns: sorted,
            matcher,
        })
    }

    /// Reads a `pattern,abbreviation` table with a header row.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, PreprocessError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut patterns = Vec::new();
        for row in rdr.records() {
            let row = row.map_err(|e| PreprocessError::PartyTable(e.to_string()))?;
            if row.len() < 2 {
                return Err(PreprocessError::PartyTable("expected pattern,abbreviation".into()));
            }
            patterns.push((row[0].to_string(), row[1].trim().to_string()));
        }
        Self::new(patterns)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PreprocessError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| PreprocessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_reader(file)
    }

    /// Distinct tag tokens, e.g. `@νδ`.
    pub fn tags(&self) -> Vec<String> {
        let mut tags: Vec<String> = self.patterns.iter().map(|(_, a)| format!("{TAG_PREFIX}{a}")).collect();
        tags.sort();
        tags.dedup();
        tags
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Replaces every party-pattern occurrence with `@` + abbreviation.
/// Matches must be whole words and not already tagged, which makes the
/// operation idempotent.
pub fn tag_party_references(text: &str, table: &PartyTagTable) -> String {
    let Some(re) = &table.matcher else {
        return text.to_string();
    };
    let mut out = String::with_capacity(text.len());
    let mut copied = 0;
    let mut pos = 0;
    while pos <= text.len() {
        let Some(caps) = re.captures_at(text, pos) else { break };
        let m = caps.get(0).unwrap();
        let before = text[..m.start()].chars().next_back();
        let after = text[m.end()..].chars().next();
        let bounded =
            before.is_none_or(|c| !is_word_char(c) && c != TAG_PREFIX) && after.is_none_or(|c| !is_word_char(c));
        if m.is_empty() || !bounded {
            pos = m.start() + text[m.start()..].chars().next().map_or(1, char::len_utf8);
            continue;
        }
        let idx = (0..table.patterns.len())
            .find(|i| caps.name(&format!("p{i}")).is_some())
            .expect("one alternative matched");
        out.push_str(&text[copied..m.start()]);
        out.push(TAG_PREFIX);
        out.push_str(&table.patterns[idx].1);
        copied = m.end();
        pos = m.end();
    }
    out.push_str(&text[copied..]);
    out
}

/// Stopword set, compared after accent stripping and lowercasing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Self(
            words
                .into_iter()
                .map(|w| stopword_key(w.as_ref()))
                .filter(|w| !w.is_empty())
                .collect(),
        )
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PreprocessError> {
        let path = path.as_ref();
        std::fs::read_to_string(path)
            .map(|t| Self::parse(&t))
            .map_err(|source| PreprocessError::Io {
                path: path.to_path_buf(),
                source,
            })
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(&stopword_key(token))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn stopword_key(w: &str) -> String {
    strip_accents(w.trim()).to_lowercase()
}

/// Tokenizes one text: accents stripped; punctuation other than full stops
/// (and the `@` of tags) removed; full stops emitted as their own token;
/// stopwords replaced by `@sw`; remaining tokens shorter than two characters
/// dropped. Stopwords are masked before the length filter, so one-letter
/// stopwords still leave an `@sw`.
pub fn normalize_tokens(text: &str, stopwords: &Stopwords) -> Vec<String> {
    let stripped = strip_accents(text);
    let mut spaced = String::with_capacity(stripped.len() + 8);
    for c in stripped.chars() {
        if c == '.' {
            spaced.push_str(" . ");
        } else if c.is_alphanumeric() || c.is_whitespace() || c == TAG_PREFIX {
            spaced.push(c);
        } else {
            spaced.push(' ');
        }
    }
    spaced
        .split_whitespace()
        .filter_map(|tok| {
            if stopwords.contains(tok) && tok != FULL_STOP {
                return Some(STOPWORD_TAG.to_string());
            }
            let is_tag = tok.starts_with(TAG_PREFIX) && tok.chars().count() > 1;
            let is_word = tok.chars().count() >= MIN_TOKEN_CHARS && !tok.contains(TAG_PREFIX);
            (tok == FULL_STOP || is_tag || is_word).then(|| tok.to_string())
        })
        .collect()
}

/// Renders normalized tokens as preprocessed text: tokens separated by one
/// space, full stops attached to the preceding token.
pub fn render_tokens<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for tok in tokens {
        let tok = tok.as_ref();
        if !out.is_empty() && tok != FULL_STOP {
            out.push(' ');
        }
        out.push_str(tok);
    }
    out
}

/// Merges slices whose period appears as a key of `merge_map` into the slice
/// holding the mapped period. The merged slice keeps the target's id and
/// position, its periods in original slicing order, and the envelope of the
/// date ranges.
pub fn merge_periods(slicing: &Slicing, merge_map: &BTreeMap<String, String>) -> Result<Slicing, PreprocessError> {
    let slices = slicing.slices();
    let slice_of = |period: &str| slices.iter().position(|s| s.contains_period(period));
    let mut target_of: Vec<Option<usize>> = vec![None; slices.len()];
    for (source, target) in merge_map {
        if source == target {
            return Err(PreprocessError::Merge(format!("period {source} merged into itself")));
        }
        let s = slice_of(source).ok_or_else(|| PreprocessError::Merge(format!("unknown source period {source}")))?;
        let t = slice_of(target).ok_or_else(|| PreprocessError::Merge(format!("unknown target period {target}")))?;
        if merge_map.contains_key(target) {
            return Err(PreprocessError::Merge(format!(
                "target period {target} is itself merged away"
            )));
        }
        if s == t {
            continue;
        }
        if matches!(target_of[s], Some(prev) if prev != t) {
            return Err(PreprocessError::Merge(format!(
                "slice {} is merged into two different slices",
                slices[s].id
            )));
        }
        target_of[s] = Some(t);
    }
    let mut merged: Vec<TimeSlice> = Vec::new();
    for (i, slice) in slices.iter().enumerate() {
        if target_of[i].is_some() {
            continue;
        }
        let members: Vec<&TimeSlice> = slices
            .iter()
            .enumerate()
            .filter(|(j, _)| *j == i || target_of[*j] == Some(i))
            .map(|(_, s)| s)
            .collect();
        let source_periods = members.iter().flat_map(|s| s.source_periods.iter().cloned()).collect();
        let ranges: Vec<_> = members.iter().filter_map(|s| s.date_range).collect();
        let date_range = if ranges.is_empty() {
            None
        } else {
            Some((
                ranges.iter().map(|r| r.0).min().unwrap(),
                ranges.iter().map(|r| r.1).max().unwrap(),
            ))
        };
        merged.push(TimeSlice {
            id: slice.id.clone(),
            source_periods,
            date_range,
        });
    }
    Slicing::new(merged).map_err(|e| PreprocessError::Merge(e.to_string()))
}

/// Parses `5:7,6:7` style merge lists.
pub fn parse_merge_map(spec: &str) -> Result<BTreeMap<String, String>, PreprocessError> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            pair.split_once(['>', ':'])
                .map(|(a, b)| (a.trim().trim_end_matches('-').to_string(), b.trim().to_string()))
                .ok_or_else(|| PreprocessError::Merge(format!("expected SOURCE:TARGET, got {pair:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parties() -> PartyTagTable {
        PartyTagTable::new(vec![
            ("Νέα Δημοκρατία".into(), "νδ".into()),
            ("Νέας Δημοκρατίας".into(), "νδ".into()),
            ("ΠΑΣΟΚ".into(), "πασοκ".into()),
            ("Δημοκρατία".into(), "δημ".into()),
        ])
        .unwrap()
    }

    #[test]
    fn tags_party_names() {
        assert_eq!(
            tag_party_references("η Νέα Δημοκρατία ψήφισε", &parties()),
            "η @νδ ψήφισε"
        );
        assert_eq!(
            tag_party_references("της νέας δημοκρατίας και του ΠΑΣΟΚ.", &parties()),
            "της @νδ και του @πασοκ."
        );
        assert_eq!(tag_party_references("καμία αναφορά", &parties()), "καμία αναφορά");
        // whole words only
        assert_eq!(tag_party_references("ΠΑΣΟΚικός", &parties()), "ΠΑΣΟΚικός");
    }

    #[test]
    fn tagging_is_idempotent() {
        let once = tag_party_references("Η Δημοκρατία και η Νέα Δημοκρατία", &parties());
        assert_eq!(once, "Η @δημ και η @νδ");
        assert_eq!(tag_party_references(&once, &parties()), once);
    }

    #[test]
    fn normalize_fixture_sentence() {
        let sw = Stopwords::new(["ο"]);
        assert_eq!(
            normalize_tokens("ο νόμος ψηφίστηκε.", &sw),
            vec!["@sw", "νομος", "ψηφιστηκε", "."]
        );
        assert!(normalize_tokens("", &sw).is_empty());
        assert!(normalize_tokens("έ ά", &sw).is_empty());
    }

    #[test]
    fn normalize_punctuation_and_tags() {
        let sw = Stopwords::new(["και"]);
        assert_eq!(
            normalize_tokens("Η @νδ, και «το» ΠΑΣΟΚ; Ναι!", &sw),
            vec!["@νδ", "@sw", "το", "ΠΑΣΟΚ", "Ναι"]
        );
        assert_eq!(normalize_tokens("@ x@y", &sw), Vec::<String>::new());
    }

    #[test]
    fn merge_periods_examples() {
        let slicing = Slicing::parse("5 = 5\n6 = 6\n7 = 7 | 1990-01-01..1993-01-01\n8 = 8").unwrap();
        assert_eq!(merge_periods(&slicing, &BTreeMap::new()).unwrap(), slicing);
        let map = parse_merge_map("5:7, 6:7").unwrap();
        let merged = merge_periods(&slicing, &map).unwrap();
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.slices()[0].id, "7");
        assert_eq!(merged.slices()[0].source_periods, vec!["5", "6", "7"]);

        let slicing = Slicing::parse("14 = 14\n15 = 15\n16 = 16\n17 = 17").unwrap();
        let merged = merge_periods(&slicing, &parse_merge_map("14:15,16:17").unwrap()).unwrap();
        let ids: Vec<_> = merged.slices().iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, vec!["15", "17"]);
        assert_eq!(merged.slices()[1].source_periods, vec!["16", "17"]);
    }

    #[test]
    fn merge_errors() {
        let slicing = Slicing::parse("5 = 5\n7 = 7").unwrap();
        assert!(merge_periods(&slicing, &parse_merge_map("7:7").unwrap()).is_err());
        assert!(merge_periods(&slicing, &parse_merge_map("5:9").unwrap()).is_err());
        assert!(parse_merge_map("57").is_err());
    }

    #[test]
    fn merge_envelope_dates() {
        let slicing = Slicing::parse("a = 1 | 2000-01-01..2000-06-30\nb = 2 | 2000-07-01..2001-12-31").unwrap();
        let merged = merge_periods(&slicing, &parse_merge_map("1:2").unwrap()).unwrap();
        let (s, e) = merged.slices()[0].date_range.unwrap();
        assert_eq!(
            (s.to_string(), e.to_string()),
            ("2000-01-01".into(), "2001-12-31".into())
        );
    }

    proptest! {
        #[test]
        fn normalized_tokens_invariants(text in "[α-ωάέήίόύώΑ-Ω .,;!@]{0,60}") {
            let sw = Stopwords::new(["και", "το"]);
            for tok in normalize_tokens(&text, &sw) {
                prop_assert!(tok == FULL_STOP || tok.chars().count() >= 2);
                prop_assert_eq!(strip_accents(&tok), tok.clone());
                prop_assert!(!sw.contains(&tok) );
            }
        }

        #[test]
        fn tagging_only_touches_matches(text in "[α-ω ΝέαΔημοκρατίαΠΑΣΟΚ.]{0,40}") {
            let t = parties();
            let once = tag_party_references(&text, &t);
            prop_assert_eq!(tag_party_references(&once, &t), once.clone());
            // Text between tags appears in the input, in order.
            let mut cursor = 0;
            let pieces = once.split('@');
            for (i, piece) in pieces.enumerate() {
                let rest = if i == 0 {
                    piece
                } else {
                    let tag_len = ["νδ", "πασοκ", "δημ"]
                        .iter()
                        .find(|a| piece.starts_with(**a))
                        .map(|a| a.len())
                        .expect("tag abbreviation follows @");
                    &piece[tag_len..]
                };
                let found = text[cursor..].find(rest);
                prop_assert!(found.is_some());
                cursor += found.unwrap() + rest.len();
            }
        }
    }
}
