use std::collections::HashMap;

/// Word list ordered by descending count, ties by word.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds from `(word, count)` pairs; zero counts are dropped and
    /// repeated words are summed.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut merged: HashMap<String, u64> = HashMap::new();
        for (w, c) in counts {
            if c > 0 {
                *merged.entry(w.into()).or_default() += c;
            }
        }
        let mut pairs: Vec<(String, u64)> = merged.into_iter().collect();
        pairs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self::from_sorted(pairs)
    }

    /// Keeps the given order as-is. Used when reading model files.
    pub fn from_ordered(pairs: Vec<(String, u64)>) -> Result<Self, String> {
        let vocab = Self::from_sorted(pairs);
        if vocab.index.len() != vocab.words.len() {
            return Err("duplicate word in vocabulary".into());
        }
        if vocab.counts.contains(&0) {
            return Err("vocabulary counts must be positive".into());
        }
        Ok(vocab)
    }

    fn from_sorted(pairs: Vec<(String, u64)>) -> Self {
        let mut words = Vec::with_capacity(pairs.len());
        let mut counts = Vec::with_capacity(pairs.len());
        let mut index = HashMap::with_capacity(pairs.len());
        for (i, (w, c)) in pairs.into_iter().enumerate() {
            index.insert(w.clone(), i);
            words.push(w);
            counts.push(c);
        }
        Self { words, counts, index }
    }

    /// Counts every token and keeps words seen at least `min_count` times.
    pub fn build<S: AsRef<str>>(tokens: &[S], min_count: u64) -> Self {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for t in tokens {
            *counts.entry(t.as_ref()).or_default() += 1;
        }
        Self::from_counts(counts.into_iter().filter(|&(_, c)| c >= min_count))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn count_of(&self, word: &str) -> Option<u64> {
        self.index_of(word).map(|i| self.counts[i])
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.words.iter().map(String::as_str).zip(self.counts.iter().copied())
    }

    /// Maps tokens to indices, skipping unknown words.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u32> {
        tokens
            .iter()
            .filter_map(|t| self.index_of(t.as_ref()).map(|i| i as u32))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_min_count() {
        let v = Vocabulary::build(&["b", "a", "c", "a", "b", "d", "a"], 2);
        assert_eq!(v.words(), &["a", "b"]);
        assert_eq!(v.counts(), &[3, 2]);
        assert_eq!(v.encode(&["c", "b", "a"]), vec![1, 0]);
        let tie = Vocabulary::from_counts([("z", 1), ("y", 1), ("x", 2)]);
        assert_eq!(tie.words(), &["x", "y", "z"]);
    }

    #[test]
    fn ordered_rejects_duplicates() {
        assert!(Vocabulary::from_ordered(vec![("a".into(), 1), ("a".into(), 2)]).is_err());
        assert!(Vocabulary::from_ordered(vec![("a".into(), 0)]).is_err());
        let v = Vocabulary::from_ordered(vec![("b".into(), 1), ("a".into(), 5)]).unwrap();
        assert_eq!(v.index_of("a"), Some(1));
    }
}
