//! Name variants: word-order permutations, dropped middle names and
//! nickname substitutions.

use std::collections::{BTreeSet, HashMap};
use std::io::Read;

use itertools::Itertools;

use super::ResolveError;
use crate::text::fold_name;

/// Names longer than this only vary by drops and nicknames, in the original
/// word order.
pub const MAX_PERMUTED_WORDS: usize = 7;

/// Two-way nickname lookup over folded names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Nicknames {
    map: HashMap<String, BTreeSet<String>>,
}

impl Nicknames {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, nickname: &str) {
        let (a, b) = (fold_name(name), fold_name(nickname));
        if a == b || a.is_empty() || b.is_empty() {
            return;
        }
        self.map.entry(a.clone()).or_default().insert(b.clone());
        self.map.entry(b).or_default().insert(a);
    }

    pub fn alternatives(&self, word: &str) -> impl Iterator<Item = &str> {
        self.map.get(word).into_iter().flatten().map(String::as_str)
    }

    /// Reads a two-column `name,nickname` table with a header row.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, ResolveError> {
        let mut out = Self::new();
        let mut rdr = csv::Reader::from_reader(reader);
        for row in rdr.records() {
            let row = row.map_err(ResolveError::table)?;
            if row.len() < 2 {
                return Err(ResolveError::Invalid(format!(
                    "nickname row {:?} needs two columns",
                    row.iter().collect::<Vec<_>>()
                )));
            }
            out.insert(&row[0], &row[1]);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameVariantSet {
    pub canonical: String,
    pub variants: BTreeSet<String>,
}

/// Every spelling under which `official_name` may appear in a record, in
/// folded form: all subsets of its words (at least two words when the name
/// has two or more), in every order, with each word optionally replaced by
/// one of its nicknames.
pub fn generate_variants(official_name: &str, nicknames: &Nicknames) -> NameVariantSet {
    let canonical = fold_name(official_name);
    let words: Vec<&str> = canonical.split(' ').filter(|w| !w.is_empty()).collect();
    let mut variants = BTreeSet::new();
    variants.insert(canonical.clone());
    let n = words.len();
    if n == 0 {
        return NameVariantSet { canonical, variants };
    }
    let min_keep = n.min(2);
    for size in min_keep..=n {
        for subset in (0..n).combinations(size) {
            let orders: Vec<Vec<usize>> = if n <= MAX_PERMUTED_WORDS {
                subset.iter().copied().permutations(size).collect()
            } else {
                vec![subset.clone()]
            };
            for order in orders {
                let choices = order.iter().map(|&i| {
                    std::iter::once(words[i])
                        .chain(nicknames.alternatives(words[i]))
                        .collect::<Vec<_>>()
                });
                for combo in choices.multi_cartesian_product() {
                    variants.insert(combo.join(" "));
                }
            }
        }
    }
    NameVariantSet { canonical, variants }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_word() {
        let v = generate_variants("ΤΑΔΕ", &Nicknames::new());
        assert_eq!(v.variants.into_iter().collect::<Vec<_>>(), vec!["ΤΑΔΕ"]);
    }

    #[test]
    fn two_words_permute() {
        let v = generate_variants("A B", &Nicknames::new());
        assert_eq!(v.variants.into_iter().collect::<Vec<_>>(), vec!["A B", "B A"]);
    }

    #[test]
    fn nickname_and_drop() {
        let mut nick = Nicknames::new();
        nick.insert("ΙΩΑΝΝΗΣ", "ΓΙΑΝΝΗΣ");
        let v = generate_variants("ΙΩΑΝΝΗΣ Κ. ΠΑΠΑΣ", &nick);
        assert_eq!(v.canonical, "ΙΩΑΝΝΗΣ Κ. ΠΑΠΑΣ");
        for expected in ["ΠΑΠΑΣ ΓΙΑΝΝΗΣ", "ΙΩΑΝΝΗΣ ΠΑΠΑΣ", "ΓΙΑΝΝΗΣ Κ. ΠΑΠΑΣ", "ΠΑΠΑΣ Κ. ΙΩΑΝΝΗΣ"]
        {
            assert!(v.variants.contains(expected), "{expected}");
        }
        assert!(!v.variants.contains("ΠΑΠΑΣ"));
    }

    #[test]
    fn nicknames_are_two_way() {
        let mut nick = Nicknames::new();
        nick.insert("Ιωάννης", "Γιάννης");
        assert_eq!(nick.alternatives("ΓΙΑΝΝΗΣ").collect::<Vec<_>>(), vec!["ΙΩΑΝΝΗΣ"]);
    }
}
