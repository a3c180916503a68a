//! Grammatical-case table for Greek names and genitive-to-nominative
//! conversion.

use std::collections::HashMap;
use std::io::Read;

use serde::Deserialize;

use super::ResolveError;
use crate::corpus::Gender;
use crate::text::fold_name;

/// Maps every known form of a name word to its nominative form and gender.
/// Keys are folded (accent-free, uppercase). Nominative forms always map to
/// themselves.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NameCaseTable {
    entries: HashMap<String, (String, Gender)>,
}

#[derive(Debug, Deserialize)]
struct CaseRow {
    form: String,
    nominative: String,
    gender: String,
}

impl NameCaseTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a form. The first mapping of a form wins.
    pub fn insert(&mut self, form: &str, nominative: &str, gender: Gender) {
        let nominative = fold_name(nominative);
        self.entries
            .entry(nominative.clone())
            .or_insert_with(|| (nominative.clone(), gender));
        self.entries.entry(fold_name(form)).or_insert((nominative, gender));
    }

    pub fn get(&self, form: &str) -> Option<&(String, Gender)> {
        self.entries.get(&fold_name(form))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reads a `form,nominative,gender` table with a header row.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, ResolveError> {
        let mut table = Self::new();
        let mut rdr = csv::Reader::from_reader(reader);
        for row in rdr.deserialize::<CaseRow>() {
            let row = row.map_err(ResolveError::table)?;
            let gender = row.gender.parse().map_err(ResolveError::Invalid)?;
            table.insert(&row.form, &row.nominative, gender);
        }
        Ok(table)
    }
}

/// Converts each word through the table; unknown words pass through
/// unchanged. The gender is the first word's gender when known, otherwise
/// that of the first later word with a known gender.
pub fn genitive_to_nominative(name: &str, table: &NameCaseTable) -> (String, Gender) {
    let mut words = Vec::new();
    let mut genders = Vec::new();
    for word in name.split_whitespace() {
        match table.get(word) {
            Some((nominative, gender)) => {
                words.push(nominative.clone());
                genders.push(*gender);
            }
            None => {
                words.push(word.to_string());
                genders.push(Gender::Unknown);
            }
        }
    }
    let gender = genders
        .into_iter()
        .find(|g| *g != Gender::Unknown)
        .unwrap_or(Gender::Unknown);
    (words.join(" "), gender)
}
