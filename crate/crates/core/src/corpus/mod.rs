//! Speech records, time slices and descriptive corpus statistics.
//!
//! A [`SpeechRecord`] carries the eleven metadata fields of one speech. The
//! speech table is a delimited UTF-8 file with one record per row (see
//! [`table`]); [`slicing`] groups records into [`TimeSlice`]s by
//! parliamentary period and [`stats`] computes the corpus-level counts.

pub mod slicing;
pub mod stats;
pub mod table;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use slicing::{slice_corpus, SlicedCorpus, Slicing, TimeSlice};
pub use stats::{
    corpus_stats, gender_participation, shared_vocabulary, AverageStats, CorpusStats, GenderShare, SharedVocabulary,
};
pub use table::{load_speeches, write_speeches, SpeechReader, SpeechTable, TableFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
    Unknown,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
            Gender::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = String;

    /// Accepts `female`, `male`, and `unknown`; an empty field also reads as
    /// unknown.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "female" | "f" => Ok(Gender::Female),
            "male" | "m" => Ok(Gender::Male),
            "unknown" | "" => Ok(Gender::Unknown),
            other => Err(format!("invalid gender {other:?}")),
        }
    }
}

/// One speech with its metadata, in the column order of the speech table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeechRecord {
    pub member_name: String,
    pub sitting_date: NaiveDate,
    pub parliamentary_period: String,
    pub parliamentary_session: String,
    pub parliamentary_sitting: String,
    pub political_party: String,
    pub government: String,
    pub member_region: String,
    pub roles: Vec<String>,
    pub member_gender: Gender,
    pub speech: String,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed row: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount { line: u64, expected: usize, found: usize },
    #[error("line {line}: unexpected header column {found:?} (expected {expected:?})")]
    Header {
        line: u64,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: invalid date {value:?}")]
    InvalidDate { line: u64, value: String },
    #[error("line {line}: date {date} outside [{first}, {last}]")]
    DateOutOfRange {
        line: u64,
        date: NaiveDate,
        first: NaiveDate,
        last: NaiveDate,
    },
    #[error("line {line}: {message}")]
    InvalidField { line: u64, message: String },
    #[error("line {line}: empty speech")]
    EmptySpeech { line: u64 },
    #[error("invalid slicing: {0}")]
    Slicing(String),
    #[error("write failed: {0}")]
    Write(#[from] csv::Error),
}

impl CorpusError {
    /// 1-based line number for row-level errors.
    pub fn line(&self) -> Option<u64> {
        match self {
            CorpusError::Malformed { line, .. }
            | CorpusError::ColumnCount { line, .. }
            | CorpusError::Header { line, .. }
            | CorpusError::InvalidDate { line, .. }
            | CorpusError::DateOutOfRange { line, .. }
            | CorpusError::InvalidField { line, .. }
            | CorpusError::EmptySpeech { line } => Some(*line),
            _ => None,
        }
    }
}

/// Parses `YYYY-MM-DD`, falling back to `DD/MM/YYYY`.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(s, "%d/%m/%Y"))
        .ok()
}
