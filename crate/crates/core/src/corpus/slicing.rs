//! Time slices and assignment of records to slices.
//!
//! Slicing config format, one slice per line:
//!
//! ```text
//! # id = period, period, ... [| YYYY-MM-DD..YYYY-MM-DD]
//! t1 = 5, 6, 7 | 1989-07-01..1993-10-10
//! t2 = 8
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{parse_date, CorpusError, SpeechRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub id: String,
    pub source_periods: Vec<String>,
    pub date_range: Option<(NaiveDate, NaiveDate)>,
}

impl TimeSlice {
    pub fn new(id: impl Into<String>, periods: &[&str]) -> Self {
        Self {
            id: id.into(),
            source_periods: periods.iter().map(|p| p.to_string()).collect(),
            date_range: None,
        }
    }

    pub fn with_dates(mut self, start: NaiveDate, end: NaiveDate) -> Self {
        self.date_range = Some((start, end));
        self
    }

    pub fn contains_period(&self, period: &str) -> bool {
        self.source_periods.iter().any(|p| p == period)
    }

    pub fn contains_date(&self, date: NaiveDate) -> bool {
        self.date_range.is_some_and(|(start, end)| start <= date && date <= end)
    }
}

/// An ordered list of slices whose period sets are pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slicing {
    slices: Vec<TimeSlice>,
}

impl Slicing {
    pub fn new(slices: Vec<TimeSlice>) -> Result<Self, CorpusError> {
        let mut ids = HashSet::new();
        let mut periods = HashSet::new();
        for s in &slices {
            if s.source_periods.is_empty() && s.date_range.is_none() {
                return Err(CorpusError::Slicing(format!(
                    "slice {:?} has neither periods nor dates",
                    s.id
                )));
            }
            if !ids.insert(s.id.as_str()) {
                return Err(CorpusError::Slicing(format!("duplicate slice id {:?}", s.id)));
            }
            for p in &s.source_periods {
                if !periods.insert(p.as_str()) {
                    return Err(CorpusError::Slicing(format!(
                        "period {p:?} appears in more than one slice"
                    )));
                }
            }
            if let Some((start, end)) = s.date_range {
                if start > end {
                    return Err(CorpusError::Slicing(format!(
                        "slice {:?} has start {start} after end {end}",
                        s.id
                    )));
                }
            }
        }
        let by_date: Vec<(NaiveDate, NaiveDate)> = slices
            .iter()
            .filter(|s| s.source_periods.is_empty())
            .filter_map(|s| s.date_range)
            .collect();
        for (i, a) in by_date.iter().enumerate() {
            if by_date[i + 1..].iter().any(|b| a.0 <= b.1 && b.0 <= a.1) {
                return Err(CorpusError::Slicing("date-only slices overlap".into()));
            }
        }
        Ok(Self { slices })
    }

    pub fn slices(&self) -> &[TimeSlice] {
        &self.slices
    }

    pub fn get(&self, id: &str) -> Option<&TimeSlice> {
        self.slices.iter().find(|s| s.id == id)
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Slice for a record: by period label first, then by date among the
    /// slices without periods. Records without a period label may match
    /// any slice by date.
    pub fn assign(&self, record: &SpeechRecord) -> Option<&TimeSlice> {
        let period = record.parliamentary_period.trim();
        if !period.is_empty() {
            if let Some(s) = self.slices.iter().find(|s| s.contains_period(period)) {
                return Some(s);
            }
        }
        self.slices
            .iter()
            .filter(|s| period.is_empty() || s.source_periods.is_empty())
            .find(|s| s.contains_date(record.sitting_date))
    }

    /// Consecutive `(earlier, later)` pairs in slicing order.
    pub fn consecutive_pairs(&self) -> Vec<(&TimeSlice, &TimeSlice)> {
        self.slices.windows(2).map(|w| (&w[0], &w[1])).collect()
    }

    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut slices = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| CorpusError::Slicing(format!("line {}: {msg}", n + 1));
            let (id, rest) = line.split_once('=').ok_or_else(|| bad("expected `id = periods`"))?;
            let (periods, dates) = match rest.split_once('|') {
                Some((p, d)) => (p, Some(d.trim())),
                None => (rest, None),
            };
            let source_periods: Vec<String> = periods
                .split(',')
                .map(|p| p.trim().to_string())
                .filter(|p| !p.is_empty())
                .collect();
            let date_range = match dates {
                None => None,
                Some(d) => {
                    let (a, b) = d.split_once("..").ok_or_else(|| bad("expected START..END"))?;
                    let a = parse_date(a).ok_or_else(|| bad("invalid start date"))?;
                    let b = parse_date(b).ok_or_else(|| bad("invalid end date"))?;
                    Some((a, b))
                }
            };
            slices.push(TimeSlice {
                id: id.trim().to_string(),
                source_periods,
                date_range,
            });
        }
        Self::new(slices)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for s in &self.slices {
            let _ = write!(out, "{} = {}", s.id, s.source_periods.join(", "));
            if let Some((a, b)) = s.date_range {
                let _ = write!(out, " | {a}..{b}");
            }
            out.push('\n');
        }
        out
    }
}

/// Token sequences per slice, in slicing order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SlicedCorpus {
    pub slices: Vec<(String, Vec<String>)>,
    pub excluded_records: usize,
    pub excluded_tokens: usize,
    pub total_tokens: usize,
}

impl SlicedCorpus {
    pub fn get(&self, id: &str) -> Option<&[String]> {
        self.slices.iter().find(|(sid, _)| sid == id).map(|(_, t)| t.as_slice())
    }
}

/// Concatenates the whitespace tokens of each record's speech into its
/// slice's sequence, preserving record order. Records matching no slice are
/// counted and excluded.
pub fn slice_corpus<'a>(records: impl IntoIterator<Item = &'a SpeechRecord>, slicing: &Slicing) -> SlicedCorpus {
    let mut out = SlicedCorpus {
        slices: slicing.slices().iter().map(|s| (s.id.clone(), Vec::new())).collect(),
        ..SlicedCorpus::default()
    };
    for record in records {
        let tokens = record.speech.split_whitespace();
        match slicing.assign(record) {
            Some(slice) => {
                let idx = slicing
                    .slices()
                    .iter()
                    .position(|s| s.id == slice.id)
                    .expect("assigned slice belongs to slicing");
                let before = out.slices[idx].1.len();
                out.slices[idx].1.extend(tokens.map(str::to_string));
                out.total_tokens += out.slices[idx].1.len() - before;
            }
            None => {
                let n = tokens.count();
                out.excluded_records += 1;
                out.excluded_tokens += n;
                out.total_tokens += n;
            }
        }
    }
    out
}
