//! Builds speech records from raw sittings: segmentation, speaker
//! resolution and metadata attachment.
//!
//! Sitting metadata is read from a table with the header
//! `file_id,sitting_date,parliamentary_period,parliamentary_session,parliamentary_sitting`.

use std::collections::HashMap;
use std::io::Read;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{parse_date, Gender, SpeechRecord};
use crate::parser::{parse_sitting, RawSitting, SpeakerPatterns};
use crate::resolve::{resolve_speaker, GovernmentRow, Resolution, Resolver};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("metadata table: {0}")]
    Table(#[from] csv::Error),
    #[error("metadata line {line}: invalid date {value:?}")]
    InvalidDate { line: u64, value: String },
    #[error("metadata line {line}: duplicate file id {file_id:?}")]
    DuplicateFile { line: u64, file_id: String },
    #[error("government {name:?}: invalid date range")]
    Government { name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SittingMeta {
    pub file_id: String,
    pub sitting_date: NaiveDate,
    pub parliamentary_period: String,
    pub parliamentary_session: String,
    pub parliamentary_sitting: String,
}

#[derive(Debug, Deserialize)]
struct MetaRow {
    file_id: String,
    sitting_date: String,
    parliamentary_period: String,
    parliamentary_session: String,
    parliamentary_sitting: String,
}

/// Reads the sitting metadata table, keyed by file id.
pub fn read_sitting_meta<R: Read>(reader: R) -> Result<HashMap<String, SittingMeta>, IngestError> {
    let mut out = HashMap::new();
    let mut rdr = csv::Reader::from_reader(reader);
    for (i, row) in rdr.deserialize::<MetaRow>().enumerate() {
        let line = i as u64 + 2;
        let row = row?;
        let sitting_date = parse_date(&row.sitting_date).ok_or_else(|| IngestError::InvalidDate {
            line,
            value: row.sitting_date.clone(),
        })?;
        let file_id = row.file_id.trim().to_string();
        if out.contains_key(&file_id) {
            return Err(IngestError::DuplicateFile { line, file_id });
        }
        out.insert(
            file_id.clone(),
            SittingMeta {
                file_id,
                sitting_date,
                parliamentary_period: row.parliamentary_period,
                parliamentary_session: row.parliamentary_session,
                parliamentary_sitting: row.parliamentary_sitting,
            },
        );
    }
    Ok(out)
}

/// Speaker assigned to one extracted speech.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeakerAssignment {
    pub file_id: String,
    /// Position among the sitting's non-empty speeches.
    pub index: usize,
    pub mention: String,
    /// Registry name, `None` when unresolved.
    pub member: Option<String>,
    pub similarity: Option<f64>,
    pub line_start: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnresolvedMention {
    pub file_id: String,
    pub name: String,
    pub best_candidate: Option<String>,
    pub best_similarity: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub records: Vec<SpeechRecord>,
    pub assignments: Vec<SpeakerAssignment>,
    pub unresolved: Vec<UnresolvedMention>,
    pub empty_speeches: usize,
    /// Sittings skipped because the metadata table has no row for them.
    pub missing_meta: Vec<String>,
}

impl IngestReport {
    pub fn resolved_count(&self) -> usize {
        self.assignments.iter().filter(|a| a.member.is_some()).count()
    }
}

/// Segments and resolves sittings. Unresolved speakers keep the name as
/// written, unknown gender, and the government in force on the sitting date.
pub struct Ingestor<'a> {
    resolver: &'a Resolver,
    patterns: &'a SpeakerPatterns,
    governments: Vec<(NaiveDate, NaiveDate, String)>,
}

impl<'a> Ingestor<'a> {
    pub fn new(resolver: &'a Resolver, patterns: &'a SpeakerPatterns) -> Self {
        Self {
            resolver,
            patterns,
            governments: Vec::new(),
        }
    }

    pub fn with_governments(mut self, rows: &[GovernmentRow]) -> Result<Self, IngestError> {
        for g in rows {
            let bad = || IngestError::Government { name: g.name.clone() };
            let start = parse_date(&g.start_date).ok_or_else(bad)?;
            let end = parse_date(&g.end_date).ok_or_else(bad)?;
            if start > end {
                return Err(bad());
            }
            self.governments.push((start, end, g.name.clone()));
        }
        self.governments.sort();
        Ok(self)
    }

    fn government_on(&self, date: NaiveDate) -> String {
        self.governments
            .iter()
            .find(|(s, e, _)| *s <= date && date <= *e)
            .map(|g| g.2.clone())
            .unwrap_or_default()
    }

    /// Processes sittings in parallel; output follows input order.
    pub fn ingest(&self, sittings: Vec<RawSitting>, meta: &HashMap<String, SittingMeta>) -> IngestReport {
        let parts: Vec<Result<IngestReport, String>> = sittings
            .into_par_iter()
            .map(|s| match meta.get(&s.file_id) {
                Some(m) => Ok(self.ingest_one(s, m)),
                None => Err(s.file_id),
            })
            .collect();
        let mut report = IngestReport::default();
        for part in parts {
            match part {
                Ok(p) => {
                    report.records.extend(p.records);
                    report.assignments.extend(p.assignments);
                    report.unresolved.extend(p.unresolved);
                    report.empty_speeches += p.empty_speeches;
                }
                Err(file_id) => {
                    log::warn!("no metadata for sitting {file_id}; skipped");
                    report.missing_meta.push(file_id);
                }
            }
        }
        report
    }

    pub fn ingest_one(&self, mut sitting: RawSitting, meta: &SittingMeta) -> IngestReport {
        let speeches = parse_sitting(&mut sitting, self.patterns);
        let date = meta.sitting_date;
        let mut report = IngestReport::default();
        for speech in speeches {
            if speech.empty {
                report.empty_speeches += 1;
                continue;
            }
            let mention = &speech.mention;
            let resolution = resolve_speaker(mention, self.resolver, date);
            let mut record = SpeechRecord {
                member_name: mention.lookup_name().to_string(),
                sitting_date: date,
                parliamentary_period: meta.parliamentary_period.clone(),
                parliamentary_session: meta.parliamentary_session.clone(),
                parliamentary_sitting: meta.parliamentary_sitting.clone(),
                political_party: String::new(),
                government: self.government_on(date),
                member_region: String::new(),
                roles: Vec::new(),
                member_gender: Gender::Unknown,
                speech: speech.text.trim().to_string(),
            };
            let (member, similarity) = match resolution {
                Resolution::Resolved { entry, similarity, .. } => {
                    let e = &self.resolver.entries()[entry];
                    record.member_name = e.official_name.clone();
                    record.member_gender = e.gender;
                    if let Some(service) = e.service_on(date) {
                        record.political_party = service.party;
                        record.member_region = service.region;
                        record.roles = service.roles;
                        if !service.government.is_empty() {
                            record.government = service.government;
                        }
                    }
                    (Some(e.official_name.clone()), Some(similarity))
                }
                Resolution::Unresolved { best } => {
                    report.unresolved.push(UnresolvedMention {
                        file_id: sitting.file_id.clone(),
                        name: mention.lookup_name().to_string(),
                        best_candidate: best.map(|(i, _)| self.resolver.entries()[i].official_name.clone()),
                        best_similarity: best.map(|(_, s)| s),
                    });
                    (None, None)
                }
            };
            report.assignments.push(SpeakerAssignment {
                file_id: sitting.file_id.clone(),
                index: report.records.len(),
                mention: mention.raw_name.clone(),
                member,
                similarity,
                line_start: mention.line_start,
            });
            report.records.push(record);
        }
        report
    }
}
