//! Reading and writing the speech table.
//!
//! The table has a header row followed by one record per row, in the column
//! order of [`COLUMNS`]. Fields use RFC 4180 quoting; `roles` is a
//! semicolon-joined list; dates are written as `YYYY-MM-DD` (`DD/MM/YYYY` is
//! also accepted on input).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use super::{parse_date, CorpusError, Gender, SpeechRecord};

pub const COLUMNS: [&str; 11] = [
    "member_name",
    "sitting_date",
    "parliamentary_period",
    "parliamentary_session",
    "parliamentary_sitting",
    "political_party",
    "government",
    "member_region",
    "roles",
    "member_gender",
    "speech",
];

pub const ROLE_SEPARATOR: char = ';';

#[derive(Debug, Clone, PartialEq)]
pub struct TableFormat {
    pub delimiter: u8,
    /// Inclusive bounds on `sitting_date`; rows outside are rejected.
    pub date_bounds: Option<(NaiveDate, NaiveDate)>,
}

impl Default for TableFormat {
    fn default() -> Self {
        Self {
            delimiter: b',',
            date_bounds: None,
        }
    }
}

impl TableFormat {
    /// Date bounds of the published Greek corpus (July 1989 to July 2020).
    pub fn greek_parliament() -> Self {
        Self {
            delimiter: b',',
            date_bounds: Some((
                NaiveDate::from_ymd_opt(1989, 7, 1).unwrap(),
                NaiveDate::from_ymd_opt(2020, 7, 31).unwrap(),
            )),
        }
    }
}

/// Row-by-row reader; yields records in file order and one error per
/// malformed row.
pub struct SpeechReader<R: Read> {
    rows: csv::StringRecordsIntoIter<R>,
    format: TableFormat,
    header_checked: bool,
}

impl<R: Read> SpeechReader<R> {
    pub fn new(reader: R, format: TableFormat) -> Self {
        let rows = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .delimiter(format.delimiter)
            .from_reader(reader)
            .into_records();
        Self {
            rows,
            format,
            header_checked: false,
        }
    }

    fn check_header(&self, row: &csv::StringRecord, line: u64) -> Result<(), CorpusError> {
        if row.len() != COLUMNS.len() {
            return Err(CorpusError::ColumnCount {
                line,
                expected: COLUMNS.len(),
                found: row.len(),
            });
        }
        for (found, expected) in row.iter().zip(COLUMNS) {
            if found.trim().trim_start_matches('\u{feff}') != expected {
                return Err(CorpusError::Header {
                    line,
                    expected,
                    found: found.to_string(),
                });
            }
        }
        Ok(())
    }

    fn parse_row(&self, row: &csv::StringRecord, line: u64) -> Result<SpeechRecord, CorpusError> {
        if row.len() != COLUMNS.len() {
            return Err(CorpusError::ColumnCount {
                line,
                expected: COLUMNS.len(),
                found: row.len(),
            });
        }
        let date_field = &row[1];
        let sitting_date = parse_date(date_field).ok_or_else(|| CorpusError::InvalidDate {
            line,
            value: date_field.to_string(),
        })?;
        if let Some((first, last)) = self.format.date_bounds {
            if sitting_date < first || sitting_date > last {
                return Err(CorpusError::DateOutOfRange {
                    line,
                    date: sitting_date,
                    first,
                    last,
                });
            }
        }
        let member_gender: Gender = row[9]
            .parse()
            .map_err(|message| CorpusError::InvalidField { line, message })?;
        let speech = row[10].to_string();
        if speech.trim().is_empty() {
            return Err(CorpusError::EmptySpeech { line });
        }
        let roles = if row[8].is_empty() {
            Vec::new()
        } else {
            row[8].split(ROLE_SEPARATOR).map(str::to_string).collect()
        };
        Ok(SpeechRecord {
            member_name: row[0].to_string(),
            sitting_date,
            parliamentary_period: row[2].to_string(),
            parliamentary_session: row[3].to_string(),
            parliamentary_sitting: row[4].to_string(),
            political_party: row[5].to_string(),
            government: row[6].to_string(),
            member_region: row[7].to_string(),
            roles,
            member_gender,
            speech,
        })
    }
}

impl<R: Read> Iterator for SpeechReader<R> {
    type Item = Result<SpeechRecord, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let row = match self.rows.next()? {
                Ok(row) => row,
                Err(err) => {
                    let line = err.position().map(|p| p.line()).unwrap_or(0);
                    return Some(Err(CorpusError::Malformed {
                        line,
                        message: err.to_string(),
                    }));
                }
            };
            let line = row.position().map(|p| p.line()).unwrap_or(0);
            if !self.header_checked {
                self.header_checked = true;
                match self.check_header(&row, line) {
                    Ok(()) => continue,
                    Err(err) => return Some(Err(err)),
                }
            }
            return Some(self.parse_row(&row, line));
        }
    }
}

/// Records loaded from a speech table together with the rejected rows.
#[derive(Debug, Default)]
pub struct SpeechTable {
    pub records: Vec<SpeechRecord>,
    pub errors: Vec<CorpusError>,
}

/// Loads a whole speech table. Only a missing or unreadable file fails the
/// call; malformed rows are collected in [`SpeechTable::errors`].
pub fn load_speeches(path: impl AsRef<Path>, format: &TableFormat) -> Result<SpeechTable, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut table = SpeechTable::default();
    for row in SpeechReader::new(std::io::BufReader::new(file), format.clone()) {
        match row {
            Ok(record) => table.records.push(record),
            Err(err) => table.errors.push(err),
        }
    }
    Ok(table)
}

/// Writes the header and all records.
pub fn write_speeches<'a, W: Write>(
    writer: W,
    records: impl IntoIterator<Item = &'a SpeechRecord>,
    format: &TableFormat,
) -> Result<(), CorpusError> {
    let mut out = csv::WriterBuilder::new()
        .delimiter(format.delimiter)
        .from_writer(writer);
    out.write_record(COLUMNS)?;
    for r in records {
        let date = r.sitting_date.format("%Y-%m-%d").to_string();
        let roles = r.roles.join(&ROLE_SEPARATOR.to_string());
        out.write_record([
            r.member_name.as_str(),
            &date,
            &r.parliamentary_period,
            &r.parliamentary_session,
            &r.parliamentary_sitting,
            &r.political_party,
            &r.government,
            &r.member_region,
            &roles,
            r.member_gender.as_str(),
            &r.speech,
        ])?;
    }
    out.flush().map_err(|e| CorpusError::Write(e.into()))?;
    Ok(())
}
