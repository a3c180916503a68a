//! Member registry: per-person service intervals merged from the support
//! datasets (elected members, government members, governments, additional
//! posts).
//!
//! Support table headers:
//!
//! | table              | columns                                        |
//! |--------------------|------------------------------------------------|
//! | members            | `name,start_date,end_date,party,region,gender` |
//! | government members | `name,start_date,end_date,role[,gender]`       |
//! | governments        | `name,start_date,end_date`                     |
//! | additional posts   | `name,start_date,end_date,role[,gender]`       |
//!
//! The merged registry is written one row per interval with the columns
//! `official_name,gender,start_date,end_date,party,region,roles,government`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{genitive_to_nominative, NameCaseTable, ResolveError};
use crate::corpus::{parse_date, Gender};
use crate::text::fold_name;

/// Role attached to intervals that come from the elected-members table.
pub const MEMBER_ROLE: &str = "member of parliament";
const ROLE_SEPARATOR: &str = ";";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MemberInterval {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub party: String,
    pub region: String,
    pub roles: Vec<String>,
    pub government: String,
}

impl MemberInterval {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberEntry {
    pub official_name: String,
    pub gender: Gender,
    pub intervals: Vec<MemberInterval>,
}

impl MemberEntry {
    /// Registry key: the folded nominative full name.
    pub fn id(&self) -> String {
        fold_name(&self.official_name)
    }

    pub fn active_on(&self, date: NaiveDate) -> bool {
        self.intervals.iter().any(|i| i.contains(date))
    }

    /// Party, region, roles and government in force on `date`. Party and
    /// region come from the first interval that names them.
    pub fn service_on(&self, date: NaiveDate) -> Option<MemberInterval> {
        let active: Vec<&MemberInterval> = self.intervals.iter().filter(|i| i.contains(date)).collect();
        let first = active.first()?;
        let pick = |f: fn(&MemberInterval) -> &String| {
            active
                .iter()
                .map(|i| f(i))
                .find(|s| !s.is_empty())
                .cloned()
                .unwrap_or_default()
        };
        let mut roles: Vec<String> = Vec::new();
        for r in active.iter().flat_map(|i| i.roles.iter()) {
            if !roles.contains(r) {
                roles.push(r.clone());
            }
        }
        Some(MemberInterval {
            start: first.start,
            end: first.end,
            party: pick(|i| &i.party),
            region: pick(|i| &i.region),
            roles,
            government: pick(|i| &i.government),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberRow {
    pub name: String,
    pub start_date: String,
    pub end_date: String,
    pub party: String,
    pub region: String,
    #[serde(default)]
    pub gender: String,
}

/// A government post or an additional political post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostRow {
    pub name: String,
    pub start_date: String,
    pub end_date: String,
    pub role: String,
    #[serde(default)]
    pub gender: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GovernmentRow {
    pub name: String,
    pub start_date: String,
    pub end_date: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SupportDatasets {
    pub members: Vec<MemberRow>,
    pub government_members: Vec<PostRow>,
    pub governments: Vec<GovernmentRow>,
    pub extra_posts: Vec<PostRow>,
}

impl SupportDatasets {
    /// Converts post-holder names (recorded in the genitive) to the
    /// nominative and fills missing genders from the name table. Elected
    /// members keep their names; only a blank gender is filled. Returns the
    /// number of rows whose gender is still unknown.
    pub fn apply_name_cases(&mut self, table: &NameCaseTable) -> usize {
        let mut unknown = 0;
        for p in self.government_members.iter_mut().chain(self.extra_posts.iter_mut()) {
            let (nominative, inferred) = genitive_to_nominative(&p.name, table);
            p.name = nominative;
            if p.gender.trim().is_empty() && inferred != Gender::Unknown {
                p.gender = inferred.as_str().to_string();
            }
            unknown += usize::from(p.gender.trim().is_empty());
        }
        for m in &mut self.members {
            if m.gender.trim().is_empty() {
                let (_, inferred) = genitive_to_nominative(&m.name, table);
                if inferred != Gender::Unknown {
                    m.gender = inferred.as_str().to_string();
                }
            }
            unknown += usize::from(m.gender.trim().is_empty());
        }
        unknown
    }
}

/// Reads any support table with a header row into its row type.
pub fn read_rows<T: for<'de> Deserialize<'de>, R: Read>(reader: R) -> Result<Vec<T>, ResolveError> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(ResolveError::table))
        .collect()
}

fn date(s: &str) -> Result<NaiveDate, ResolveError> {
    parse_date(s).ok_or_else(|| ResolveError::Invalid(format!("invalid date {s:?}")))
}

fn span(start: &str, end: &str, who: &str) -> Result<(NaiveDate, NaiveDate), ResolveError> {
    let (a, b) = (date(start)?, date(end)?);
    if a > b {
        return Err(ResolveError::Invalid(format!("{who}: start {a} after end {b}")));
    }
    Ok((a, b))
}

fn gender(s: &str) -> Result<Gender, ResolveError> {
    s.parse().map_err(ResolveError::Invalid)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    entries: BTreeMap<String, MemberEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeOutcome {
    pub registry: Registry,
    /// Human-readable description of each gender conflict (first value kept).
    pub conflicts: Vec<String>,
}

/// Builds a registry from the four support datasets.
pub fn merge_support_datasets(sources: &SupportDatasets) -> Result<MergeOutcome, ResolveError> {
    Registry::default().merge(sources)
}

impl Registry {
    pub fn entries(&self) -> impl Iterator<Item = &MemberEntry> {
        self.entries.values()
    }

    pub fn get(&self, name: &str) -> Option<&MemberEntry> {
        self.entries.get(&fold_name(name))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds an entry, unioning intervals with any existing entry of the same
    /// person. Returns a conflict message when genders disagree.
    pub fn add(&mut self, entry: MemberEntry) -> Option<String> {
        let key = entry.id();
        let mut conflict = None;
        match self.entries.get_mut(&key) {
            None => {
                let mut entry = entry;
                entry.intervals.sort();
                entry.intervals.dedup();
                self.entries.insert(key, entry);
            }
            Some(existing) => {
                if existing.gender == Gender::Unknown {
                    existing.gender = entry.gender;
                } else if entry.gender != Gender::Unknown && entry.gender != existing.gender {
                    let msg = format!(
                        "{}: gender {} conflicts with {}; keeping {}",
                        existing.official_name, entry.gender, existing.gender, existing.gender
                    );
                    log::warn!("{msg}");
                    conflict = Some(msg);
                }
                existing.intervals.extend(entry.intervals);
                existing.intervals.sort();
                existing.intervals.dedup();
            }
        }
        conflict
    }

    /// Merges support datasets into this registry.
    pub fn merge(mut self, sources: &SupportDatasets) -> Result<MergeOutcome, ResolveError> {
        let mut conflicts = Vec::new();
        let mut incoming = Vec::new();
        for m in &sources.members {
            let (start, end) = span(&m.start_date, &m.end_date, &m.name)?;
            incoming.push(MemberEntry {
                official_name: m.name.trim().to_string(),
                gender: gender(&m.gender)?,
                intervals: vec![MemberInterval {
                    start,
                    end,
                    party: m.party.clone(),
                    region: m.region.clone(),
                    roles: vec![MEMBER_ROLE.to_string()],
                    government: String::new(),
                }],
            });
        }
        for p in sources.government_members.iter().chain(&sources.extra_posts) {
            let (start, end) = span(&p.start_date, &p.end_date, &p.name)?;
            incoming.push(MemberEntry {
                official_name: p.name.trim().to_string(),
                gender: gender(&p.gender)?,
                intervals: vec![MemberInterval {
                    start,
                    end,
                    party: String::new(),
                    region: String::new(),
                    roles: vec![p.role.clone()],
                    government: String::new(),
                }],
            });
        }
        let mut governments = Vec::new();
        for g in &sources.governments {
            let (start, end) = span(&g.start_date, &g.end_date, &g.name)?;
            governments.push((start, end, g.name.clone()));
        }
        governments.sort();
        for mut entry in incoming {
            entry.intervals = entry
                .intervals
                .into_iter()
                .flat_map(|i| attach_governments(i, &governments))
                .collect();
            conflicts.extend(self.add(entry));
        }
        if !governments.is_empty() {
            for entry in self.entries.values_mut() {
                let intervals = std::mem::take(&mut entry.intervals);
                entry.intervals = intervals
                    .into_iter()
                    .flat_map(|i| attach_governments(i, &governments))
                    .collect();
                entry.intervals.sort();
                entry.intervals.dedup();
            }
        }
        Ok(MergeOutcome {
            registry: self,
            conflicts,
        })
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<(), ResolveError> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(REGISTRY_COLUMNS).map_err(ResolveError::table)?;
        for e in self.entries.values() {
            for i in &e.intervals {
                out.write_record([
                    e.official_name.as_str(),
                    e.gender.as_str(),
                    &i.start.to_string(),
                    &i.end.to_string(),
                    &i.party,
                    &i.region,
                    &i.roles.join(ROLE_SEPARATOR),
                    &i.government,
                ])
                .map_err(ResolveError::table)?;
            }
        }
        out.flush().map_err(|e| ResolveError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn read<R: Read>(reader: R) -> Result<Self, ResolveError> {
        let mut registry = Registry::default();
        let mut rdr = csv::Reader::from_reader(reader);
        for row in rdr.records() {
            let row = row.map_err(ResolveError::table)?;
            if row.len() != REGISTRY_COLUMNS.len() {
                return Err(ResolveError::Invalid(format!(
                    "registry row has {} columns, expected {}",
                    row.len(),
                    REGISTRY_COLUMNS.len()
                )));
            }
            let (start, end) = span(&row[2], &row[3], &row[0])?;
            let roles = if row[6].is_empty() {
                vec![]
            } else {
                row[6].split(ROLE_SEPARATOR).map(str::to_string).collect()
            };
            registry.add(MemberEntry {
                official_name: row[0].to_string(),
                gender: gender(&row[1])?,
                intervals: vec![MemberInterval {
                    start,
                    end,
                    party: row[4].to_string(),
                    region: row[5].to_string(),
                    roles,
                    government: row[7].to_string(),
                }],
            });
        }
        Ok(registry)
    }
}

pub const REGISTRY_COLUMNS: [&str; 8] = [
    "official_name",
    "gender",
    "start_date",
    "end_date",
    "party",
    "region",
    "roles",
    "government",
];

/// Splits an interval so every piece lies within one government (or none),
/// naming the government on each piece. Intervals that already name a
/// government are kept as they are.
fn attach_governments(interval: MemberInterval, governments: &[(NaiveDate, NaiveDate, String)]) -> Vec<MemberInterval> {
    if !interval.government.is_empty() {
        return vec![interval];
    }
    let overlapping: Vec<_> = governments
        .iter()
        .filter(|(s, e, _)| *s <= interval.end && *e >= interval.start)
        .collect();
    if overlapping.is_empty() {
        return vec![interval];
    }
    let mut pieces = Vec::new();
    let mut cursor = interval.start;
    for (gs, ge, name) in overlapping {
        let start = (*gs).max(interval.start);
        let end = (*ge).min(interval.end);
        if cursor < start {
            pieces.push(MemberInterval {
                start: cursor,
                end: start.pred_opt().unwrap_or(start),
                ..interval.clone()
            });
        }
        pieces.push(MemberInterval {
            start,
            end,
            government: name.clone(),
            ..interval.clone()
        });
        cursor = cursor.max(end.succ_opt().unwrap_or(end));
    }
    if cursor <= interval.end {
        pieces.push(MemberInterval {
            start: cursor,
            ..interval
        });
    }
    pieces
}
