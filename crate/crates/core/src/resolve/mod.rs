//! Entity resolution: matching speaker mentions to registry members.
//!
//! Every registry member is expanded into its name variants
//! ([`generate_variants`]); a mention resolves to the member whose best
//! variant is most similar to it under Jaro-Winkler, provided the similarity
//! reaches [`MATCH_THRESHOLD`]. Members serving on the sitting date are
//! preferred; when none of them passes the threshold, members serving at any
//! time are considered.

mod cases;
mod jaro;
mod registry;
mod variants;

use std::cmp::Ordering;
use std::collections::HashMap;

use chrono::NaiveDate;
use thiserror::Error;

pub use cases::{genitive_to_nominative, NameCaseTable};
pub use jaro::{common_prefix, jaro, jaro_winkler, MAX_PREFIX, PREFIX_WEIGHT};
pub use registry::{
    merge_support_datasets, read_rows, GovernmentRow, MemberEntry, MemberInterval, MemberRow, MergeOutcome, PostRow,
    Registry, SupportDatasets, MEMBER_ROLE, REGISTRY_COLUMNS,
};
pub use variants::{generate_variants, NameVariantSet, Nicknames, MAX_PERMUTED_WORDS};

use crate::parser::SpeakerMention;
use crate::text::fold_name;

/// Minimum Jaro-Winkler similarity for accepting a match.
pub const MATCH_THRESHOLD: f64 = 0.95;

#[derive(Debug, Error)]
pub enum ResolveError {
    #[error("table error: {0}")]
    Table(String),
    #[error("{0}")]
    Invalid(String),
}

impl ResolveError {
    fn table(err: impl std::fmt::Display) -> Self {
        ResolveError::Table(err.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    Resolved {
        /// Index into [`Resolver::entries`].
        entry: usize,
        similarity: f64,
        /// The member was serving on the sitting date.
        dated: bool,
    },
    Unresolved {
        /// Best candidate below the threshold, if any.
        best: Option<(usize, f64)>,
    },
}

impl Resolution {
    pub fn entry(&self) -> Option<usize> {
        match self {
            Resolution::Resolved { entry, .. } => Some(*entry),
            Resolution::Unresolved { .. } => None,
        }
    }
}

/// Registry with precomputed name variants.
#[derive(Debug, Clone)]
pub struct Resolver {
    entries: Vec<MemberEntry>,
    ids: Vec<String>,
    variants: Vec<NameVariantSet>,
    exact: HashMap<String, Vec<usize>>,
    threshold: f64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    entry: usize,
    similarity: f64,
    prefix: usize,
}

impl Resolver {
    pub fn new(registry: &Registry, nicknames: &Nicknames) -> Self {
        Self::from_entries(registry.entries().cloned().collect(), nicknames)
    }

    pub fn from_entries(mut entries: Vec<MemberEntry>, nicknames: &Nicknames) -> Self {
        entries.sort_by_key(MemberEntry::id);
        let ids: Vec<String> = entries.iter().map(MemberEntry::id).collect();
        let variants: Vec<NameVariantSet> = entries
            .iter()
            .map(|e| generate_variants(&e.official_name, nicknames))
            .collect();
        let mut exact: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, v) in variants.iter().enumerate() {
            for name in &v.variants {
                exact.entry(name.clone()).or_default().push(i);
            }
        }
        Self {
            entries,
            ids,
            variants,
            exact,
            threshold: MATCH_THRESHOLD,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn entries(&self) -> &[MemberEntry] {
        &self.entries
    }

    pub fn variants(&self, entry: usize) -> &NameVariantSet {
        &self.variants[entry]
    }

    fn best_variant(&self, entry: usize, query: &str) -> Candidate {
        let mut best = Candidate {
            entry,
            similarity: f64::NEG_INFINITY,
            prefix: 0,
        };
        for v in &self.variants[entry].variants {
            let similarity = jaro_winkler(query, v);
            let prefix = common_prefix(query, v);
            if similarity > best.similarity || (similarity == best.similarity && prefix > best.prefix) {
                best = Candidate {
                    entry,
                    similarity,
                    prefix,
                };
            }
        }
        best
    }

    /// Higher similarity, then longer common prefix, then smaller entry id.
    fn better(&self, a: &Candidate, b: &Candidate) -> bool {
        match a.similarity.partial_cmp(&b.similarity).unwrap_or(Ordering::Equal) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match a.prefix.cmp(&b.prefix) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => self.ids[a.entry] < self.ids[b.entry],
            },
        }
    }

    /// Resolves a name as written in a record on `date`.
    pub fn resolve_name(&self, name: &str, date: NaiveDate) -> Resolution {
        let query = fold_name(name);
        if query.is_empty() || self.entries.is_empty() {
            return Resolution::Unresolved { best: None };
        }
        if let Some(hits) = self.exact.get(&query) {
            let dated = hits
                .iter()
                .copied()
                .filter(|&i| self.entries[i].active_on(date))
                .min_by(|&a, &b| self.ids[a].cmp(&self.ids[b]));
            if let Some(entry) = dated {
                return Resolution::Resolved {
                    entry,
                    similarity: 1.0,
                    dated: true,
                };
            }
        }
        let candidates: Vec<Candidate> = (0..self.entries.len()).map(|i| self.best_variant(i, &query)).collect();
        let pick = |dated_only: bool| {
            candidates
                .iter()
                .filter(|c| c.similarity >= self.threshold)
                .filter(|c| !dated_only || self.entries[c.entry].active_on(date))
                .fold(None::<&Candidate>, |best, c| match best {
                    Some(b) if !self.better(c, b) => Some(b),
                    _ => Some(c),
                })
        };
        if let Some(c) = pick(true) {
            return Resolution::Resolved {
                entry: c.entry,
                similarity: c.similarity,
                dated: true,
            };
        }
        if let Some(c) = pick(false) {
            return Resolution::Resolved {
                entry: c.entry,
                similarity: c.similarity,
                dated: false,
            };
        }
        let best = candidates
            .iter()
            .fold(None::<&Candidate>, |best, c| match best {
                Some(b) if !self.better(c, b) => Some(b),
                _ => Some(c),
            })
            .map(|c| (c.entry, c.similarity));
        Resolution::Unresolved { best }
    }
}

/// Resolves a detected speaker mention against the registry.
pub fn resolve_speaker(mention: &SpeakerMention, resolver: &Resolver, date: NaiveDate) -> Resolution {
    resolver.resolve_name(mention.lookup_name(), date)
}
