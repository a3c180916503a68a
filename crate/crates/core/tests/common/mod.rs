//! Fixture loading and independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod oracles;

use std::fs::File;
use std::path::PathBuf;

use diachrony::resolve::merge_support_datasets;
use diachrony::resolve::{read_rows, NameCaseTable, Nicknames, Registry, SupportDatasets};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

fn open(rel: &str) -> File {
    File::open(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn name_cases() -> NameCaseTable {
    NameCaseTable::from_reader(open("name_cases.csv")).unwrap()
}

pub fn nicknames() -> Nicknames {
    Nicknames::from_reader(open("nicknames.csv")).unwrap()
}

/// Support tables as stored (post-holder names still in the genitive).
pub fn raw_support() -> SupportDatasets {
    SupportDatasets {
        members: read_rows(open("registry/members.csv")).unwrap(),
        government_members: read_rows(open("registry/government_members.csv")).unwrap(),
        governments: read_rows(open("registry/governments.csv")).unwrap(),
        extra_posts: read_rows(open("registry/extra_posts.csv")).unwrap(),
    }
}

pub fn registry() -> Registry {
    let mut support = raw_support();
    support.apply_name_cases(&name_cases());
    let out = merge_support_datasets(&support).unwrap();
    assert!(out.conflicts.is_empty(), "{:?}", out.conflicts);
    out.registry
}

/// `(file_id, index, member)` rows; `UNRESOLVED` marks speeches whose
/// speaker is not in the registry.
pub fn golden_speakers() -> Vec<(String, usize, String)> {
    std::fs::read_to_string(fixture("golden_speakers.tsv"))
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].to_string(), f[1].parse().unwrap(), f[2].to_string())
        })
        .collect()
}

pub const UNRESOLVED: &str = "UNRESOLVED";
