mod common;

use std::collections::HashMap;
use std::fs::File;

use common::{fixture, golden_speakers, nicknames, registry, UNRESOLVED};
use diachrony::corpus::Gender;
use diachrony::ingest::{read_sitting_meta, Ingestor};
use diachrony::parser::{detect_speaker_lines, load_sittings, segment_speeches, SpeakerPatterns};
use diachrony::resolve::{read_rows, GovernmentRow, Resolver};

fn run() -> diachrony::ingest::IngestReport {
    let registry = registry();
    let resolver = Resolver::new(&registry, &nicknames());
    let patterns = SpeakerPatterns::default();
    let meta = read_sitting_meta(File::open(fixture("sittings_meta.csv")).unwrap()).unwrap();
    let governments: Vec<GovernmentRow> = read_rows(File::open(fixture("registry/governments.csv")).unwrap()).unwrap();
    let sittings = load_sittings(fixture("sittings")).unwrap();
    Ingestor::new(&resolver, &patterns)
        .with_governments(&governments)
        .unwrap()
        .ingest(sittings, &meta)
}

#[test]
fn golden_speech_count_and_speakers() {
    let report = run();
    let golden = golden_speakers();
    assert_eq!(golden.len(), 57);
    assert_eq!(report.records.len(), golden.len());
    assert_eq!(report.empty_speeches, 0);
    assert!(report.missing_meta.is_empty());
    for (assignment, (file_id, index, member)) in report.assignments.iter().zip(&golden) {
        assert_eq!(&assignment.file_id, file_id);
        assert_eq!(assignment.index, *index);
        let got = assignment.member.as_deref().unwrap_or(UNRESOLVED);
        assert_eq!(got, member, "{file_id}#{index} mention {:?}", assignment.mention);
    }
    let per_file: HashMap<&str, usize> = golden.iter().fold(HashMap::new(), |mut m, g| {
        *m.entry(g.0.as_str()).or_default() += 1;
        m
    });
    assert_eq!(per_file.len(), 10);
    let unresolved = golden.iter().filter(|g| g.2 == UNRESOLVED).count();
    assert_eq!(report.unresolved.len(), unresolved);
}

#[test]
fn records_carry_dated_metadata() {
    let report = run();
    let by = |name: &str, date: &str| {
        report
            .records
            .iter()
            .find(|r| r.member_name == name && r.sitting_date.to_string() == date)
            .unwrap_or_else(|| panic!("{name} {date}"))
    };
    let maria = by("ΜΑΡΙΑ ΚΩΝΣΤΑΝΤΙΝΙΔΟΥ", "2017-04-05");
    assert_eq!(maria.member_gender, Gender::Female);
    assert_eq!(maria.political_party, "ΣΥΝΑΣΠΙΣΜΟΣ ΡΙΖΟΣΠΑΣΤΙΚΗΣ ΑΡΙΣΤΕΡΑΣ");
    assert!(maria.roles.iter().any(|r| r == "ΥΦΥΠΟΥΡΓΟΣ ΠΑΙΔΕΙΑΣ"));
    assert_eq!(maria.government, "ΚΥΒΕΡΝΗΣΗ ΣΕΠΤΕΜΒΡΙΟΥ 2015");
    assert_eq!(maria.parliamentary_session, "ΣΥΝΟΔΟΣ Γ΄");
    // Before the appointment only the member role applies.
    let maria_early = by("ΜΑΡΙΑ ΚΩΝΣΤΑΝΤΙΝΙΔΟΥ", "2016-02-10");
    assert_eq!(maria_early.roles, vec!["member of parliament".to_string()]);
    // Minister without a seat: name and gender come from the genitive entry.
    let sarris = by("ΠΑΝΑΓΙΩΤΗΣ ΣΑΡΡΗΣ", "2017-01-25");
    assert_eq!(sarris.member_gender, Gender::Male);
    assert_eq!(sarris.roles, vec!["ΥΠΟΥΡΓΟΣ ΟΙΚΟΝΟΜΙΚΩΝ".to_string()]);
    assert_eq!(sarris.political_party, "");
    // Gender missing from the members table is inferred from the first name.
    assert_eq!(by("ΣΟΦΙΑ ΠΑΠΑΔΑΚΗ", "2016-10-12").member_gender, Gender::Female);
    // Former member: resolved without a dated interval, so no party.
    let former = by("ΑΝΔΡΕΑΣ ΝΙΚΟΛΑΟΥ", "2017-11-22");
    assert_eq!(former.political_party, "");
    assert_eq!(former.government, "ΚΥΒΕΡΝΗΣΗ ΣΕΠΤΕΜΒΡΙΟΥ 2015");
    // Unresolved speakers keep the written name.
    let unknown = by("ΒΑΣΙΛΕΙΟΣ ΑΓΝΩΣΤΟΠΟΥΛΟΣ", "2017-04-05");
    assert_eq!(unknown.member_gender, Gender::Unknown);
    assert!(report.records.iter().all(|r| !r.speech.trim().is_empty()));
}

#[test]
fn mid_line_mentions_are_flagged() {
    let report = run();
    let mid: Vec<_> = report
        .assignments
        .iter()
        .filter(|a| !a.line_start)
        .map(|a| (a.file_id.as_str(), a.index))
        .collect();
    assert_eq!(mid, vec![("sitting_02", 4), ("sitting_07", 4)]);
}

#[test]
fn segmentation_reconstructs_every_sitting() {
    let patterns = SpeakerPatterns::default();
    for sitting in load_sittings(fixture("sittings")).unwrap() {
        let mentions = detect_speaker_lines(&sitting.text, &patterns);
        let seg = segment_speeches(&sitting, &mentions);
        let mut rebuilt = sitting.text[seg.intro_span.clone()].to_string();
        for (m, s) in mentions.iter().zip(&seg.speeches) {
            rebuilt.push_str(&sitting.text[m.span.clone()]);
            rebuilt.push_str(&s.text);
        }
        assert_eq!(rebuilt, sitting.text, "{}", sitting.file_id);
        assert!(seg.speeches.iter().all(|s| !s.empty));
    }
}

#[test]
fn missing_metadata_is_reported() {
    let registry = registry();
    let resolver = Resolver::new(&registry, &nicknames());
    let patterns = SpeakerPatterns::default();
    let mut meta = read_sitting_meta(File::open(fixture("sittings_meta.csv")).unwrap()).unwrap();
    meta.remove("sitting_03");
    let report = Ingestor::new(&resolver, &patterns).ingest(load_sittings(fixture("sittings")).unwrap(), &meta);
    assert_eq!(report.missing_meta, vec!["sitting_03".to_string()]);
    assert_eq!(report.records.len(), 57 - 7);
}
