mod common;

use common::fixture;
use diachrony::corpus::{corpus_stats, CorpusStats};
use diachrony::parser::{load_sittings, parse_sitting, SpeakerPatterns};
use diachrony::preprocess::{
    normalize_tokens, render_tokens, tag_party_references, PartyTagTable, Stopwords, STOPWORD_TAG,
};

fn stopwords() -> Stopwords {
    Stopwords::load(fixture("stopwords.txt")).unwrap()
}

fn parties() -> PartyTagTable {
    PartyTagTable::load(fixture("parties.csv")).unwrap()
}

#[test]
fn fixture_sentences_transform_exactly() {
    let sw = stopwords();
    let text = std::fs::read_to_string(fixture("preprocess_cases.tsv")).unwrap();
    let mut n = 0;
    for line in text.lines().skip(1) {
        let (input, expected) = line.split_once('\t').unwrap();
        let expected: Vec<&str> = expected.split_whitespace().collect();
        assert_eq!(normalize_tokens(input, &sw), expected, "input {input:?}");
        n += 1;
    }
    assert_eq!(n, 13);
}

#[test]
fn party_table_fixture() {
    let t = parties();
    assert_eq!(tag_party_references("η Νέα Δημοκρατία ψήφισε", &t), "η @νδ ψήφισε");
    assert_eq!(
        tag_party_references("οι βουλευτές της Νέας Δημοκρατίας και του ΚΚΕ", &t),
        "οι βουλευτές της @νδ και του @κκε"
    );
    let once = tag_party_references("Το ΠΑΣΟΚ και ο ΣΥΡΙΖΑ.", &t);
    assert_eq!(once, "Το @πασοκ και ο @συριζα.");
    assert_eq!(tag_party_references(&once, &t), once);
    assert_eq!(tag_party_references("χωρίς κόμματα", &t), "χωρίς κόμματα");
}

fn fixture_speeches() -> Vec<String> {
    let patterns = SpeakerPatterns::default();
    load_sittings(fixture("sittings"))
        .unwrap()
        .into_iter()
        .flat_map(|mut s| parse_sitting(&mut s, &patterns))
        .map(|s| s.text.trim().to_string())
        .collect()
}

#[test]
fn output_invariants_on_fixture_corpus() {
    let sw = stopwords();
    let t = parties();
    for speech in fixture_speeches() {
        let tokens = normalize_tokens(&tag_party_references(&speech, &t), &sw);
        for tok in &tokens {
            let len = tok.chars().count();
            assert!(len >= 2 || tok == ".", "{tok:?}");
            assert!(diachrony::text::strip_accents(tok) == *tok, "{tok:?}");
            assert!(!sw.contains(tok) || tok == STOPWORD_TAG);
        }
    }
}

fn stats_before_after(speeches: &[String]) -> (CorpusStats, CorpusStats) {
    let sw = stopwords();
    let t = parties();
    let raw = speeches.join("\n");
    let mut tokens = Vec::new();
    let mut rendered = Vec::new();
    for s in speeches {
        let toks = normalize_tokens(&tag_party_references(s, &t), &sw);
        rendered.push(render_tokens(&toks));
        tokens.extend(toks);
    }
    let processed = rendered.join("\n");
    let before = corpus_stats(&raw.split_whitespace().collect::<Vec<_>>(), &raw);
    let words: Vec<&String> = tokens.iter().filter(|t| *t != ".").collect();
    (before, corpus_stats(&words, &processed))
}

#[test]
fn characters_and_sentences_do_not_increase() {
    let text = std::fs::read_to_string(fixture("transcript_sample.txt")).unwrap();
    let speeches: Vec<String> = text.lines().map(str::to_string).collect();
    let (before, after) = stats_before_after(&speeches);
    assert!(after.characters <= before.characters, "{after:?} vs {before:?}");
    assert!(after.sentences <= before.sentences, "{after:?} vs {before:?}");
}

#[test]
fn sentences_do_not_increase_on_sitting_fixture() {
    let (before, after) = stats_before_after(&fixture_speeches());
    assert!(after.sentences <= before.sentences, "{after:?} vs {before:?}");
}

#[test]
fn bundled_data_files_load() {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let sw = Stopwords::load(data.join("stopwords_el.txt")).unwrap();
    assert!(sw.len() > 100);
    let table = PartyTagTable::load(data.join("parties_el.csv")).unwrap();
    let tagged = tag_party_references("Η Νέα Δημοκρατία και το ΚΚΕ ψήφισαν.", &table);
    assert_eq!(tagged, "Η @νδ και το @κκε ψήφισαν.");
    let tokens = normalize_tokens(&tagged.to_lowercase(), &sw);
    assert_eq!(tokens, ["@sw", "@νδ", "@sw", "@sw", "@κκε", "ψηφισαν", "."]);
}
