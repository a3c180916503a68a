mod common;

use std::collections::BTreeSet;

use common::oracles;
use common::{name_cases, nicknames, raw_support, registry};
use diachrony::corpus::{parse_date, Gender};
use diachrony::resolve::{
    generate_variants, genitive_to_nominative, jaro_winkler, merge_support_datasets, MemberRow, Nicknames, PostRow,
    Resolution, Resolver, SupportDatasets, MATCH_THRESHOLD,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn canonical_pairs_match_oracle() {
    let martha = oracles::jaro_winkler("MARTHA", "MARHTA");
    let dixon = oracles::jaro_winkler("DIXON", "DICKSONX");
    assert!((martha - 0.9611).abs() < 1e-4, "{martha}");
    assert!((dixon - 0.8133).abs() < 1e-4, "{dixon}");
    assert!((jaro_winkler("MARTHA", "MARHTA") - martha).abs() < 1e-9);
    assert!((jaro_winkler("DIXON", "DICKSONX") - dixon).abs() < 1e-9);
    assert_eq!(jaro_winkler("ΑΒΓ", "ΑΒΓ"), 1.0);
    assert_eq!(jaro_winkler("", ""), 1.0);
}

fn random_string(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[char] = &['Α', 'Β', 'Γ', 'Δ', 'Ε', 'Ο', 'Σ', 'A', 'B', 'C', ' ', '.'];
    let len = rng.gen_range(0..14);
    (0..len).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())]).collect()
}

#[test]
fn random_pairs_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let a = random_string(&mut rng);
        // Half of the pairs are perturbed copies so high similarities occur.
        let b = if rng.gen_bool(0.5) {
            let mut c: Vec<char> = a.chars().collect();
            if c.len() > 1 {
                let i = rng.gen_range(0..c.len() - 1);
                c.swap(i, i + 1);
            }
            c.into_iter().collect()
        } else {
            random_string(&mut rng)
        };
        let got = jaro_winkler(&a, &b);
        let want = oracles::jaro_winkler(&a, &b);
        assert!((got - want).abs() <= 1e-9, "{a:?} {b:?}: {got} vs {want}");
        assert!((got - jaro_winkler(&b, &a)).abs() <= 1e-12);
        assert!((0.0..=1.0).contains(&got));
        if !a.is_empty() && a != b {
            assert!(got < 1.0);
        }
    }
}

fn single_member(name: &str) -> Resolver {
    let support = SupportDatasets {
        members: vec![MemberRow {
            name: name.into(),
            start_date: "2015-01-01".into(),
            end_date: "2019-12-31".into(),
            party: "P".into(),
            region: "R".into(),
            gender: "male".into(),
        }],
        ..Default::default()
    };
    Resolver::new(&merge_support_datasets(&support).unwrap().registry, &Nicknames::new())
}

/// Oracle similarity of a mention to a two-word name: best over both word
/// orders.
fn oracle_best(mention: &str, first: &str, last: &str) -> f64 {
    let a = oracles::jaro_winkler(mention, &format!("{first} {last}"));
    let b = oracles::jaro_winkler(mention, &format!("{last} {first}"));
    a.max(b)
}

#[test]
fn threshold_rejects_094_and_accepts_095() {
    let resolver = single_member("ΓΕΩΡΓΙΟΣ ΠΑΠΑΔΟΠΟΥΛΟΣ");
    let date = parse_date("2017-01-01").unwrap();
    let below = "ΓΕΕΡΓΙΟΣ ΠΑΠΑΔΟΠΥΛΟΣ";
    let above = "ΡΕΩΡΓΙΟΣ ΠΑΠΑΔΟΠΟΥΛΟΣ";
    let s_below = oracle_best(below, "ΓΕΩΡΓΙΟΣ", "ΠΑΠΑΔΟΠΟΥΛΟΣ");
    let s_above = oracle_best(above, "ΓΕΩΡΓΙΟΣ", "ΠΑΠΑΔΟΠΟΥΛΟΣ");
    assert!((0.94..0.945).contains(&s_below), "{s_below}");
    assert!((0.95..0.955).contains(&s_above), "{s_above}");
    match resolver.resolve_name(below, date) {
        Resolution::Unresolved { best: Some((_, s)) } => assert!((s - s_below).abs() < 1e-9),
        other => panic!("{other:?}"),
    }
    match resolver.resolve_name(above, date) {
        Resolution::Resolved { similarity, .. } => assert!((similarity - s_above).abs() < 1e-9),
        other => panic!("{other:?}"),
    }
}

#[test]
fn fixture_misspellings_pass_the_threshold() {
    let resolver = Resolver::new(&registry(), &nicknames());
    let date = parse_date("2017-04-05").unwrap();
    for (mention, first, last) in [
        ("ΑΙΚΑΤΕΡΙΝΗ ΣΤΑΥΡΟΠΟΥΛΟ", "ΑΙΚΑΤΕΡΙΝΗ", "ΣΤΑΥΡΟΠΟΥΛΟΥ"),
        ("ΓΕΩΡΓΙΟΣ ΠΑΠΑΔΟΠΟΥΛΩΣ", "ΓΕΩΡΓΙΟΣ", "ΠΑΠΑΔΟΠΟΥΛΟΣ"),
    ] {
        let s = oracle_best(mention, first, last);
        assert!(s >= MATCH_THRESHOLD, "{mention}: {s}");
        let entry = resolver.resolve_name(mention, date).entry().expect(mention);
        assert_eq!(resolver.entries()[entry].official_name, format!("{first} {last}"));
    }
}

#[test]
fn resolution_never_below_threshold() {
    let resolver = Resolver::new(&registry(), &nicknames());
    let date = parse_date("2017-04-05").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let names: Vec<String> = resolver.entries().iter().map(|e| e.official_name.clone()).collect();
    for _ in 0..300 {
        let mut chars: Vec<char> = names[rng.gen_range(0..names.len())].chars().collect();
        for _ in 0..rng.gen_range(0..4) {
            let i = rng.gen_range(0..chars.len());
            chars[i] = ['Α', 'Ο', 'Ω', 'Σ'][rng.gen_range(0..4)];
        }
        let mention: String = chars.into_iter().collect();
        if let Resolution::Resolved { entry, similarity, .. } = resolver.resolve_name(&mention, date) {
            assert!(similarity >= MATCH_THRESHOLD);
            let best = resolver
                .variants(entry)
                .variants
                .iter()
                .map(|v| oracles::jaro_winkler(&mention, v))
                .fold(0.0, f64::max);
            assert!((best - similarity).abs() < 1e-9);
        }
    }
}

/// All non-empty orderings of word subsets (keeping at least two words when
/// the name has two or more), with nickname substitution per word.
fn brute_force_variants(words: &[&str], nick: &[(&str, &str)]) -> BTreeSet<String> {
    let n = words.len();
    let min = if n >= 2 { 2 } else { 1 };
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<&str> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| words[i]).collect();
        if subset.len() < min {
            continue;
        }
        let mut perms = vec![vec![]];
        for _ in 0..subset.len() {
            let mut next = vec![];
            for p in &perms {
                for (i, w) in subset.iter().enumerate() {
                    if !p.iter().any(|(j, _)| *j == i) {
                        let mut q = p.clone();
                        q.push((i, *w));
                        next.push(q);
                    }
                }
            }
            perms = next;
        }
        for p in perms {
            let mut forms: Vec<Vec<String>> = vec![vec![]];
            for (_, w) in &p {
                let mut alts = vec![w.to_string()];
                for (name, nickname) in nick {
                    if name == w {
                        alts.push(nickname.to_string());
                    }
                }
                forms = forms
                    .into_iter()
                    .flat_map(|f| alts.iter().map(move |a| [f.clone(), vec![a.clone()]].concat()))
                    .collect();
            }
            out.extend(forms.into_iter().map(|f| f.join(" ")));
        }
    }
    out
}

#[test]
fn variants_match_brute_force() {
    let mut nick = Nicknames::new();
    nick.insert("ΙΩΑΝΝΗΣ", "ΓΙΑΝΝΗΣ");
    let set = generate_variants("ΙΩΑΝΝΗΣ Κ. ΠΑΠΑΣ", &nick);
    let expected = brute_force_variants(&["ΙΩΑΝΝΗΣ", "Κ.", "ΠΑΠΑΣ"], &[("ΙΩΑΝΝΗΣ", "ΓΙΑΝΝΗΣ")]);
    let got: BTreeSet<String> = set.variants.iter().cloned().collect();
    assert_eq!(got, expected);
    assert!(got.contains("ΠΑΠΑΣ ΓΙΑΝΝΗΣ") && got.contains("ΙΩΑΝΝΗΣ ΠΑΠΑΣ"));
    assert!(got.contains(&set.canonical));

    let plain = generate_variants("Α Β Γ", &Nicknames::new());
    assert!(plain.variants.len() >= 6);
    assert_eq!(generate_variants("ΤΑΔΕ", &Nicknames::new()).variants.len(), 1);
    let two: BTreeSet<String> = generate_variants("A B", &Nicknames::new())
        .variants
        .into_iter()
        .collect();
    assert_eq!(two, BTreeSet::from(["A B".to_string(), "B A".to_string()]));
}

#[test]
fn genitive_fixture_names() {
    let table = name_cases();
    assert_eq!(
        genitive_to_nominative("ΙΩΑΝΝΟΥ ΠΑΠΑΔΟΠΟΥΛΟΥ", &table),
        ("ΙΩΑΝΝΗΣ ΠΑΠΑΔΟΠΟΥΛΟΣ".to_string(), Gender::Male)
    );
    assert_eq!(
        genitive_to_nominative("ΘΕΟΔΩΡΑΣ ΛΙΑΚΟΥ", &table),
        ("ΘΕΟΔΩΡΑ ΛΙΑΚΟΥ".to_string(), Gender::Female)
    );
    assert_eq!(
        genitive_to_nominative("ΜΑΡΙΑ ΚΩΝΣΤΑΝΤΙΝΙΔΟΥ", &table),
        ("ΜΑΡΙΑ ΚΩΝΣΤΑΝΤΙΝΙΔΟΥ".to_string(), Gender::Female)
    );
}

#[test]
fn fixture_registry_merges_sources() {
    let reg = registry();
    // 14 elected members plus two ministers without a seat.
    assert_eq!(reg.len(), 16);
    let maria = reg.get("ΜΑΡΙΑ ΚΩΝΣΤΑΝΤΙΝΙΔΟΥ").unwrap();
    let on = maria.service_on(parse_date("2017-01-01").unwrap()).unwrap();
    assert_eq!(
        on.roles,
        vec!["member of parliament".to_string(), "ΥΦΥΠΟΥΡΓΟΣ ΠΑΙΔΕΙΑΣ".to_string()]
    );
    assert_eq!(on.government, "ΚΥΒΕΡΝΗΣΗ ΣΕΠΤΕΜΒΡΙΟΥ 2015");
    assert_eq!(reg.get("ΘΕΟΔΩΡΑ ΛΙΑΚΟΥ").unwrap().gender, Gender::Female);
    assert_eq!(reg.get("ΓΕΩΡΓΙΟΣ ΠΑΠΑΔΟΠΟΥΛΟΣ").unwrap().gender, Gender::Male);
    let again = reg.clone().merge(&SupportDatasets::default()).unwrap().registry;
    assert_eq!(again, reg);
}

#[test]
fn unconverted_genitives_stay_separate() {
    // Without the case table the genitive post names do not meet the
    // nominative member names.
    let out = merge_support_datasets(&raw_support()).unwrap();
    assert!(out.registry.get("ΜΑΡΙΑΣ ΚΩΝΣΤΑΝΤΙΝΙΔΟΥ").is_some());
    assert_eq!(out.registry.len(), 20);
}

#[test]
fn overlapping_member_and_post_make_one_entry() {
    let support = SupportDatasets {
        members: vec![MemberRow {
            name: "ΕΛΕΝΗ ΑΛΕΞΙΟΥ".into(),
            start_date: "2015-09-20".into(),
            end_date: "2019-07-06".into(),
            party: "ΚΚΕ".into(),
            region: "ΛΑΡΙΣΗΣ".into(),
            gender: "female".into(),
        }],
        government_members: vec![PostRow {
            name: "ΕΛΕΝΗ ΑΛΕΞΙΟΥ".into(),
            start_date: "2016-01-01".into(),
            end_date: "2016-12-31".into(),
            role: "ΥΦΥΠΟΥΡΓΟΣ".into(),
            gender: String::new(),
        }],
        ..Default::default()
    };
    let reg = merge_support_datasets(&support).unwrap().registry;
    assert_eq!(reg.len(), 1);
    let e = reg.get("ΕΛΕΝΗ ΑΛΕΞΙΟΥ").unwrap();
    assert_eq!(e.intervals.len(), 2);
    assert!(merge_support_datasets(&SupportDatasets::default())
        .unwrap()
        .registry
        .is_empty());
}
