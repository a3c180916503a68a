//! `stats` and `preprocess`: both read a speech table, cut it into slices
//! and normalize every speech the same way.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::path::PathBuf;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use diachrony::corpus::{
    corpus_stats, gender_participation, load_speeches, shared_vocabulary, AverageStats, CorpusStats, Slicing,
    SpeechRecord, TableFormat, TimeSlice,
};
use diachrony::preprocess::{
    merge_periods, normalize_tokens, parse_merge_map, render_tokens, tag_party_references, PartyTagTable, Stopwords,
    FULL_STOP,
};

use crate::args::CorpusArgs;
use crate::context::Context;
use crate::error::{CliError, Result};
use crate::prepared::{write_prepared, SLICING_FILE};

struct Corpus {
    records: Vec<SpeechRecord>,
    slicing: Slicing,
    normalizer: Normalizer,
    inputs: Vec<PathBuf>,
}

struct Normalizer {
    stopwords: Stopwords,
    parties: Option<PartyTagTable>,
    lowercase: bool,
}

impl Normalizer {
    fn tokens(&self, speech: &str) -> Vec<String> {
        let tagged = match &self.parties {
            Some(t) => tag_party_references(speech, t),
            None => speech.to_string(),
        };
        let text = if self.lowercase { tagged.to_lowercase() } else { tagged };
        normalize_tokens(&text, &self.stopwords)
    }
}

/// One slice per distinct period label, ordered by the label's earliest
/// sitting date.
pub fn period_slicing(records: &[SpeechRecord]) -> Result<Slicing> {
    let mut first: HashMap<&str, NaiveDate> = HashMap::new();
    for r in records {
        let p = r.parliamentary_period.trim();
        if p.is_empty() {
            continue;
        }
        let d = first.entry(p).or_insert(r.sitting_date);
        *d = (*d).min(r.sitting_date);
    }
    let mut periods: Vec<(NaiveDate, &str)> = first.into_iter().map(|(p, d)| (d, p)).collect();
    periods.sort();
    if periods.is_empty() {
        return Err(CliError::input("no record has a parliamentary period; pass --slicing"));
    }
    let slices = periods.into_iter().map(|(_, p)| TimeSlice::new(p, &[p])).collect();
    Ok(Slicing::new(slices)?)
}

fn load(ctx: &Context, args: CorpusArgs) -> Result<Corpus> {
    let input = ctx.input()?;
    let s = &ctx.settings;
    let format = if s.value("greek_dates", args.greek_dates, false)? {
        TableFormat::greek_parliament()
    } else {
        TableFormat::default()
    };
    let table = load_speeches(&input, &format)?;
    for e in table.errors.iter().take(20) {
        log::warn!("{}: {e}", input.display());
    }
    if !table.errors.is_empty() {
        log::warn!("{} rows rejected", table.errors.len());
    }
    if table.records.is_empty() {
        return Err(CliError::input(format!("{}: no valid speeches", input.display())));
    }
    let mut inputs = vec![input];
    let slicing_path = s.path("slicing", args.slicing)?;
    let mut slicing = match &slicing_path {
        Some(p) => Slicing::load(p)?,
        None => period_slicing(&table.records)?,
    };
    inputs.extend(slicing_path);
    if let Some(spec) = s.optional::<String>("merge", args.merge)? {
        slicing = merge_periods(&slicing, &parse_merge_map(&spec)?)?;
    }
    let stopwords = match s.path("stopwords", args.stopwords)? {
        Some(p) => {
            let sw = Stopwords::load(&p)?;
            inputs.push(p);
            sw
        }
        None => Stopwords::default(),
    };
    let parties = match s.path("parties", args.parties)? {
        Some(p) => {
            let t = PartyTagTable::load(&p)?;
            inputs.push(p);
            Some(t)
        }
        None => None,
    };
    let lowercase = s.value("lowercase", args.lowercase, true)?;
    Ok(Corpus {
        records: table.records,
        slicing,
        normalizer: Normalizer {
            stopwords,
            parties,
            lowercase,
        },
        inputs,
    })
}

/// Slice index of every record, `None` when no slice claims it.
fn assignments(corpus: &Corpus) -> Vec<Option<usize>> {
    let ids: HashMap<&str, usize> = corpus
        .slicing
        .slices()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.as_str(), i))
        .collect();
    corpus
        .records
        .iter()
        .map(|r| corpus.slicing.assign(r).map(|s| ids[s.id.as_str()]))
        .collect()
}

#[derive(Serialize)]
struct SliceCount {
    id: String,
    speeches: usize,
    tokens: usize,
}

#[derive(Serialize)]
struct PreprocessSummary {
    kind: &'static str,
    slices: Vec<SliceCount>,
    excluded_records: usize,
    lowercase: bool,
    stopwords: usize,
}

pub fn preprocess(ctx: &Context, args: CorpusArgs) -> Result<()> {
    let corpus = load(ctx, args)?;
    let assigned = assignments(&corpus);
    let tokens: Vec<Option<Vec<String>>> = corpus
        .records
        .par_iter()
        .zip(assigned.par_iter())
        .map(|(r, a)| a.map(|_| corpus.normalizer.tokens(&r.speech)))
        .collect();
    let mut slices: Vec<(String, Vec<Vec<String>>)> = corpus
        .slicing
        .slices()
        .iter()
        .map(|s| (s.id.clone(), Vec::new()))
        .collect();
    let mut excluded = 0;
    for (a, t) in assigned.iter().zip(tokens) {
        match (a, t) {
            (Some(i), Some(t)) => slices[*i].1.push(t),
            _ => excluded += 1,
        }
    }
    for (id, speeches) in &slices {
        if speeches.is_empty() {
            log::warn!("slice {id} has no speeches");
        }
    }
    let out = ctx.output(&corpus.inputs)?;
    write_prepared(&out, &slices)?;
    out.write_with(SLICING_FILE, |w| {
        w.write_all(corpus.slicing.to_config_string().as_bytes())
    })?;
    out.write_json(
        "preprocess.json",
        &PreprocessSummary {
            kind: "preprocess",
            slices: slices
                .iter()
                .map(|(id, s)| SliceCount {
                    id: id.clone(),
                    speeches: s.len(),
                    tokens: s.iter().map(Vec::len).sum(),
                })
                .collect(),
            excluded_records: excluded,
            lowercase: corpus.normalizer.lowercase,
            stopwords: corpus.normalizer.stopwords.len(),
        },
    )?;
    ctx.finish(&out, &corpus.inputs, false)
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceStats {
    pub id: String,
    pub speeches: usize,
    pub raw: CorpusStats,
    pub preprocessed: CorpusStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapRow {
    pub slice_a: String,
    pub slice_b: String,
    pub raw: usize,
    pub preprocessed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenderRow {
    pub party: String,
    pub period: String,
    pub member_pct: f64,
    pub speech_char_pct: f64,
    pub members: usize,
}

/// The `stats` report, also read by `plot --kind gender|vocab-overlap`.
#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub kind: &'static str,
    pub slices: Vec<SliceStats>,
    pub average_raw: AverageStats,
    pub average_preprocessed: AverageStats,
    pub excluded_records: usize,
    /// Consecutive slice pairs.
    pub vocab_overlap: Vec<OverlapRow>,
    /// Parties in name order, periods by earliest sitting date.
    pub gender: Vec<GenderRow>,
}

struct SliceText {
    speeches: usize,
    raw_tokens: Vec<String>,
    raw_text: String,
    tokens: Vec<String>,
    text: String,
}

fn slice_text(corpus: &Corpus, members: &[usize]) -> SliceText {
    let per_speech: Vec<(Vec<String>, String)> = members
        .par_iter()
        .map(|&i| {
            let mut t = corpus.normalizer.tokens(&corpus.records[i].speech);
            let rendered = render_tokens(&t);
            t.retain(|x| x != FULL_STOP);
            (t, rendered)
        })
        .collect();
    let mut out = SliceText {
        speeches: members.len(),
        raw_tokens: Vec::new(),
        raw_text: String::new(),
        tokens: Vec::new(),
        text: String::new(),
    };
    for (k, &i) in members.iter().enumerate() {
        let speech = &corpus.records[i].speech;
        if k > 0 {
            out.raw_text.push('\n');
            out.text.push('\n');
        }
        out.raw_text.push_str(speech);
        out.raw_tokens.extend(speech.split_whitespace().map(str::to_string));
    }
    for (k, (t, rendered)) in per_speech.into_iter().enumerate() {
        if k > 0 {
            out.text.push('\n');
        }
        out.text.push_str(&rendered);
        out.tokens.extend(t);
    }
    out
}

fn unique(tokens: &[String]) -> Vec<String> {
    let set: HashSet<&str> = tokens.iter().map(String::as_str).collect();
    set.into_iter().map(str::to_string).collect()
}

pub fn stats(ctx: &Context, args: CorpusArgs) -> Result<()> {
    let corpus = load(ctx, args)?;
    let assigned = assignments(&corpus);
    let n = corpus.slicing.slices().len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, a) in assigned.iter().enumerate() {
        if let Some(i) = a {
            members[*i].push(r);
        }
    }
    let mut slices = Vec::with_capacity(n);
    let mut vocab: Vec<(Vec<String>, Vec<String>)> = Vec::with_capacity(n);
    for (slice, m) in corpus.slicing.slices().iter().zip(&members) {
        let t = slice_text(&corpus, m);
        slices.push(SliceStats {
            id: slice.id.clone(),
            speeches: t.speeches,
            raw: corpus_stats(&t.raw_tokens, &t.raw_text),
            preprocessed: corpus_stats(&t.tokens, &t.text),
        });
        vocab.push((unique(&t.raw_tokens), unique(&t.tokens)));
    }
    let vocab_overlap = (1..n)
        .map(|i| OverlapRow {
            slice_a: slices[i - 1].id.clone(),
            slice_b: slices[i].id.clone(),
            raw: shared_vocabulary(&vocab[i - 1].0, &vocab[i].0).size,
            preprocessed: shared_vocabulary(&vocab[i - 1].1, &vocab[i].1).size,
        })
        .collect();

    let mut period_start: BTreeMap<&str, NaiveDate> = BTreeMap::new();
    for r in &corpus.records {
        let d = period_start.entry(&r.parliamentary_period).or_insert(r.sitting_date);
        *d = (*d).min(r.sitting_date);
    }
    let mut gender: Vec<GenderRow> = gender_participation(&corpus.records)
        .into_iter()
        .map(|((party, period), g)| GenderRow {
            party,
            period,
            member_pct: g.member_pct,
            speech_char_pct: g.speech_char_pct,
            members: g.members,
        })
        .collect();
    gender.sort_by(|a, b| {
        a.party
            .cmp(&b.party)
            .then_with(|| {
                period_start
                    .get(a.period.as_str())
                    .cmp(&period_start.get(b.period.as_str()))
            })
            .then_with(|| a.period.cmp(&b.period))
    });

    let raw: Vec<CorpusStats> = slices.iter().map(|s| s.raw).collect();
    let pre: Vec<CorpusStats> = slices.iter().map(|s| s.preprocessed).collect();
    let report = StatsReport {
        kind: "stats",
        average_raw: AverageStats::of(&raw),
        average_preprocessed: AverageStats::of(&pre),
        excluded_records: assigned.iter().filter(|a| a.is_none()).count(),
        slices,
        vocab_overlap,
        gender,
    };

    let out = ctx.output(&corpus.inputs)?;
    out.write_with("stats.tsv", |w| {
        writeln!(
            w,
            "slice\tstage\tspeeches\tcharacters\ttokens\tunique_tokens\tsentences\tunique_sentences"
        )?;
        for s in &report.slices {
            for (stage, c) in [("raw", &s.raw), ("preprocessed", &s.preprocessed)] {
                writeln!(
                    w,
                    "{}\t{stage}\t{}\t{}\t{}\t{}\t{}\t{}",
                    s.id, s.speeches, c.characters, c.tokens, c.unique_tokens, c.sentences, c.unique_sentences
                )?;
            }
        }
        Ok(())
    })?;
    out.write_with("stats_average.tsv", |w| {
        writeln!(
            w,
            "stage\tcharacters\ttokens\tunique_tokens\tsentences\tunique_sentences"
        )?;
        for (stage, a) in [
            ("raw", &report.average_raw),
            ("preprocessed", &report.average_preprocessed),
        ] {
            writeln!(
                w,
                "{stage}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{:.2}",
                a.characters, a.tokens, a.unique_tokens, a.sentences, a.unique_sentences
            )?;
        }
        Ok(())
    })?;
    out.write_with("vocab_overlap.tsv", |w| {
        writeln!(w, "slice_a\tslice_b\traw\tpreprocessed")?;
        for o in &report.vocab_overlap {
            writeln!(w, "{}\t{}\t{}\t{}", o.slice_a, o.slice_b, o.raw, o.preprocessed)?;
        }
        Ok(())
    })?;
    out.write_with("gender.tsv", |w| {
        writeln!(w, "party\tperiod\tmember_pct\tspeech_char_pct\tmembers")?;
        for g in &report.gender {
            writeln!(
                w,
                "{}\t{}\t{:.4}\t{:.4}\t{}",
                g.party, g.period, g.member_pct, g.speech_char_pct, g.members
            )?;
        }
        Ok(())
    })?;
    out.write_json("stats.json", &report)?;
    ctx.finish(&out, &corpus.inputs, false)
}
