//! `track` and `party-drift`.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use diachrony::embed::TrainConfig;
use diachrony::eval::{party_drift, track_topics, TopicReport, TrackConfig};
use diachrony::preprocess::{normalize_tokens, PartyTagTable, Stopwords};

use crate::args::{BootstrapArgs, PartyDriftArgs, TrackArgs, TrainArgs};
use crate::context::{read_text, Context};
use crate::error::{CliError, Result};
use crate::manifest::OutputDir;
use crate::prepared::load_slices;

/// The `track` / `party-drift` report, read by `plot --kind topic|party`.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesFile {
    pub kind: &'static str,
    pub slices: Vec<String>,
    pub words: Vec<String>,
    pub n_seeds: usize,
    pub report: TopicReport,
}

/// Maps a user-supplied word onto the corpus token form (lowercase, no
/// accents). Input that does not normalize to one token is kept trimmed.
pub fn corpus_form(word: &str) -> String {
    let tokens = normalize_tokens(&word.to_lowercase(), &Stopwords::default());
    match tokens.as_slice() {
        [one] => one.clone(),
        _ => word.trim().to_string(),
    }
}

fn word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn dedup_keep_order(words: Vec<String>) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    words.into_iter().filter(|w| seen.insert(w.clone())).collect()
}

struct Series {
    input: PathBuf,
    slices: Vec<(String, Vec<String>)>,
    config: TrackConfig,
}

fn load_series(
    ctx: &Context,
    slices: Vec<String>,
    seeds: Option<usize>,
    boot: &BootstrapArgs,
    train: &TrainArgs,
) -> Result<Series> {
    let input = ctx.input()?;
    let wanted = ctx.settings.list::<String>("slices", slices, Vec::new())?;
    let slices = load_slices(&input, &wanted, ctx.load_options(train)?)?;
    if slices.len() < 2 {
        return Err(CliError::usage("a series needs at least two slices"));
    }
    let (bootstrap_resamples, level) = ctx.bootstrap(boot)?;
    let n_seeds = ctx.settings.value("seeds", seeds, 50usize)?;
    if n_seeds == 0 {
        return Err(CliError::usage("--seeds must be at least 1"));
    }
    let config = TrackConfig {
        n_seeds,
        base_seed: ctx.seed()?,
        train: ctx.train_config(train, TrainConfig::compass())?,
        bootstrap_resamples,
        level,
        neighbors: 10,
    };
    Ok(Series { input, slices, config })
}

fn write_rows(out: &OutputDir, name: &str, report: &TopicReport) -> Result<()> {
    out.write_with(name, |w| {
        writeln!(w, "word\tpair\tslice_a\tslice_b\tmean\tci_low\tci_high\tsamples")?;
        for r in &report.rows {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}",
                r.word, r.pair_index, r.slice_a, r.slice_b, r.mean, r.ci_low, r.ci_high, r.samples
            )?;
        }
        Ok(())
    })?;
    out.write_with("absent.tsv", |w| {
        writeln!(w, "word\tslice_a\tslice_b")?;
        for (word, a, b) in &report.absent {
            writeln!(w, "{word}\t{a}\t{b}")?;
        }
        Ok(())
    })
}

pub fn track_cmd(ctx: &Context, args: TrackArgs) -> Result<()> {
    let topics_path = ctx.settings.path("topics", args.topics)?;
    let mut words = ctx.settings.list::<String>("words", args.words, Vec::new())?;
    if let Some(p) = &topics_path {
        words.extend(word_list(&read_text(p)?));
    }
    let words = dedup_keep_order(words.iter().map(|w| corpus_form(w)).collect());
    if words.is_empty() {
        return Err(CliError::usage("track needs --topics or --words"));
    }
    let series = load_series(ctx, args.slices, args.seeds, &args.bootstrap, &args.train)?;
    let report = track_topics(&words, &series.slices, &series.config)?;

    let mut inputs = vec![series.input];
    inputs.extend(topics_path);
    let out = ctx.output(&inputs)?;
    write_rows(&out, "topics.tsv", &report)?;
    out.write_json(
        "topics.json",
        &SeriesFile {
            kind: "topic",
            slices: series.slices.iter().map(|s| s.0.clone()).collect(),
            words,
            n_seeds: series.config.n_seeds,
            report,
        },
    )?;
    ctx.finish(&out, &inputs, true)
}

pub fn party_drift_cmd(ctx: &Context, args: PartyDriftArgs) -> Result<()> {
    let parties_path = ctx.settings.path("parties", args.parties)?;
    let mut tags = ctx.settings.list::<String>("tags", args.tags, Vec::new())?;
    if let Some(p) = &parties_path {
        tags.extend(PartyTagTable::load(p)?.tags());
    }
    let tags = dedup_keep_order(tags.iter().map(|t| corpus_form(t)).collect());
    if tags.is_empty() {
        return Err(CliError::usage("party-drift needs --parties or --tags"));
    }
    let mut series = load_series(ctx, args.slices, args.seeds, &args.bootstrap, &args.train)?;
    series.config.neighbors = ctx.settings.value("neighbors", args.neighbors, 10usize)?;
    let report = party_drift(&tags, &series.slices, &series.config)?;

    let mut inputs = vec![series.input];
    inputs.extend(parties_path);
    let out = ctx.output(&inputs)?;
    write_rows(&out, "party.tsv", &report)?;
    out.write_with("party_neighbors.tsv", |w| {
        writeln!(w, "word\tslice_a\tslice_b\tneighbors_a\tneighbors_b")?;
        for n in &report.neighbors {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                n.word,
                n.slice_a,
                n.slice_b,
                n.neighbors_a.join(", "),
                n.neighbors_b.join(", ")
            )?;
        }
        Ok(())
    })?;
    out.write_json(
        "party.json",
        &SeriesFile {
            kind: "party",
            slices: series.slices.iter().map(|s| s.0.clone()).collect(),
            words: tags,
            n_seeds: series.config.n_seeds,
            report,
        },
    )?;
    ctx.finish(&out, &inputs, true)
}
