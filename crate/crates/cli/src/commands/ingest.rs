use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use diachrony::corpus::{write_speeches, TableFormat};
use diachrony::ingest::{read_sitting_meta, Ingestor};
use diachrony::parser::{load_sittings, SpeakerPatterns};
use diachrony::resolve::{
    merge_support_datasets, read_rows, NameCaseTable, Nicknames, Resolver, SupportDatasets, MATCH_THRESHOLD,
};

use crate::args::IngestArgs;
use crate::context::Context;
use crate::error::{CliError, Result};

#[derive(Serialize)]
struct IngestSummary {
    kind: &'static str,
    sittings: usize,
    speeches: usize,
    resolved: usize,
    unresolved: usize,
    empty_speeches: usize,
    missing_meta: Vec<String>,
    registry_entries: usize,
    gender_conflicts: Vec<String>,
    unknown_gender_rows: usize,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::read(path, e))
}

fn rows<T: for<'de> serde::Deserialize<'de>>(path: &Path, required: bool) -> Result<Vec<T>> {
    if !required && !path.exists() {
        return Ok(Vec::new());
    }
    read_rows(open(path)?).map_err(|e| CliError::read(path, e))
}

/// Explicit option, else `<registry>/<name>` when it exists.
fn optional_table(
    ctx: &Context,
    key: &str,
    flag: Option<PathBuf>,
    registry: &Path,
    name: &str,
) -> Result<Option<PathBuf>> {
    let default = Some(registry.join(name)).filter(|p| p.exists());
    let path = ctx.settings.path(key, flag)?.or(default);
    if let Some(p) = &path {
        ctx.settings.path(key, Some(p.clone()))?;
    }
    Ok(path)
}

pub fn run(ctx: &Context, args: IngestArgs) -> Result<()> {
    let sittings_dir = ctx.input()?;
    let meta_path = ctx.settings.required_path("meta", args.meta)?;
    let registry_dir = ctx.settings.required_path("registry", args.registry)?;
    let name_cases = optional_table(ctx, "name_cases", args.name_cases, &registry_dir, "name_cases.csv")?;
    let nicknames_path = optional_table(ctx, "nicknames", args.nicknames, &registry_dir, "nicknames.csv")?;
    let patterns_path = ctx.settings.path("patterns", args.patterns)?;
    let threshold = ctx.settings.value("threshold", args.threshold, MATCH_THRESHOLD)?;
    if !(0.0..=1.0).contains(&threshold) {
        return Err(CliError::usage("--threshold must lie in [0, 1]"));
    }

    let mut support = SupportDatasets {
        members: rows(&registry_dir.join("members.csv"), true)?,
        government_members: rows(&registry_dir.join("government_members.csv"), false)?,
        governments: rows(&registry_dir.join("governments.csv"), false)?,
        extra_posts: rows(&registry_dir.join("extra_posts.csv"), false)?,
    };
    let unknown_gender_rows = match &name_cases {
        Some(p) => support.apply_name_cases(&NameCaseTable::from_reader(open(p)?).map_err(|e| CliError::read(p, e))?),
        None => 0,
    };
    let merged = merge_support_datasets(&support)?;
    for c in &merged.conflicts {
        log::warn!("registry: {c}");
    }
    let nicknames = match &nicknames_path {
        Some(p) => Nicknames::from_reader(open(p)?).map_err(|e| CliError::read(p, e))?,
        None => Nicknames::new(),
    };
    let patterns = match &patterns_path {
        Some(p) => SpeakerPatterns::load(p)?,
        None => SpeakerPatterns::default(),
    };
    let resolver = Resolver::new(&merged.registry, &nicknames).with_threshold(threshold);
    let meta = read_sitting_meta(open(&meta_path)?).map_err(|e| CliError::read(&meta_path, e))?;
    let sittings = load_sittings(&sittings_dir)?;
    let n_sittings = sittings.len();
    let report = Ingestor::new(&resolver, &patterns)
        .with_governments(&support.governments)?
        .ingest(sittings, &meta);
    log::info!(
        "{} speeches from {} sittings, {} unresolved",
        report.records.len(),
        n_sittings,
        report.unresolved.len()
    );

    let mut inputs = vec![sittings_dir, meta_path, registry_dir];
    inputs.extend(name_cases);
    inputs.extend(nicknames_path);
    inputs.extend(patterns_path);
    inputs.dedup();
    let out = ctx.output(&inputs)?;
    let (path, w) = out.writer("speeches.csv")?;
    write_speeches(w, &report.records, &TableFormat::default()).map_err(|e| CliError::write(&path, e))?;
    out.write_with("assignments.tsv", |w| {
        writeln!(w, "file_id\tindex\tmention\tmember\tsimilarity\tline_start")?;
        for a in &report.assignments {
            let sim = a.similarity.map(|s| format!("{s:.6}")).unwrap_or_default();
            let member = a.member.as_deref().unwrap_or("");
            writeln!(
                w,
                "{}\t{}\t{}\t{member}\t{sim}\t{}",
                a.file_id, a.index, a.mention, a.line_start
            )?;
        }
        Ok(())
    })?;
    out.write_with("unresolved.tsv", |w| {
        writeln!(w, "file_id\tname\tbest_candidate\tbest_similarity")?;
        for u in &report.unresolved {
            let sim = u.best_similarity.map(|s| format!("{s:.6}")).unwrap_or_default();
            let cand = u.best_candidate.as_deref().unwrap_or("");
            writeln!(w, "{}\t{}\t{cand}\t{sim}", u.file_id, u.name)?;
        }
        Ok(())
    })?;
    out.write_json(
        "ingest.json",
        &IngestSummary {
            kind: "ingest",
            sittings: n_sittings,
            speeches: report.records.len(),
            resolved: report.resolved_count(),
            unresolved: report.unresolved.len(),
            empty_speeches: report.empty_speeches,
            missing_meta: report.missing_meta.clone(),
            registry_entries: resolver.entries().len(),
            gender_conflicts: merged.conflicts.clone(),
            unknown_gender_rows,
        },
    )?;
    ctx.finish(&out, &inputs, false)
}
