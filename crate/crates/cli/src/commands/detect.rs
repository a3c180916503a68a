//! `detect` and `stability`.

use std::io::Write;

use serde::Serialize;

use diachrony::detect::{detect_change, neighbor_report, write_neighbor_report, ChangeMethod};
use diachrony::embed::{save_model, EmbedError};
use diachrony::eval::{run_stability, PipelineDetector, StabilityConfig, StabilityReport, DEFAULT_K_LIST};

use crate::args::{DetectArgs, StabilityArgs};
use crate::context::Context;
use crate::error::{CliError, Result};
use crate::prepared::{load_slices, parse_pair, slice_ids, Slice};

#[derive(Serialize)]
struct RankedEntry {
    rank: usize,
    word: String,
    score: f64,
    count_a: u64,
    count_b: u64,
}

#[derive(Serialize)]
struct DetectSummary {
    kind: &'static str,
    method: String,
    slice_a: String,
    slice_b: String,
    candidates: usize,
    seed: u64,
    /// Matrix the scores were read from.
    role: String,
    alignment_residual: Option<f64>,
    top: Vec<RankedEntry>,
}

/// Reads `--pair` and loads both slices.
fn load_pair(
    ctx: &Context,
    pair: Option<String>,
    train: &crate::args::TrainArgs,
) -> Result<(std::path::PathBuf, Slice, Slice)> {
    let input = ctx.input()?;
    let ids = slice_ids(&input)?;
    let spec = ctx.settings.required::<String>("pair", pair)?;
    let (a, b) = parse_pair(&spec, &ids)?;
    if a == b {
        return Err(CliError::usage("--pair needs two different slices"));
    }
    let mut slices = load_slices(&input, &[a, b], ctx.load_options(train)?)?;
    let sb = slices.pop().expect("two slices");
    let sa = slices.pop().expect("two slices");
    Ok((input, sa, sb))
}

pub fn detect_cmd(ctx: &Context, args: DetectArgs) -> Result<()> {
    let (input, (a, ta), (b, tb)) = load_pair(ctx, args.pair, &args.train)?;
    let method = ctx.settings.value("method", args.method, ChangeMethod::Compass)?;
    let train = ctx.train_config(&args.train, method.default_train_config())?;
    let change = ctx.change_config(&args.change, method)?;
    let similarity = ctx.settings.value("similarity", args.similarity, false)?;
    let report_top = ctx.settings.value("report_top", args.report_top, 20usize)?;
    let n_neighbors = ctx.settings.value("neighbors", args.neighbors, 10usize)?;
    let save_models = ctx.settings.value("save_models", args.save_models, false)?;

    let d = detect_change::<f32, _>((&a, &ta), (&b, &tb), &train, &change)?;
    let mut top_words = d.ranking.top(report_top);
    top_words.retain(|w| d.model_a.vocab().contains(w) && d.model_b.vocab().contains(w));
    let neighbors = neighbor_report(&d.model_a, &d.model_b, d.role, &top_words, n_neighbors)?;

    let inputs = vec![input];
    let out = ctx.output(&inputs)?;
    out.write_with("ranking.tsv", |w| d.ranking.write_tsv(w, similarity))?;
    out.write_with("neighbors.tsv", |w| write_neighbor_report(&neighbors, (&a, &b), w))?;
    if save_models {
        for (name, m) in [("model_a.gpem", &d.model_a), ("model_b.gpem", &d.model_b)] {
            let path = out.path(name)?;
            save_model(m, &path).map_err(|e: EmbedError| CliError::write(&path, e))?;
        }
    }
    out.write_json(
        "detection.json",
        &DetectSummary {
            kind: "detection",
            method: method.to_string(),
            slice_a: a.clone(),
            slice_b: b.clone(),
            candidates: d.ranking.len(),
            seed: train.seed,
            role: d.role.to_string(),
            alignment_residual: d.alignment.as_ref().map(|r| r.residual as f64),
            top: d
                .ranking
                .entries
                .iter()
                .take(100)
                .enumerate()
                .map(|(i, e)| RankedEntry {
                    rank: i + 1,
                    word: e.word.clone(),
                    score: e.score,
                    count_a: e.count_a,
                    count_b: e.count_b,
                })
                .collect(),
        },
    )?;
    ctx.finish(&out, &inputs, true)
}

/// The `stability` report, also read by `plot --kind stability`.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityFile {
    pub kind: &'static str,
    pub slice_a: String,
    pub slice_b: String,
    pub reports: Vec<StabilityReport>,
}

pub fn stability_cmd(ctx: &Context, args: StabilityArgs) -> Result<()> {
    let (input, (a, ta), (b, tb)) = load_pair(ctx, args.pair, &args.train)?;
    let methods = ctx.settings.list("method", args.methods, vec![ChangeMethod::Compass])?;
    let (resamples, level) = ctx.bootstrap(&args.bootstrap)?;
    let config = StabilityConfig {
        n_runs: ctx.settings.value("runs", args.runs, 10usize)?,
        k_list: ctx.settings.list("k", args.k, DEFAULT_K_LIST.to_vec())?,
        base_seed: ctx.seed()?,
        bootstrap_resamples: resamples,
        level,
    };
    config.validate()?;
    let mut reports = Vec::new();
    for method in methods {
        let train = ctx.train_config(&args.train, method.default_train_config())?;
        let change = ctx.change_config(&args.change, method)?;
        log::info!("stability: {method}, {} runs", config.n_runs);
        let detector = PipelineDetector::<_, f32>::new((&a, &ta), (&b, &tb), train, change);
        let report = run_stability(&detector, &config)?;
        if !report.skipped_k.is_empty() {
            log::warn!("{method}: ranking too short for k = {:?}", report.skipped_k);
        }
        reports.push(report);
    }

    let inputs = vec![input];
    let out = ctx.output(&inputs)?;
    out.write_with("stability.tsv", |w| {
        writeln!(w, "method\tk\tmean\tci_low\tci_high\tpairs")?;
        for r in &reports {
            for row in &r.rows {
                writeln!(
                    w,
                    "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}",
                    r.method, row.k, row.mean, row.ci_low, row.ci_high, row.pairs
                )?;
            }
        }
        Ok(())
    })?;
    out.write_json(
        "stability.json",
        &StabilityFile {
            kind: "stability",
            slice_a: a,
            slice_b: b,
            reports,
        },
    )?;
    ctx.finish(&out, &inputs, true)
}
