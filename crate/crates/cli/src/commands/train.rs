//! `train` and `align`.

use std::io::Write;

use serde::Serialize;

use diachrony::align::{align_models, AlignOptions};
use diachrony::embed::{
    derive_seed, load_model, save_model, train, train_compass, EmbeddingModel, MatrixRole, TrainConfig, TrainReport,
};

use crate::args::{AlignArgs, TrainCmdArgs};
use crate::context::Context;
use crate::error::{CliError, Result};
use crate::prepared::load_slices;

#[derive(Serialize)]
struct ModelEntry {
    slice: String,
    file: String,
    seed: u64,
    vocabulary: usize,
    report: TrainReport,
}

#[derive(Serialize)]
struct TrainSummary {
    kind: &'static str,
    compass: bool,
    architecture: String,
    dim: usize,
    /// Matrix holding the usage signal in the slice models.
    free_matrix: String,
    compass_model: Option<ModelEntry>,
    models: Vec<ModelEntry>,
}

fn save(out: &crate::manifest::OutputDir, name: &str, model: &EmbeddingModel<f32>) -> Result<String> {
    let path = out.path(name)?;
    save_model(model, &path).map_err(|e| CliError::write(&path, e))?;
    Ok(name.to_string())
}

pub fn train_cmd(ctx: &Context, args: TrainCmdArgs) -> Result<()> {
    let input = ctx.input()?;
    let compass = ctx.settings.value("compass", args.compass, false)?;
    let slices_wanted = ctx.settings.list::<String>("slices", args.slices, Vec::new())?;
    let base = if compass {
        TrainConfig::compass()
    } else {
        TrainConfig::default()
    };
    let config = ctx.train_config(&args.train, base)?;
    let slices = load_slices(&input, &slices_wanted, ctx.load_options(&args.train)?)?;
    let inputs = vec![input];
    let out = ctx.output(&inputs)?;
    let entry = |slice: &str, file: String, m: &EmbeddingModel<f32>, report: TrainReport| ModelEntry {
        slice: slice.to_string(),
        file,
        seed: m.seed(),
        vocabulary: m.vocab().len(),
        report,
    };

    let summary = if compass {
        let models = train_compass::<f32, _>(&slices, &config)?;
        let compass_file = save(&out, "compass.gpem", &models.compass)?;
        let mut entries = Vec::new();
        for (i, (m, r)) in models.slices.iter().zip(models.slice_reports.iter()).enumerate() {
            let file = save(&out, &format!("model_{i:03}.gpem"), m)?;
            entries.push(entry(&slices[i].0, file, m, r.clone()));
        }
        TrainSummary {
            kind: "train",
            compass: true,
            architecture: config.architecture.to_string(),
            dim: config.dim,
            free_matrix: models.free_role().to_string(),
            compass_model: Some(entry(
                "compass",
                compass_file,
                &models.compass,
                models.compass_report.clone(),
            )),
            models: entries,
        }
    } else {
        let mut entries = Vec::new();
        for (i, (id, tokens)) in slices.iter().enumerate() {
            let c = TrainConfig {
                seed: if i == 0 {
                    config.seed
                } else {
                    derive_seed(config.seed, i)
                },
                ..config.clone()
            };
            log::info!("training slice {id} ({} tokens)", tokens.len());
            let trained = train::<f32, _>(tokens, &c)?;
            let model = trained.model.with_slice_id(id.as_str());
            let file = save(&out, &format!("model_{i:03}.gpem"), &model)?;
            entries.push(entry(id, file, &model, trained.report));
        }
        TrainSummary {
            kind: "train",
            compass: false,
            architecture: config.architecture.to_string(),
            dim: config.dim,
            free_matrix: MatrixRole::Target.to_string(),
            compass_model: None,
            models: entries,
        }
    };
    out.write_with("models.tsv", |w| {
        writeln!(w, "file\tslice\tseed\tvocabulary")?;
        for m in summary.compass_model.iter().chain(&summary.models) {
            writeln!(w, "{}\t{}\t{}\t{}", m.file, m.slice, m.seed, m.vocabulary)?;
        }
        Ok(())
    })?;
    out.write_json("train.json", &summary)?;
    ctx.finish(&out, &inputs, true)
}

#[derive(Serialize)]
struct AlignSummary {
    kind: &'static str,
    source: String,
    reference: String,
    role: String,
    center: bool,
    shared_words: usize,
    residual: f64,
    unaligned_residual: f64,
    orthogonality_defect: f64,
    rank_deficient: bool,
}

pub fn align_cmd(ctx: &Context, args: AlignArgs) -> Result<()> {
    let inputs = ctx.inputs()?;
    if inputs.len() != 2 {
        return Err(CliError::usage(
            "align takes two inputs: --input SOURCE --input REFERENCE",
        ));
    }
    let center = ctx.settings.value("center", args.center, false)?;
    let role = ctx.settings.value("role", args.role, MatrixRole::Target)?;
    let source = load_model::<f32>(&inputs[0]).map_err(|e| CliError::read(&inputs[0], e))?;
    let reference = load_model::<f32>(&inputs[1]).map_err(|e| CliError::read(&inputs[1], e))?;
    let (aligned, result) = align_models(&source, &reference, AlignOptions { center, role })?;
    if result.rank_deficient {
        log::warn!("shared rows are rank deficient; the rotation is not unique");
    }
    let out = ctx.output(&inputs)?;
    save(&out, "aligned.gpem", &aligned)?;
    out.write_with("rotation.tsv", |w| {
        let r = &result.rotation;
        for i in 0..r.rows() {
            let row: Vec<String> = r.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", row.join("\t"))?;
        }
        Ok(())
    })?;
    out.write_json(
        "alignment.json",
        &AlignSummary {
            kind: "alignment",
            source: source.slice_id().to_string(),
            reference: reference.slice_id().to_string(),
            role: role.to_string(),
            center,
            shared_words: result.shared_words.len(),
            residual: result.residual as f64,
            unaligned_residual: result.unaligned_residual as f64,
            orthogonality_defect: result.rotation.orthogonality_defect() as f64,
            rank_deficient: result.rank_deficient,
        },
    )?;
    ctx.finish(&out, &inputs, false)
}
