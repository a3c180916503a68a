use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};

use diachrony::detect::{ChangeConfig, ChangeMethod};
use diachrony::embed::TrainConfig;

use crate::args::{BootstrapArgs, ChangeArgs, GlobalArgs, TrainArgs};
use crate::error::{CliError, Result};
use crate::manifest::{hash_path, timestamp, InputHash, OutputDir, RunManifest};
use crate::prepared::LoadOptions;
use crate::settings::Settings;

pub const DEFAULT_SEED: u64 = 1;

/// Settings and bookkeeping shared by every command.
pub struct Context {
    pub command: &'static str,
    pub argv: Vec<String>,
    pub settings: Settings,
    global: GlobalArgs,
    started: DateTime<Utc>,
}

impl Context {
    pub fn new(command: &'static str, argv: Vec<String>, global: GlobalArgs) -> Result<Self> {
        let settings = Settings::load(global.config.as_deref())?;
        Ok(Self {
            command,
            argv,
            settings,
            global,
            started: Utc::now(),
        })
    }

    pub fn workers(&self) -> Result<usize> {
        let default = std::thread::available_parallelism().map_or(1, |n| n.get());
        let n = self.settings.value("workers", self.global.workers, default)?;
        if n == 0 {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        Ok(n)
    }

    pub fn deterministic(&self) -> Result<bool> {
        self.settings.value("deterministic", self.global.deterministic, true)
    }

    pub fn seed(&self) -> Result<u64> {
        self.settings.value("seed", self.global.seed, DEFAULT_SEED)
    }

    pub fn inputs(&self) -> Result<Vec<PathBuf>> {
        let inputs = self.settings.paths("input", self.global.input.clone())?;
        for p in &inputs {
            if !p.exists() {
                return Err(CliError::input(format!("input {} does not exist", p.display())));
            }
        }
        Ok(inputs)
    }

    /// Exactly one `--input`.
    pub fn input(&self) -> Result<PathBuf> {
        let mut inputs = self.inputs()?;
        match inputs.len() {
            1 => Ok(inputs.remove(0)),
            0 => Err(CliError::usage(format!("{} needs --input", self.command))),
            n => Err(CliError::usage(format!("{} takes one --input, got {n}", self.command))),
        }
    }

    pub fn output(&self, inputs: &[PathBuf]) -> Result<OutputDir> {
        let root = self.settings.required_path("output", self.global.output.clone())?;
        OutputDir::create(&root, inputs)
    }

    pub fn load_options(&self, args: &TrainArgs) -> Result<LoadOptions> {
        Ok(LoadOptions {
            keep_full_stops: self.settings.value("keep_full_stops", args.keep_full_stops, false)?,
            drop_stopword_tags: self
                .settings
                .value("drop_stopword_tags", args.drop_stopword_tags, false)?,
        })
    }

    /// Overrides `base` with flags and config values. The seed is the base
    /// seed; workers and determinism come from the global options.
    pub fn train_config(&self, args: &TrainArgs, base: TrainConfig) -> Result<TrainConfig> {
        let s = &self.settings;
        let config = TrainConfig {
            dim: s.value("dim", args.dim, base.dim)?,
            window: s.value("window", args.window, base.window)?,
            negative: s.value("negative", args.negative, base.negative)?,
            epochs: s.value("epochs", args.epochs, base.epochs)?,
            learning_rate: s.value("learning_rate", args.learning_rate, base.learning_rate)?,
            min_learning_rate_fraction: s.value(
                "min_learning_rate_fraction",
                args.min_learning_rate_fraction,
                base.min_learning_rate_fraction,
            )?,
            min_count: s.value("min_count", args.min_count, base.min_count)?,
            subsample: s.value("subsample", args.subsample, base.subsample)?,
            architecture: s.value("architecture", args.architecture, base.architecture)?,
            compass_frozen: s.value("compass_frozen", args.compass_frozen, base.compass_frozen)?,
            seed: self.seed()?,
            workers: self.workers()?,
            deterministic: self.deterministic()?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn change_config(&self, args: &ChangeArgs, method: ChangeMethod) -> Result<ChangeConfig> {
        let s = &self.settings;
        let base = ChangeConfig::default();
        let config = ChangeConfig {
            method,
            neighbor_k: s.value("neighbor_k", args.neighbor_k, base.neighbor_k)?,
            top_freq_cut: s.value("top_freq_cut", args.top_freq_cut, base.top_freq_cut)?,
            min_freq_cut: s.value("min_freq_cut", args.min_freq_cut, base.min_freq_cut)?,
            candidate_min_occurrences: s.value(
                "candidate_min_occurrences",
                args.candidate_min_occurrences,
                base.candidate_min_occurrences,
            )?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn bootstrap(&self, args: &BootstrapArgs) -> Result<(usize, f64)> {
        let resamples = self.settings.value("resamples", args.resamples, 10_000usize)?;
        let level = self.settings.value("level", args.level, 0.95f64)?;
        if resamples == 0 || !(level > 0.0 && level < 1.0) {
            return Err(CliError::usage("--resamples must be positive and --level in (0, 1)"));
        }
        Ok((resamples, level))
    }

    /// Hashes the inputs and writes the run manifest. `seeded` commands
    /// record the base seed.
    pub fn finish(&self, out: &OutputDir, inputs: &[PathBuf], seeded: bool) -> Result<()> {
        let seed = if seeded { Some(self.seed()?) } else { None };
        for key in self.settings.unused_keys() {
            log::warn!("config key {key:?} is not used by {}", self.command);
        }
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputHash {
                    path: p.to_string_lossy().into_owned(),
                    sha256: hash_path(p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let manifest = RunManifest {
            command: self.command.to_string(),
            argv: self.argv.clone(),
            config: self.settings.snapshot(),
            inputs,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: timestamp(self.started),
            finished: timestamp(Utc::now()),
            outputs: out.outputs(),
        };
        out.write_manifest(&manifest)?;
        log::info!("{} finished; outputs in {}", self.command, out.root().display());
        Ok(())
    }
}

/// Reads a whole text input.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))
}
