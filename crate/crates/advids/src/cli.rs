//! Command-line parsing and resolution of flags into a [`RunManifest`].

use std::path::PathBuf;

use advids_core::nn::LrSchedule;
use clap::{Args, Parser, Subcommand};

use crate::error::{AppError, Result};
use crate::manifest::{Command, DataSource, RunManifest, SyntheticSpec};

#[derive(Debug, Parser)]
#[command(
    name = "advids",
    version,
    about = "Train, attack and harden an MLP intrusion detector"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Train the baseline model; writes model.json and loss.csv.
    Train(RunArgs),
    /// Evaluate the baseline under FGSM at each epsilon.
    Sweep(RunArgs),
    /// Sweep, then retrain with adversarial samples and score on an attacked test set.
    Defend(RunArgs),
    /// Imbalanced Bot-IoT, balanced Bot-IoT and Modbus blocks with defense rows.
    Replicate(RunArgs),
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Input CSV in the layout of --schema.
    #[arg(long, conflicts_with = "synthetic")]
    pub data: Option<PathBuf>,
    /// Use two Gaussian clusters instead of a CSV.
    #[arg(long)]
    pub synthetic: bool,
    /// Bot-IoT CSV for replicate.
    #[arg(long, conflicts_with_all = ["synthetic", "data"])]
    pub bot_iot: Option<PathBuf>,
    /// Modbus CSV for replicate.
    #[arg(long, conflicts_with_all = ["synthetic", "data"])]
    pub modbus: Option<PathBuf>,
    /// Start from a saved manifest; explicit flags override its values.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// bot_iot or modbus.
    #[arg(long)]
    pub schema: Option<String>,
    /// SMOTE-oversample the minority class before splitting.
    #[arg(long)]
    pub balance: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated, ascending.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub epsilons: Option<Vec<f64>>,
    /// Shares of training rows replaced by adversarial samples.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub fractions: Option<Vec<f64>>,
    /// Epsilon of the adversarial training and test samples.
    #[arg(long, allow_hyphen_values = true)]
    pub attack_epsilon: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lr: Option<f64>,
    #[arg(long, value_parser = ["cosine", "constant"])]
    pub lr_schedule: Option<String>,
    #[arg(long)]
    pub k_neighbors: Option<usize>,
    /// Clamp perturbed features to [0, 1].
    #[arg(long)]
    pub clip: bool,
    /// Pretrained model.json to attack instead of training inline.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Write each perturbed test set as CSV.
    #[arg(long)]
    pub export_perturbed: bool,
    #[arg(long)]
    pub n_normal: Option<usize>,
    #[arg(long)]
    pub n_attack: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub separation: Option<f64>,
}

impl Sub {
    pub fn split(self) -> (Command, RunArgs) {
        match self {
            Sub::Train(a) => (Command::Train, a),
            Sub::Sweep(a) => (Command::Sweep, a),
            Sub::Defend(a) => (Command::Defend, a),
            Sub::Replicate(a) => (Command::Replicate, a),
        }
    }
}

fn source_from_flags(a: &RunArgs) -> Result<Option<DataSource>> {
    let synthetic_params = a.n_normal.is_some() || a.n_attack.is_some() || a.separation.is_some();
    if let Some(path) = &a.data {
        return Ok(Some(DataSource::Csv { path: path.clone() }));
    }
    match (&a.bot_iot, &a.modbus) {
        (Some(b), Some(m)) => {
            return Ok(Some(DataSource::Datasets {
                bot_iot: b.clone(),
                modbus: m.clone(),
            }))
        }
        (None, None) => {}
        _ => {
            return Err(AppError::Usage(
                "--bot-iot and --modbus must be given together".into(),
            ))
        }
    }
    if a.synthetic || synthetic_params {
        return Ok(Some(DataSource::Synthetic(SyntheticSpec::default())));
    }
    Ok(None)
}

/// Merges the flags over the manifest named by `--manifest`, if any.
pub fn resolve(command: Command, a: RunArgs) -> Result<RunManifest> {
    let flag_source = source_from_flags(&a)?;
    let mut m = match &a.manifest {
        Some(path) => {
            let mut m = RunManifest::load(path)?;
            m.command = command;
            if let Some(s) = flag_source {
                m.source = s;
            }
            m
        }
        None => {
            let source = flag_source.ok_or_else(|| {
                AppError::Usage(match command {
                    Command::Replicate => {
                        "replicate needs --bot-iot and --modbus, or --synthetic".into()
                    }
                    _ => "no input: pass --data <csv> or --synthetic".into(),
                })
            })?;
            RunManifest::new(command, source, PathBuf::from("advids-out"))
        }
    };

    if let DataSource::Synthetic(spec) = &mut m.source {
        if let Some(n) = a.n_normal {
            spec.n_normal = n;
        }
        if let Some(n) = a.n_attack {
            spec.n_attack = n;
        }
        if let Some(s) = a.separation {
            spec.separation = s;
        }
    } else if a.n_normal.is_some() || a.n_attack.is_some() || a.separation.is_some() {
        return Err(AppError::Usage(
            "--n-normal/--n-attack/--separation need --synthetic".into(),
        ));
    }
    if let Some(s) = a.schema {
        m.schema = s;
    }
    if a.balance {
        m.sweep.balance = true;
    }
    if let Some(seed) = a.seed {
        m.sweep.seed = seed;
    }
    m.sweep.train.seed = m.sweep.seed;
    if let Some(out) = a.out {
        m.out = out;
    }
    if let Some(e) = a.epsilons {
        m.sweep.epsilons = e;
    }
    if let Some(f) = a.fractions {
        m.fractions = f;
    }
    if let Some(e) = a.attack_epsilon {
        m.attack_epsilon = e;
    }
    if let Some(n) = a.epochs {
        m.sweep.train.epochs = n;
    }
    if let Some(n) = a.batch_size {
        m.sweep.train.batch_size = n;
    }
    if let Some(lr) = a.lr {
        m.sweep.train.learning_rate = lr;
    }
    if let Some(s) = a.lr_schedule.as_deref() {
        m.sweep.train.schedule = match s {
            "constant" => LrSchedule::Constant,
            _ => LrSchedule::Cosine,
        };
    }
    if let Some(k) = a.k_neighbors {
        m.sweep.smote.k_neighbors = k;
    }
    if a.clip {
        m.sweep.clip_to_unit = true;
    }
    if a.model.is_some() {
        m.model = a.model;
    }
    if a.export_perturbed {
        m.export_perturbed = true;
    }
    m.validate()?;
    Ok(m)
}
