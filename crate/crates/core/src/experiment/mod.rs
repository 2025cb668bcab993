//! End-to-end runs: train a baseline, sweep FGSM strengths over the test set,
//! and retrain on adversarially mixed training data.
//!
//! Every stochastic step draws from its own stream of the run seed, so the
//! same configuration always reproduces the same report.

mod report;

pub use report::{DefenseReport, DefenseRow, EvalRow, ExperimentReport, Provenance};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::attack::{perturb_dataset, AttackConfig, DEFAULT_EPSILONS};
use crate::data::{
    class_indices, minmax_normalize, smote_balance, stratified_split, Dataset, MinMaxScaler,
    SmoteConfig, SplitWarning, DEFAULT_TRAIN_FRACTION,
};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};
use crate::metrics::confusion;
use crate::nn::{train, MlpModel, TrainConfig};

/// Training-set shares replaced by adversarial rows in the reference defense runs.
pub const DEFAULT_DEFENSE_FRACTIONS: [f64; 2] = [0.1, 0.2];
/// Attack strength used to build the defense training mix and test set.
pub const DEFAULT_DEFENSE_EPSILON: f64 = 1.0;

const SMOTE_STREAM: u64 = 1;
const SPLIT_STREAM: u64 = 2;
const INIT_STREAM: u64 = 3;
const DEFENSE_STREAM: u64 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    /// Oversample the minority class with SMOTE before splitting.
    pub balance: bool,
    pub smote: SmoteConfig,
    /// `train.seed` is ignored; training draws from `seed`.
    pub train: TrainConfig,
    pub train_fraction: f64,
    pub clip_to_unit: bool,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            epsilons: DEFAULT_EPSILONS.to_vec(),
            balance: false,
            smote: SmoteConfig::default(),
            train: TrainConfig::default(),
            train_fraction: DEFAULT_TRAIN_FRACTION,
            clip_to_unit: false,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::Config("epsilon list is empty".into()));
        }
        for &e in &self.epsilons {
            AttackConfig::new(e)?;
        }
        if self.epsilons.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config(format!(
                "epsilons must be sorted ascending: {:?}",
                self.epsilons
            )));
        }
        self.train.validate()
    }

    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.train.clone()
        }
    }

    fn attack(&self, epsilon: f64) -> Result<AttackConfig> {
        Ok(AttackConfig::new(epsilon)?.clipped(self.clip_to_unit))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefenseConfig {
    pub adversarial_fraction: f64,
    pub attack_epsilon: f64,
    pub seed: u64,
}

impl DefenseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.adversarial_fraction) {
            return Err(Error::Config(format!(
                "adversarial fraction must lie in [0, 1], got {}",
                self.adversarial_fraction
            )));
        }
        AttackConfig::new(self.attack_epsilon).map(|_| ())
    }
}

/// Normalized train/test partitions ready for training.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub source_hash: String,
    pub train: Dataset,
    pub test: Dataset,
    pub scaler: MinMaxScaler,
    pub warnings: Vec<SplitWarning>,
}

/// Optional SMOTE, stratified split, then min-max scaling fitted on the train side only.
pub fn prepare(raw: &Dataset, cfg: &SweepConfig) -> Result<Prepared> {
    let source_hash = raw.content_hash();
    let balanced;
    let data = if cfg.balance {
        balanced = smote_balance(raw, &cfg.smote, &mut Rng::stream(cfg.seed, SMOTE_STREAM))?;
        &balanced
    } else {
        raw
    };
    let split = stratified_split(
        data,
        cfg.train_fraction,
        &mut Rng::stream(cfg.seed, SPLIT_STREAM),
    )?;
    let (train, scaler) = minmax_normalize(&split.train)?;
    let test = scaler.apply(&split.test)?;
    Ok(Prepared {
        source_hash,
        train,
        test,
        scaler,
        warnings: split.warnings,
    })
}

/// Freshly initialized reference model for `seed`.
pub fn fresh_model(input_dim: usize, seed: u64) -> Result<MlpModel> {
    MlpModel::detector(input_dim, &mut Rng::stream(seed, INIT_STREAM))
}

/// A prepared dataset together with the baseline model trained on it.
#[derive(Clone, Debug)]
pub struct SweepContext {
    pub config: SweepConfig,
    pub prepared: Prepared,
    pub baseline: MlpModel,
    pub loss_trace: Vec<f64>,
}

impl SweepContext {
    /// Prepares `raw` and trains the baseline from a fresh initialization.
    pub fn train(raw: &Dataset, config: SweepConfig) -> Result<Self> {
        config.validate()?;
        let prepared = prepare(raw, &config)?;
        let init = fresh_model(prepared.train.features().cols(), config.seed)?;
        let outcome = train(&init, &prepared.train, &config.train_config())?;
        Ok(SweepContext {
            config,
            prepared,
            baseline: outcome.model,
            loss_trace: outcome.loss_trace,
        })
    }

    /// Prepares `raw` and adopts an already trained baseline.
    pub fn with_model(raw: &Dataset, config: SweepConfig, baseline: MlpModel) -> Result<Self> {
        config.validate()?;
        let prepared = prepare(raw, &config)?;
        if baseline.input_dim() != prepared.train.features().cols() {
            return Err(Error::Shape {
                op: "model input",
                left: (1, baseline.input_dim()),
                right: (1, prepared.train.features().cols()),
            });
        }
        Ok(SweepContext {
            config,
            prepared,
            baseline,
            loss_trace: Vec::new(),
        })
    }
}

/// Scores `model` on `data`.
pub fn evaluate(
    model: &MlpModel,
    data: &Dataset,
    label: String,
    epsilon: Option<f64>,
) -> Result<EvalRow> {
    let predicted = model.predict(data.features())?;
    let cm = confusion(&predicted, data.labels())?;
    Ok(EvalRow::new(label, epsilon, cm))
}

pub fn epsilon_label(epsilon: f64) -> String {
    format!("fgsm epsilon={epsilon}")
}

/// Clean evaluation followed by one FGSM evaluation per configured epsilon.
pub fn run_sweep(ctx: &SweepContext) -> Result<(EvalRow, Vec<EvalRow>)> {
    let test = &ctx.prepared.test;
    let clean = evaluate(&ctx.baseline, test, "original".into(), None)?;
    let mut rows = Vec::with_capacity(ctx.config.epsilons.len());
    for &eps in &ctx.config.epsilons {
        let attacked = perturb_dataset(&ctx.baseline, test, &ctx.config.attack(eps)?)?;
        rows.push(evaluate(
            &ctx.baseline,
            &attacked,
            epsilon_label(eps),
            Some(eps),
        )?);
    }
    Ok((clean, rows))
}

/// Indices of `round(n_c · fraction)` rows of each class, drawn without replacement.
fn choose_replacements(labels: &[u8], fraction: f64, rng: &mut Rng) -> Vec<usize> {
    let mut chosen = Vec::new();
    for mut members in class_indices(labels) {
        let take = libm::floor(members.len() as f64 * fraction + 0.5) as usize;
        rng.shuffle(&mut members);
        chosen.extend_from_slice(&members[..take.min(members.len())]);
    }
    chosen.sort_unstable();
    chosen
}

/// Test set fully perturbed against the baseline at the defense epsilon.
pub fn adversarial_test_set(ctx: &SweepContext, attack_epsilon: f64) -> Result<Dataset> {
    perturb_dataset(
        &ctx.baseline,
        &ctx.prepared.test,
        &ctx.config.attack(attack_epsilon)?,
    )
}

/// Replaces a share of the training rows with their FGSM counterparts (crafted
/// once against the baseline), retrains from a fresh initialization and scores
/// the result on the fully adversarial test set.
pub fn run_defense(ctx: &SweepContext, cfg: &DefenseConfig, label: String) -> Result<DefenseRow> {
    cfg.validate()?;
    let train_set = &ctx.prepared.train;
    let attack = ctx.config.attack(cfg.attack_epsilon)?;
    let adversarial = perturb_dataset(&ctx.baseline, train_set, &attack)?;
    let replaced = choose_replacements(
        train_set.labels(),
        cfg.adversarial_fraction,
        &mut Rng::stream(cfg.seed, DEFENSE_STREAM),
    );

    let mut mixed: Matrix = train_set.features().clone();
    for &i in &replaced {
        mixed
            .row_mut(i)
            .copy_from_slice(adversarial.features().row(i));
    }
    let mixed = train_set.replace_features(mixed, train_set.normalization().clone())?;

    let init = fresh_model(mixed.features().cols(), ctx.config.seed)?;
    let outcome = train(&init, &mixed, &ctx.config.train_config())?;
    let test = adversarial_test_set(ctx, cfg.attack_epsilon)?;
    let eval = evaluate(
        &outcome.model,
        &test,
        label.clone(),
        Some(cfg.attack_epsilon),
    )?;
    Ok(DefenseRow {
        label,
        config: cfg.clone(),
        replaced_rows: replaced.len(),
        eval,
        loss_trace: outcome.loss_trace,
    })
}

pub fn defense_label(index: usize, fraction: f64) -> String {
    let percent = libm::round(fraction * 1e6) / 1e4;
    format!("experiment-{} ({percent}%)", index + 1)
}

/// Undefended baseline plus one retrained row per fraction, in the given order.
pub fn run_defense_suite(
    ctx: &SweepContext,
    fractions: &[f64],
    attack_epsilon: f64,
) -> Result<DefenseReport> {
    let test = adversarial_test_set(ctx, attack_epsilon)?;
    let undefended = evaluate(
        &ctx.baseline,
        &test,
        String::from("undefended"),
        Some(attack_epsilon),
    )?;
    let rows = fractions
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let cfg = DefenseConfig {
                adversarial_fraction: f,
                attack_epsilon,
                seed: ctx.config.seed,
            };
            run_defense(ctx, &cfg, defense_label(i, f))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DefenseReport {
        attack_epsilon,
        undefended,
        rows,
    })
}

/// Sweep, and optionally the defense suite, packaged with provenance.
pub fn run_experiment(
    name: String,
    ctx: &SweepContext,
    defense: Option<(&[f64], f64)>,
) -> Result<ExperimentReport> {
    let (clean, sweep) = run_sweep(ctx)?;
    let defense = match defense {
        Some((fractions, eps)) => Some(run_defense_suite(ctx, fractions, eps)?),
        None => None,
    };
    let p = &ctx.prepared;
    Ok(ExperimentReport {
        name,
        provenance: Provenance {
            seed: ctx.config.seed,
            schema: p.train.schema().kind,
            source_hash: p.source_hash.clone(),
            train_hash: p.train.content_hash(),
            test_hash: p.test.content_hash(),
            model_hash: ctx.baseline.content_hash(),
            train_counts: p.train.class_counts(),
            test_counts: p.test.class_counts(),
            config: ctx.config.clone(),
            warnings: p.warnings.clone(),
        },
        baseline_loss_trace: ctx.loss_trace.clone(),
        clean,
        sweep,
        defense,
    })
}
