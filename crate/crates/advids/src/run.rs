//! Executes a resolved [`RunManifest`].

use std::fs;
use std::path::{Path, PathBuf};

use advids_core::attack::{perturb_dataset, AttackConfig};
use advids_core::data::{generate_synthetic, Dataset, Schema};
use advids_core::experiment::{run_experiment, ExperimentReport, SweepConfig, SweepContext};
use advids_core::linalg::Rng;

use crate::csv_io::{ingest_csv, write_csv, CsvProvenance};
use crate::error::{AppError, Result};
use crate::manifest::{Command, DataSource, RunManifest, SyntheticSpec};
use crate::model_io::{load_model, save_model};
use crate::report::{loss_csv, report_table, write_reports, write_text};

/// Random stream used to draw synthetic datasets.
const SYNTHETIC_STREAM: u64 = 0x5359_4e54;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MODEL_FILE: &str = "model.json";
pub const LOSS_FILE: &str = "loss.csv";

/// What a run produced.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub reports: Vec<ExperimentReport>,
}

pub fn execute(m: &RunManifest) -> Result<Outcome> {
    m.validate()?;
    if m.command == Command::Replicate && m.model.is_some() {
        return Err(AppError::Usage(
            "replicate trains its own models; drop --model".into(),
        ));
    }
    fs::create_dir_all(&m.out).map_err(|e| AppError::io(&m.out, e))?;
    let mut files = vec![m.out.join(MANIFEST_FILE)];
    write_text(&files[0], &m.to_json())?;

    let reports = match m.command {
        Command::Train => {
            let schema = m.schema()?;
            let raw = load(&m.source, &schema, m.sweep.seed)?;
            let ctx = SweepContext::train(&raw, m.sweep.clone())?;
            save_trained(&m.out, &ctx, &mut files)?;
            log::info!(
                "trained on {} rows; final loss {:?}",
                ctx.prepared.train.len(),
                ctx.loss_trace.last()
            );
            Vec::new()
        }
        Command::Sweep | Command::Defend => {
            let schema = m.schema()?;
            let raw = load(&m.source, &schema, m.sweep.seed)?;
            let ctx = match &m.model {
                Some(path) => {
                    let model = load_model(path)?;
                    if model.input_dim() != schema.feature_count() {
                        return Err(AppError::Usage(format!(
                            "{} expects {} features, schema {} has {}",
                            path.display(),
                            model.input_dim(),
                            schema.kind.tag(),
                            schema.feature_count()
                        )));
                    }
                    SweepContext::with_model(&raw, m.sweep.clone(), model)?
                }
                None => {
                    let ctx = SweepContext::train(&raw, m.sweep.clone())?;
                    save_trained(&m.out, &ctx, &mut files)?;
                    ctx
                }
            };
            let defense =
                (m.command == Command::Defend).then_some((&m.fractions[..], m.attack_epsilon));
            let report = run_experiment(
                experiment_name(&m.source, &schema, m.sweep.balance),
                &ctx,
                defense,
            )?;
            if m.export_perturbed {
                export_perturbed(&m.out, &ctx, &report.name, &mut files)?;
            }
            vec![report]
        }
        Command::Replicate => replicate(m)?,
    };
    if !reports.is_empty() {
        files.extend(write_reports(&m.out, &reports)?);
    }
    Ok(Outcome { files, reports })
}

fn load(source: &DataSource, schema: &Schema, seed: u64) -> Result<Dataset> {
    match source {
        DataSource::Csv { path } => {
            let ingested = ingest_csv(path, schema)?;
            log::info!(
                "{}: {} rows ({} dropped)",
                path.display(),
                ingested.dataset.len(),
                ingested.dropped_rows
            );
            Ok(ingested.dataset)
        }
        DataSource::Synthetic(spec) => synthetic(spec, schema, seed),
        DataSource::Datasets { .. } => Err(AppError::Usage("dataset pair needs replicate".into())),
    }
}

fn synthetic(spec: &SyntheticSpec, schema: &Schema, seed: u64) -> Result<Dataset> {
    let mut rng = Rng::stream(seed, SYNTHETIC_STREAM);
    Ok(generate_synthetic(
        schema,
        spec.n_normal,
        spec.n_attack,
        spec.separation,
        &mut rng,
    )?)
}

fn experiment_name(source: &DataSource, schema: &Schema, balanced: bool) -> String {
    let mut name = String::new();
    if matches!(source, DataSource::Synthetic(_)) {
        name.push_str("synthetic_");
    }
    name.push_str(schema.kind.tag());
    if balanced {
        name.push_str("_balanced");
    }
    name
}

fn save_trained(out: &Path, ctx: &SweepContext, files: &mut Vec<PathBuf>) -> Result<()> {
    let model = out.join(MODEL_FILE);
    save_model(&model, &ctx.baseline)?;
    let loss = out.join(LOSS_FILE);
    write_text(&loss, &loss_csv(&ctx.loss_trace))?;
    files.extend([model, loss]);
    Ok(())
}

fn export_perturbed(
    out: &Path,
    ctx: &SweepContext,
    name: &str,
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    let test = &ctx.prepared.test;
    let source_sha256 = Some(test.content_hash());
    for &eps in &ctx.config.epsilons {
        let cfg = AttackConfig::new(eps)?.clipped(ctx.config.clip_to_unit);
        let attacked = perturb_dataset(&ctx.baseline, test, &cfg)?;
        let path = out.join(format!("perturbed_{name}_eps{eps}.csv"));
        let provenance = CsvProvenance {
            schema: test.schema().kind.tag().into(),
            seed: ctx.config.seed,
            epsilon: Some(eps),
            source_sha256: source_sha256.clone(),
        };
        write_csv(&path, &attacked, &provenance)?;
        files.push(path);
    }
    Ok(())
}

/// Imbalanced Bot-IoT, SMOTE-balanced Bot-IoT and Modbus, each with the
/// sweep and the defense suite.
fn replicate(m: &RunManifest) -> Result<Vec<ExperimentReport>> {
    let bot = Schema::bot_iot();
    let modbus = Schema::modbus();
    let (bot_raw, modbus_raw) = match &m.source {
        DataSource::Datasets {
            bot_iot,
            modbus: modbus_path,
        } => (
            ingest_csv(bot_iot, &bot)?.dataset,
            ingest_csv(modbus_path, &modbus)?.dataset,
        ),
        DataSource::Synthetic(spec) => (
            synthetic(spec, &bot, m.sweep.seed)?,
            synthetic(spec, &modbus, m.sweep.seed)?,
        ),
        DataSource::Csv { .. } => {
            return Err(AppError::Usage(
                "replicate takes --bot-iot and --modbus".into(),
            ))
        }
    };
    let blocks = [(&bot_raw, false), (&bot_raw, true), (&modbus_raw, false)];
    let mut reports = Vec::with_capacity(blocks.len());
    for (raw, balance) in blocks {
        let cfg = SweepConfig {
            balance,
            ..m.sweep.clone()
        };
        let name = experiment_name(&m.source, raw.schema(), balance);
        log::info!("replicate: {name}");
        let ctx = SweepContext::train(raw, cfg)?;
        reports.push(run_experiment(
            name,
            &ctx,
            Some((&m.fractions, m.attack_epsilon)),
        )?);
    }
    Ok(reports)
}

/// The text table printed to stdout after a run.
pub fn summary(outcome: &Outcome) -> String {
    let mut s = report_table(&outcome.reports);
    for f in &outcome.files {
        s.push_str(&format!("wrote {}\n", f.display()));
    }
    s
}
