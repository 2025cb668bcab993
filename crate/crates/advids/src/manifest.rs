//! The fully resolved description of one run, echoed as `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use advids_core::data::Schema;
use advids_core::experiment::{
    DefenseConfig, SweepConfig, DEFAULT_DEFENSE_EPSILON, DEFAULT_DEFENSE_FRACTIONS,
};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Train,
    Sweep,
    Defend,
    Replicate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_normal: usize,
    pub n_attack: usize,
    /// Distance between the two class means.
    pub separation: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_normal: 1000,
            n_attack: 1000,
            separation: 6.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DataSource {
    Csv {
        path: PathBuf,
    },
    Synthetic(SyntheticSpec),
    /// Real Bot-IoT and Modbus files for the three-block replication.
    Datasets {
        bot_iot: PathBuf,
        modbus: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub source: DataSource,
    /// `bot_iot` or `modbus`; ignored by `replicate`.
    pub schema: String,
    pub sweep: SweepConfig,
    pub fractions: Vec<f64>,
    pub attack_epsilon: f64,
    /// Pretrained baseline; trained inline when absent.
    pub model: Option<PathBuf>,
    pub out: PathBuf,
    /// Also write each perturbed test set as CSV.
    pub export_perturbed: bool,
}

impl RunManifest {
    pub fn new(command: Command, source: DataSource, out: PathBuf) -> Self {
        RunManifest {
            command,
            source,
            schema: "bot_iot".into(),
            sweep: SweepConfig::default(),
            fractions: DEFAULT_DEFENSE_FRACTIONS.to_vec(),
            attack_epsilon: DEFAULT_DEFENSE_EPSILON,
            model: None,
            out,
            export_perturbed: false,
        }
    }

    pub fn schema(&self) -> Result<Schema> {
        Ok(Schema::from_tag(&self.schema)?)
    }

    /// Checks everything that can be checked before touching data.
    pub fn validate(&self) -> Result<()> {
        self.sweep.validate()?;
        self.schema()?;
        for &f in &self.fractions {
            DefenseConfig {
                adversarial_fraction: f,
                attack_epsilon: self.attack_epsilon,
                seed: self.sweep.seed,
            }
            .validate()?;
        }
        match (&self.source, self.command) {
            (DataSource::Datasets { .. }, c) if c != Command::Replicate => Err(AppError::Usage(
                "--bot-iot/--modbus inputs are only used by replicate".into(),
            )),
            (DataSource::Csv { .. }, Command::Replicate) => Err(AppError::Usage(
                "replicate takes --bot-iot and --modbus (or --synthetic), not --data".into(),
            )),
            (DataSource::Synthetic(s), _) if !(s.separation.is_finite() && s.separation >= 0.0) => {
                Err(advids_core::Error::Config(format!(
                    "separation must be finite and non-negative, got {}",
                    s.separation
                ))
                .into())
            }
            _ => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("manifest serialization is infallible");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| AppError::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}
