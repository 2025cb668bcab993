use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemaKind {
    BotIot,
    Modbus,
    Synthetic,
}

impl SchemaKind {
    pub fn tag(self) -> &'static str {
        match self {
            SchemaKind::BotIot => "bot_iot",
            SchemaKind::Modbus => "modbus",
            SchemaKind::Synthetic => "synthetic",
        }
    }
}

const BOT_IOT_FEATURES: [&str; 10] = [
    "seq",
    "stddev",
    "N_IN_Conn_P_SrcIP",
    "min",
    "state_number",
    "mean",
    "N_IN_Conn_P_DstIP",
    "drate",
    "srate",
    "max",
];

/// Modbus register/coil read counts taken verbatim from the CSV.
pub const MODBUS_REGISTER_COLUMNS: [&str; 4] = [
    "FC1_Read_Input_Register",
    "FC2_Read_Discrete_Value",
    "FC3_Read_Holding_Register",
    "FC1_Read_Coil",
];

/// Cyclical time features derived from the `ts` column.
pub const MODBUS_TIME_FEATURES: [&str; 4] = ["hour_sin", "hour_cos", "day_sin", "day_cos"];

/// Unix timestamp column the Modbus time features are derived from.
pub const MODBUS_TIMESTAMP_COLUMN: &str = "ts";

const NORMAL_CLASS: &str = "normal";

/// Column layout and class vocabulary of an input dataset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub kind: SchemaKind,
    pub feature_names: Vec<String>,
    pub label_column: String,
    pub attack_class_names: Vec<String>,
}

impl Schema {
    /// The ten selected Bot-IoT flow features; labels come from `category`.
    pub fn bot_iot() -> Self {
        Schema {
            kind: SchemaKind::BotIot,
            feature_names: owned(&BOT_IOT_FEATURES),
            label_column: "category".into(),
            attack_class_names: owned(&["DDoS", "DoS", "Reconnaissance", "Theft"]),
        }
    }

    /// Four Modbus read counts plus four cyclical time features; labels come from `type`.
    pub fn modbus() -> Self {
        let mut features = owned(&MODBUS_REGISTER_COLUMNS);
        features.extend(owned(&MODBUS_TIME_FEATURES));
        Schema {
            kind: SchemaKind::Modbus,
            feature_names: features,
            label_column: "type".into(),
            attack_class_names: owned(&["DoS", "DDoS", "Backdoor"]),
        }
    }

    /// Generic `f0..f{n-1}` schema with a numeric `label` column.
    pub fn synthetic(n_features: usize) -> Self {
        Schema {
            kind: SchemaKind::Synthetic,
            feature_names: (0..n_features).map(|i| format!("f{i}")).collect(),
            label_column: "label".into(),
            attack_class_names: owned(&["attack"]),
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "bot_iot" => Ok(Schema::bot_iot()),
            "modbus" => Ok(Schema::modbus()),
            other => Err(Error::Config(format!(
                "unknown schema {other:?} (expected bot_iot or modbus)"
            ))),
        }
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    /// Maps one class name to 0 (normal) or 1 (attack), case-insensitively.
    pub fn binarize(&self, raw: &str) -> Result<u8> {
        let name = raw.trim();
        if name.eq_ignore_ascii_case(NORMAL_CLASS) {
            return Ok(0);
        }
        if self
            .attack_class_names
            .iter()
            .any(|c| c.eq_ignore_ascii_case(name))
        {
            return Ok(1);
        }
        Err(Error::UnknownLabel(name.to_string()))
    }
}

/// Normal → 0, declared attack classes → 1, anything else is an error naming the value.
pub fn binarize_labels<S: AsRef<str>>(raw: &[S], schema: &Schema) -> Result<Vec<u8>> {
    raw.iter().map(|r| schema.binarize(r.as_ref())).collect()
}

/// `[hour_sin, hour_cos, day_sin, day_cos]` for a Unix timestamp in seconds.
///
/// Hour is the UTC time of day; day is the day of week (1970-01-01 was a Thursday).
pub fn modbus_time_features(unix_seconds: f64) -> [f64; 4] {
    let day_seconds = 86_400.0;
    let tod = modulo(unix_seconds, day_seconds) / day_seconds;
    let days = libm::floor(unix_seconds / day_seconds);
    let dow = modulo(days + 3.0, 7.0) / 7.0;
    [
        libm::sin(TAU * tod),
        libm::cos(TAU * tod),
        libm::sin(TAU * dow),
        libm::cos(TAU * dow),
    ]
}

fn modulo(a: f64, b: f64) -> f64 {
    let r = a % b;
    if r < 0.0 {
        r + b
    } else {
        r
    }
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
