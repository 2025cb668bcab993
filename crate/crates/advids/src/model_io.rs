//! JSON model files. Floats are written with shortest round-trip formatting,
//! so a save/load cycle reproduces every weight bit for bit.

use std::fs;
use std::path::Path;

use advids_core::nn::{MlpModel, ModelParts};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

pub const MODEL_FORMAT: &str = "advids-mlp";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: ModelParts,
}

pub fn model_to_json(model: &MlpModel) -> String {
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        model: model.clone().into(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("model serialization is infallible");
    s.push('\n');
    s
}

pub fn save_model(path: &Path, model: &MlpModel) -> Result<()> {
    fs::write(path, model_to_json(model)).map_err(|e| AppError::io(path, e))
}

pub fn load_model(path: &Path) -> Result<MlpModel> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|source| AppError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
        return Err(AppError::Usage(format!(
            "{}: unsupported model file {} v{}",
            path.display(),
            file.format,
            file.version
        )));
    }
    Ok(MlpModel::from_parts(file.model)?)
}
