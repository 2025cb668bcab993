//! Datasets, schemas and the preprocessing steps applied before training.

mod normalize;
mod schema;
mod smote;
mod split;
mod synthetic;

pub use normalize::{minmax_normalize, MinMaxScaler};
pub use schema::{
    binarize_labels, modbus_time_features, Schema, SchemaKind, MODBUS_REGISTER_COLUMNS,
    MODBUS_TIMESTAMP_COLUMN, MODBUS_TIME_FEATURES,
};
pub use smote::{smote_balance, smote_with_origins, SmoteConfig, SmoteOrigin};
pub use split::{stratified_split, Split, SplitWarning, DEFAULT_TRAIN_FRACTION};
pub use synthetic::generate_synthetic;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use sha2::Digest;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Where a dataset's feature values stand relative to preprocessing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "state")]
pub enum Normalization {
    Raw,
    MinMax(MinMaxScaler),
    Perturbed { epsilon: f64 },
}

/// Feature matrix with binary labels (0 = normal, 1 = attack).
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    schema: Schema,
    features: Matrix,
    labels: Vec<u8>,
    normalization: Normalization,
}

impl Dataset {
    /// A raw dataset. Fails on row/label count or schema width mismatch and on
    /// labels outside `{0, 1}`.
    pub fn new(schema: Schema, features: Matrix, labels: Vec<u8>) -> Result<Self> {
        Self::with_state(schema, features, labels, Normalization::Raw)
    }

    pub fn with_state(
        schema: Schema,
        features: Matrix,
        labels: Vec<u8>,
        normalization: Normalization,
    ) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::Shape {
                op: "dataset labels",
                left: features.shape(),
                right: (labels.len(), 1),
            });
        }
        if features.cols() != schema.feature_count() {
            return Err(Error::Shape {
                op: "dataset schema",
                left: features.shape(),
                right: (1, schema.feature_count()),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&y| y > 1) {
            return Err(Error::InvalidLabel(bad));
        }
        Ok(Dataset {
            schema,
            features,
            labels,
            normalization,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `[normal, attack]` row counts.
    pub fn class_counts(&self) -> [usize; 2] {
        let attack = self.labels.iter().filter(|&&y| y == 1).count();
        [self.labels.len() - attack, attack]
    }

    /// Same schema and labels, new features and state.
    pub fn replace_features(&self, features: Matrix, normalization: Normalization) -> Result<Self> {
        Dataset::with_state(
            self.schema.clone(),
            features,
            self.labels.clone(),
            normalization,
        )
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let features = self.features.select_rows(indices)?;
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Dataset::with_state(
            self.schema.clone(),
            features,
            labels,
            self.normalization.clone(),
        )
    }

    /// Hex SHA-256 over shape, feature bits and labels.
    pub fn content_hash(&self) -> String {
        crate::sha256_hex(|h| {
            h.update((self.features.rows() as u64).to_le_bytes());
            h.update((self.features.cols() as u64).to_le_bytes());
            for v in self.features.as_slice() {
                h.update(v.to_bits().to_le_bytes());
            }
            h.update(&self.labels);
        })
    }
}

pub(crate) fn class_indices(labels: &[u8]) -> [Vec<usize>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for (i, &y) in labels.iter().enumerate() {
        out[y as usize].push(i);
    }
    out
}

pub(crate) fn describe_counts(counts: [usize; 2]) -> String {
    format!("{} normal / {} attack", counts[0], counts[1])
}
