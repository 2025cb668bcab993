use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{DefenseConfig, SweepConfig};
use crate::data::{SchemaKind, SplitWarning};
use crate::metrics::{ConfusionMatrix, Scores};

/// One evaluation: a model scored on one test set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub label: String,
    /// Attack strength applied to the test set; `None` for the clean set.
    pub epsilon: Option<f64>,
    pub confusion: ConfusionMatrix,
    pub scores: Scores,
}

impl EvalRow {
    pub fn new(label: String, epsilon: Option<f64>, confusion: ConfusionMatrix) -> Self {
        EvalRow {
            label,
            epsilon,
            scores: confusion.scores(),
            confusion,
        }
    }

    /// True when the stored scores recompute from the confusion matrix within `tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let s = self.confusion.scores();
        let close = |a: f64, b: f64| libm::fabs(a - b) <= tol;
        close(s.precision, self.scores.precision)
            && close(s.recall, self.scores.recall)
            && close(s.f1, self.scores.f1)
            && close(s.accuracy, self.scores.accuracy)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefenseRow {
    pub label: String,
    pub config: DefenseConfig,
    /// Training rows swapped for their adversarial counterparts.
    pub replaced_rows: usize,
    /// Retrained model on the fully adversarial test set.
    pub eval: EvalRow,
    pub loss_trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefenseReport {
    pub attack_epsilon: f64,
    /// Baseline model on the same fully adversarial test set.
    pub undefended: EvalRow,
    pub rows: Vec<DefenseRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub schema: SchemaKind,
    pub source_hash: String,
    pub train_hash: String,
    pub test_hash: String,
    pub model_hash: String,
    /// `[normal, attack]` per partition.
    pub train_counts: [usize; 2],
    pub test_counts: [usize; 2],
    pub config: SweepConfig,
    pub warnings: Vec<SplitWarning>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub provenance: Provenance,
    pub baseline_loss_trace: Vec<f64>,
    pub clean: EvalRow,
    pub sweep: Vec<EvalRow>,
    pub defense: Option<DefenseReport>,
}

impl ExperimentReport {
    /// Clean row followed by the sweep rows.
    pub fn table_rows(&self) -> impl Iterator<Item = &EvalRow> {
        core::iter::once(&self.clean).chain(&self.sweep)
    }

    pub fn all_rows(&self) -> impl Iterator<Item = &EvalRow> {
        let defense = self
            .defense
            .iter()
            .flat_map(|d| core::iter::once(&d.undefended).chain(d.rows.iter().map(|r| &r.eval)));
        self.table_rows().chain(defense)
    }

    pub fn is_consistent(&self, tol: f64) -> bool {
        self.all_rows().all(|r| r.is_consistent(tol))
    }
}
