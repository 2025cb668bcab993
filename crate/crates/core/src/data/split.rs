use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{class_indices, describe_counts, Dataset};
use crate::error::{Error, Result};
use crate::linalg::Rng;

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SplitWarning {
    /// Only one class present; the split is a plain seeded split.
    SingleClass { class: u8 },
    /// A class too small to appear on both sides of the split.
    SmallClass { class: u8, count: usize },
}

#[derive(Clone, Debug)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub warnings: Vec<SplitWarning>,
}

/// Per-class seeded split.
///
/// Class `c` with `n` rows sends `floor(n·f)` rows to train plus one more with
/// probability equal to the fractional part, so every class lands within one
/// row of its exact share. Index lists are returned in ascending order.
pub fn stratified_split(data: &Dataset, train_fraction: f64, rng: &mut Rng) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut warnings = Vec::new();
    let counts = data.class_counts();
    for class in 0..2u8 {
        let n = counts[class as usize];
        if n == 0 {
            warnings.push(SplitWarning::SingleClass { class: 1 - class });
        } else if n < 2 {
            warnings.push(SplitWarning::SmallClass { class, count: n });
        }
    }

    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for mut members in class_indices(data.labels()) {
        if members.is_empty() {
            continue;
        }
        rng.shuffle(&mut members);
        let exact = members.len() as f64 * train_fraction;
        let base = libm::floor(exact + 1e-9);
        let frac = exact - base;
        let mut take = base as usize;
        if frac > 1e-9 && rng.next_f64() < frac {
            take += 1;
        }
        let take = take.min(members.len());
        train_idx.extend_from_slice(&members[..take]);
        test_idx.extend_from_slice(&members[take..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(Error::EmptyData(format!(
            "split of {} rows ({}) leaves an empty partition",
            data.len(),
            describe_counts(counts)
        )));
    }
    Ok(Split {
        train: data.subset(&train_idx)?,
        test: data.subset(&test_idx)?,
        train_indices: train_idx,
        test_indices: test_idx,
        warnings,
    })
}
