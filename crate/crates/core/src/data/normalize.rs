use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Dataset, Normalization};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Per-column min-max transform `(v - min) / (max - min)`; zero-range columns map to 0.
///
/// Applied to held-out data the transform stays affine, so values beyond the
/// fitted range land outside `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(x: &Matrix) -> Self {
        let mut min = x.row(0).to_vec();
        let mut max = min.clone();
        for row in x.row_iter().skip(1) {
            for ((lo, hi), &v) in min.iter_mut().zip(max.iter_mut()).zip(row) {
                *lo = lo.min(v);
                *hi = hi.max(v);
            }
        }
        MinMaxScaler { min, max }
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.min.len() {
            return Err(Error::Shape {
                op: "minmax transform",
                left: x.shape(),
                right: (1, self.min.len()),
            });
        }
        let mut out = x.clone();
        for r in 0..out.rows() {
            for ((v, &lo), &hi) in out.row_mut(r).iter_mut().zip(&self.min).zip(&self.max) {
                let range = hi - lo;
                *v = if range > 0.0 { (*v - lo) / range } else { 0.0 };
            }
        }
        Ok(out)
    }

    /// Transforms `data` and tags it with this scaler.
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        let features = self.transform(data.features())?;
        data.replace_features(features, Normalization::MinMax(self.clone()))
    }
}

/// Fits a scaler on `data` and returns the normalized copy with the scaler.
pub fn minmax_normalize(data: &Dataset) -> Result<(Dataset, MinMaxScaler)> {
    let scaler = MinMaxScaler::fit(data.features());
    let normalized = scaler.apply(data)?;
    Ok((normalized, scaler))
}
