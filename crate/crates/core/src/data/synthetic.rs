use alloc::format;
use alloc::vec::Vec;

use super::{Dataset, Schema};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};

/// Two isotropic unit-variance Gaussian clusters, one per class.
///
/// Normal rows are centred at the origin; attack rows at `separation` along the
/// all-ones diagonal, so the Euclidean distance between the cluster means is
/// `separation` standard deviations. Normal rows come first.
pub fn generate_synthetic(
    schema: &Schema,
    n_normal: usize,
    n_attack: usize,
    separation: f64,
    rng: &mut Rng,
) -> Result<Dataset> {
    let n = n_normal + n_attack;
    if n == 0 {
        return Err(Error::EmptyData(
            "synthetic dataset needs at least one row".into(),
        ));
    }
    if !(separation.is_finite() && separation >= 0.0) {
        return Err(Error::Config(format!(
            "separation must be a finite non-negative number, got {separation}"
        )));
    }
    let d = schema.feature_count();
    if d == 0 {
        return Err(Error::InvalidDimension("schema has no features".into()));
    }
    let offset = separation / libm::sqrt(d as f64);
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let attack = i >= n_normal;
        let shift = if attack { offset } else { 0.0 };
        data.extend((0..d).map(|_| shift + rng.normal()));
        labels.push(u8::from(attack));
    }
    Dataset::new(schema.clone(), Matrix::new(n, d, data)?, labels)
}
