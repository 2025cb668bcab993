//! Fast gradient sign method: `x̃ = x + ε · sign(∇ₓ J(w, x, y))` with the true labels.

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Normalization};
use crate::error::{Error, Result};
use crate::linalg::{sign, Matrix};
use crate::nn::MlpModel;

/// Epsilon grid of the reference sweep.
pub const DEFAULT_EPSILONS: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub epsilon: f64,
    /// Clamp perturbed values to `[0, 1]` (never further than ε from the input).
    pub clip_to_unit: bool,
}

impl AttackConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        let cfg = AttackConfig {
            epsilon,
            clip_to_unit: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn clipped(mut self, clip: bool) -> Self {
        self.clip_to_unit = clip;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be finite and non-negative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// FGSM perturbation of every row of `x` against `model`.
///
/// Coordinates with a zero gradient are left alone. Every output entry
/// satisfies `|x̃ − x| ≤ ε` as evaluated in `f64`.
pub fn fgsm_perturb(
    model: &MlpModel,
    x: &Matrix,
    labels: &[u8],
    cfg: &AttackConfig,
) -> Result<Matrix> {
    cfg.validate()?;
    let grad = model.input_gradient(x, labels)?;
    if cfg.epsilon == 0.0 {
        return Ok(x.clone());
    }
    x.zip_map(&grad, |v, g| step(v, sign(g), cfg))
}

/// Applies [`fgsm_perturb`] to a whole dataset; labels pass through.
pub fn perturb_dataset(model: &MlpModel, data: &Dataset, cfg: &AttackConfig) -> Result<Dataset> {
    let features = fgsm_perturb(model, data.features(), data.labels(), cfg)?;
    data.replace_features(
        features,
        Normalization::Perturbed {
            epsilon: cfg.epsilon,
        },
    )
}

fn step(x: f64, direction: f64, cfg: &AttackConfig) -> f64 {
    let eps = cfg.epsilon;
    let mut v = x + eps * direction;
    if cfg.clip_to_unit {
        v = v.clamp(0.0, 1.0).clamp(x - eps, x + eps);
    }
    // Rounding in `x ± ε` can overshoot the budget by an ulp; step back toward x.
    while libm::fabs(v - x) > eps {
        v = libm::nextafter(v, x);
    }
    v
}
