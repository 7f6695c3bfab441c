use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Per-channel binary cross-entropy.
    #[default]
    Bce,
    /// Per-channel squared error.
    L2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub kind: LossKind,
    /// Weight of the L1 penalty on synapse parameters.
    pub l1_strength: f64,
    /// BCE probabilities are clipped to `[ε, 1-ε]`.
    pub epsilon_clip: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            kind: LossKind::Bce,
            l1_strength: 0.0,
            epsilon_clip: 1e-7,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.l1_strength >= 0.0 && self.l1_strength.is_finite()) {
            return Err(Error::Argument(format!(
                "l1_strength must be a finite non-negative number, got {}",
                self.l1_strength
            )));
        }
        if !(self.epsilon_clip > 0.0 && self.epsilon_clip < 0.5) {
            return Err(Error::Argument(format!(
                "epsilon_clip must lie in (0, 0.5), got {}",
                self.epsilon_clip
            )));
        }
        Ok(())
    }
}

/// Mean per-channel loss of predicted marginals against targets in `[0, 1]`.
pub fn data_loss(probs: &[f64], targets: &[f64], cfg: &LossConfig) -> f64 {
    debug_assert_eq!(probs.len(), targets.len());
    let n = probs.len() as f64;
    let total: f64 = match cfg.kind {
        LossKind::Bce => probs
            .iter()
            .zip(targets)
            .map(|(&p, &y)| {
                let p = p.clamp(cfg.epsilon_clip, 1.0 - cfg.epsilon_clip);
                -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
            })
            .sum(),
        LossKind::L2 => probs.iter().zip(targets).map(|(&p, &y)| (p - y).powi(2)).sum(),
    };
    total / n
}

/// `∂ data_loss / ∂ p_i`; zero where the BCE clip is active.
pub fn data_loss_grad(probs: &[f64], targets: &[f64], cfg: &LossConfig) -> Vec<f64> {
    let n = probs.len() as f64;
    probs
        .iter()
        .zip(targets)
        .map(|(&p, &y)| match cfg.kind {
            LossKind::Bce => {
                let eps = cfg.epsilon_clip;
                if p < eps || p > 1.0 - eps {
                    0.0
                } else {
                    (-y / p + (1.0 - y) / (1.0 - p)) / n
                }
            }
            LossKind::L2 => 2.0 * (p - y) / n,
        })
        .collect()
}

/// `strength · Σ |values[i]|` over entries with `mask[i]`.
pub fn l1_penalty(values: &[f64], mask: &[bool], strength: f64) -> f64 {
    strength
        * values
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v.abs())
            .sum::<f64>()
}

/// Subgradient of [`l1_penalty`], taking 0 at 0.
pub fn l1_subgradient(values: &[f64], mask: &[bool], strength: f64) -> Vec<f64> {
    values
        .iter()
        .zip(mask)
        .map(|(&v, &m)| {
            if !m || v == 0.0 {
                0.0
            } else {
                strength * v.signum()
            }
        })
        .collect()
}
