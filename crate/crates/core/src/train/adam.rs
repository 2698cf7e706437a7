//! Adam on flattened parameter vectors with a step-halving schedule.

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// The learning rate is halved once per this many epochs.
    pub decay_epochs: usize,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            decay_epochs: 20,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(CoreError::invalid(format!(
                "learning rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(CoreError::invalid(format!(
                    "{name} must lie in [0, 1), got {beta}"
                )));
            }
        }
        if !(self.eps > 0.0) {
            return Err(CoreError::invalid(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.decay_epochs == 0 {
            return Err(CoreError::invalid("decay interval must be at least 1"));
        }
        Ok(())
    }

    /// Effective learning rate for a zero-based epoch index.
    pub fn learning_rate_at(&self, epoch: usize) -> f64 {
        self.learning_rate * 0.5f64.powi((epoch / self.decay_epochs) as i32)
    }
}

#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

impl AdamState {
    pub fn new(parameter_count: usize) -> AdamState {
        AdamState {
            m: vec![0.0; parameter_count],
            v: vec![0.0; parameter_count],
            step: 0,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }
}

/// Names the parameter section that owns flat index `idx`.
fn section_for_index(sections: &[(String, usize)], idx: usize) -> &str {
    let mut offset = 0;
    for (name, len) in sections {
        if idx < offset + len {
            return name;
        }
        offset += len;
    }
    "unknown"
}

/// One bias-corrected Adam update of `params` in place.
///
/// `sections` describes the flat layout (name, length) and is used to name
/// the offending parameter group when a gradient is non-finite.
pub fn adam_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamState,
    config: &AdamConfig,
    learning_rate: f64,
    sections: &[(String, usize)],
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(CoreError::shape(format!(
            "optimizer saw {} parameters, {} gradients, state of size {}",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    if let Some(idx) = grads.iter().position(|g| !g.is_finite()) {
        return Err(CoreError::numerical(format!(
            "non-finite gradient in {} (flat index {idx}): {}",
            section_for_index(sections, idx),
            grads[idx]
        )));
    }
    state.step += 1;
    let t = state.step as i32;
    let m_corr = 1.0 / (1.0 - config.beta1.powi(t));
    let v_corr = 1.0 / (1.0 - config.beta2.powi(t));
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
        let m_hat = state.m[i] * m_corr;
        let v_hat = state.v[i] * v_corr;
        params[i] -= learning_rate * m_hat / (v_hat.sqrt() + config.eps);
    }
    Ok(())
}
