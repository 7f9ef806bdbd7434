//! Logistic loss derivatives and the closed-form second-order leaf and split
//! quantities.

use crate::error::{Error, Result};

/// First and second derivative of the loss with respect to the margin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GradPair {
    pub g: f64,
    pub h: f64,
}

impl GradPair {
    pub fn new(g: f64, h: f64) -> Self {
        Self { g, h }
    }
}

pub fn sigmoid(margin: f64) -> f64 {
    if margin >= 0.0 {
        1.0 / (1.0 + (-margin).exp())
    } else {
        let e = margin.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Logistic negative log-likelihood of `label` at `margin`,
/// `ln(1 + e^m) - y m`, written as `(1 - y) softplus(m) + y softplus(-m)`
/// so that small losses keep their relative precision.
pub fn log_loss(label: f64, margin: f64) -> f64 {
    (1.0 - label) * softplus(margin) + label * softplus(-margin)
}

pub fn logistic_grad_hess(label: f64, margin: f64) -> GradPair {
    let p = sigmoid(margin);
    GradPair {
        g: p - label,
        h: p * (1.0 - p),
    }
}

/// Optimal leaf value `-G / (H + lambda)`.
pub fn leaf_weight(g_sum: f64, h_sum: f64, lambda: f64) -> Result<f64> {
    let den = h_sum + lambda;
    if den <= 0.0 || den.is_nan() {
        return Err(Error::DegenerateLeaf(den));
    }
    Ok(-g_sum / den)
}

/// Reduction of the regularized objective from splitting a node into the
/// given children, net of `gamma`.
pub fn split_gain(g_l: f64, h_l: f64, g_r: f64, h_r: f64, lambda: f64, gamma: f64) -> f64 {
    let score = |g: f64, h: f64| g * g / (h + lambda);
    0.5 * (score(g_l, h_l) + score(g_r, h_r) - score(g_l + g_r, h_l + h_r)) - gamma
}
