//! Sufficient projection dimensions. Real-valued requirements are rounded up
//! to the next integer; values within `1e-9` (relative) of an integer are
//! treated as that integer so rounding noise cannot add a dimension.

use serde::{Deserialize, Serialize};

use super::{check_delta, Constants};
use crate::error::{Error, Result};

fn ceil_k(x: f64) -> usize {
    let r = x.round();
    let v = if (x - r).abs() <= 1e-9 * x.abs().max(1.0) { r } else { x.ceil() };
    (v as usize).max(1)
}

fn check_unit_open(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::invalid(format!("{name} must lie in (0, 1), got {v}")));
    }
    Ok(())
}

/// `⌈8 log(1/(εδ)) / γ²⌉`: with this many subgaussian projection dimensions
/// the flip terms of the margin compressive bound stay below `ε`.
pub fn sufficient_k_margin(gamma: f64, epsilon: f64, delta: f64) -> Result<usize> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    check_unit_open("epsilon", epsilon)?;
    check_unit_open("delta", delta)?;
    Ok(ceil_k(8.0 * (1.0 / (epsilon * delta)).ln() / (gamma * gamma)))
}

fn width_condition(width: f64, log_term: f64, gamma: f64, constants: &Constants) -> Result<usize> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
    }
    if !(width >= 0.0) || !width.is_finite() {
        return Err(Error::invalid(format!("width must be non-negative, got {width}")));
    }
    constants.validate()?;
    let s = width + log_term.sqrt();
    Ok(ceil_k(constants.big_c * constants.big_k.powi(4) * s * s / gamma))
}

/// `⌈C K⁴ (w + √log(1/δ))² / γ⌉` projection dimensions for which no point of
/// the margin set (of Gaussian width `w`) flips, with probability `1 − δ`.
pub fn sufficient_k_width(width: f64, gamma: f64, delta: f64, constants: Constants) -> Result<usize> {
    check_delta(delta)?;
    width_condition(width, (1.0 / delta).ln(), gamma, &constants)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MulticlassScheme {
    OneVsAll,
    OneVsOne,
}

impl MulticlassScheme {
    /// Number of binary problems the confidence is split across.
    pub fn problems(self, m: usize) -> usize {
        match self {
            MulticlassScheme::OneVsAll => m,
            MulticlassScheme::OneVsOne => m * (m - 1) / 2,
        }
    }
}

/// Width condition with a union bound over the binary problems of an
/// `m`-class scheme: `log(1/δ)` becomes `log(P/δ)`, `P` the number of problems.
pub fn sufficient_k_multiclass(
    max_width: f64,
    m: usize,
    gamma: f64,
    delta: f64,
    constants: Constants,
    scheme: MulticlassScheme,
) -> Result<usize> {
    if m < 2 {
        return Err(Error::invalid(format!("need at least 2 classes, got {m}")));
    }
    check_delta(delta)?;
    let problems = scheme.problems(m) as f64;
    width_condition(max_width, (problems / delta).ln(), gamma, &constants)
}
