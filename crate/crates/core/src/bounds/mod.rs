//! Generalization bounds for linear and ensemble classifiers.
//!
//! Every evaluator returns a [`BoundBreakdown`] listing each additive term,
//! the absolute constants used and the confidence level the total holds at.
//! The constants `c` (VC term), `C` and `K` (width condition) have no fixed
//! numerical value in the underlying results; they default to 1 and are
//! echoed in the output.

mod compressive;
mod dataspace;
mod ensemble;
mod profile;
mod shift;
mod suffk;
mod width;

pub use compressive::{bound_compressive_exact, bound_compressive_margin, bound_compressive_split};
pub use dataspace::{bound_dataspace, bound_dataspace_pointwise_k, bound_ldm, ldm_k};
pub use ensemble::{bound_ensemble_exploss, bound_ensemble_margin, Ensemble};
pub use profile::{margin_profile, MarginProfile};
pub use shift::shift_condition;
pub use suffk::{sufficient_k_margin, sufficient_k_multiclass, sufficient_k_width, MulticlassScheme};
pub use width::{gaussian_width_mc, gaussian_width_mc_with, WidthEstimate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    #[serde(rename = "K")]
    pub big_k: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c: 1.0,
            big_c: 1.0,
            big_k: 1.0,
        }
    }
}

impl Constants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("C", self.big_c), ("K", self.big_k)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("constant {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    CompressiveSplit,
    CompressiveMargin,
    CompressiveExact,
    Dataspace,
    DataspacePointwiseK,
    Ldm,
    EnsembleMargin,
    EnsembleExploss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackTerm {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// Projection dimension; for per-point `k` this is `max_n k_n`.
    pub k: Option<usize>,
    #[serde(rename = "N")]
    pub n: usize,
    pub delta: f64,
    pub gamma: Option<f64>,
    pub srm: bool,
}

/// Additive decomposition of a bound value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub bound: BoundKind,
    pub empirical_term: f64,
    pub flip_term: f64,
    pub complexity_term: f64,
    pub slack_terms: Vec<SlackTerm>,
    pub total: f64,
    /// Probability with which `total` bounds the generalization error.
    pub confidence: f64,
    pub constants: Constants,
    pub params: BoundParams,
}

struct Terms {
    empirical: f64,
    flip: f64,
    complexity: f64,
    slack: Vec<(&'static str, f64)>,
}

impl BoundBreakdown {
    fn assemble(
        bound: BoundKind,
        terms: Terms,
        confidence: f64,
        constants: Constants,
        params: BoundParams,
    ) -> Self {
        let slack_terms: Vec<SlackTerm> = terms
            .slack
            .into_iter()
            .map(|(name, value)| SlackTerm {
                name: name.to_string(),
                value,
            })
            .collect();
        let total = terms.empirical
            + terms.flip
            + terms.complexity
            + slack_terms.iter().map(|s| s.value).sum::<f64>();
        BoundBreakdown {
            bound,
            empirical_term: terms.empirical,
            flip_term: terms.flip,
            complexity_term: terms.complexity,
            slack_terms,
            total,
            confidence,
            constants,
            params,
        }
    }

    pub fn slack(&self, name: &str) -> Option<f64> {
        self.slack_terms.iter().find(|s| s.name == name).map(|s| s.value)
    }

    /// Everything except the empirical and flip terms.
    pub fn complexity_plus_slack(&self) -> f64 {
        self.complexity_term + self.slack_terms.iter().map(|s| s.value).sum::<f64>()
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    Ok(())
}

/// `3√(log(2/δ) / (2N))`, the Rademacher-bound confidence term.
fn confidence_slack(n: usize, delta: f64) -> f64 {
    3.0 * ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

/// `3√(log 2 / 2)·√(k/N)`, the price of choosing `k` after seeing the data
/// under the prior `μ_k = 2^{-k}`.
fn srm_slack(k: usize, n: usize) -> f64 {
    3.0 * (std::f64::consts::LN_2 / 2.0).sqrt() * (k as f64 / n as f64).sqrt()
}
