//! Bounds on the error of the ERM classifier learned from a `k`-dimensional
//! random projection of the training set, stated in terms of a reference
//! dataspace direction `h`. Each holds with probability `1 − 2δ`.

use super::{check_delta, check_k, BoundBreakdown, BoundKind, BoundParams, Constants, MarginProfile, Terms};
use crate::error::{Error, Result};
use crate::flipkernel::flip_prob;
use crate::par::{self, pairwise_mean};

fn vc_term(k: usize, n: usize, delta: f64, c: f64) -> f64 {
    c * ((k as f64 + 1.0 + (1.0 / delta).ln()) / n as f64).sqrt()
}

/// `min{ (1−δ)/δ · flip, √(½ log(1/δ)) }`.
fn flip_excess(flip: f64, delta: f64) -> f64 {
    ((1.0 - delta) / delta * flip).min((0.5 * (1.0 / delta).ln()).sqrt())
}

/// Mean of `f_k(θ_n)` over the points passing `gate`.
fn gated_flip_mean(cosines: &[f64], k: usize, gate: impl Fn(f64) -> bool + Sync + Send) -> f64 {
    let terms = par::map(cosines.len(), |i| {
        let c = cosines[i];
        if gate(c) {
            flip_prob(k, c)
        } else {
            0.0
        }
    });
    pairwise_mean(&terms)
}

fn indicator_mean(values: &[f64], hit: impl Fn(f64) -> bool) -> f64 {
    values.iter().filter(|&&v| hit(v)).count() as f64 / values.len() as f64
}

fn params(profile: &MarginProfile, k: usize, delta: f64, gamma: Option<f64>) -> BoundParams {
    BoundParams {
        k: Some(k),
        n: profile.len(),
        delta,
        gamma,
        srm: false,
    }
}

fn validate(profile: &MarginProfile, k: usize, delta: f64, constants: &Constants) -> Result<()> {
    check_k(k)?;
    check_delta(delta)?;
    constants.validate()?;
    if profile.is_empty() {
        return Err(Error::invalid("empty margin profile"));
    }
    Ok(())
}

/// Empirical error of `h` plus the probability that its correctly
/// classified points flip under projection.
pub fn bound_compressive_split(
    profile: &MarginProfile,
    k: usize,
    delta: f64,
    constants: Constants,
) -> Result<BoundBreakdown> {
    validate(profile, k, delta, &constants)?;
    let n = profile.len();
    let empirical = indicator_mean(&profile.scores, |s| s <= 0.0);
    let flip = gated_flip_mean(&profile.cosines, k, |c| c > 0.0);
    Ok(BoundBreakdown::assemble(
        BoundKind::CompressiveSplit,
        Terms {
            empirical,
            flip,
            complexity: vc_term(k, n, delta, constants.c),
            slack: vec![("flip_excess", flip_excess(flip, delta))],
        },
        1.0 - 2.0 * delta,
        constants,
        params(profile, k, delta, None),
    ))
}

/// Split bound with the correct/incorrect threshold raised to a margin `γ`.
pub fn bound_compressive_margin(
    profile: &MarginProfile,
    k: usize,
    delta: f64,
    gamma: f64,
    constants: Constants,
) -> Result<BoundBreakdown> {
    validate(profile, k, delta, &constants)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid(format!("margin gamma must be positive, got {gamma}")));
    }
    let n = profile.len();
    let empirical = indicator_mean(&profile.cosines, |c| c <= gamma);
    let flip = gated_flip_mean(&profile.cosines, k, |c| c > gamma);
    Ok(BoundBreakdown::assemble(
        BoundKind::CompressiveMargin,
        Terms {
            empirical,
            flip,
            complexity: vc_term(k, n, delta, constants.c),
            slack: vec![("flip_excess", flip_excess(flip, delta))],
        },
        1.0 - 2.0 * delta,
        constants,
        params(profile, k, delta, Some(gamma)),
    ))
}

/// Gaussian-projection variant: the ungated mean of `f_k(θ_n)` replaces the
/// empirical error, crediting points that flip from wrong to right.
pub fn bound_compressive_exact(
    profile: &MarginProfile,
    k: usize,
    delta: f64,
    constants: Constants,
) -> Result<BoundBreakdown> {
    validate(profile, k, delta, &constants)?;
    let n = profile.len();
    let flip = gated_flip_mean(&profile.cosines, k, |_| true);
    Ok(BoundBreakdown::assemble(
        BoundKind::CompressiveExact,
        Terms {
            empirical: 0.0,
            flip,
            complexity: vc_term(k, n, delta, constants.c),
            slack: vec![("flip_excess", flip_excess(flip, delta))],
        },
        1.0 - 2.0 * delta,
        constants,
        params(profile, k, delta, None),
    ))
}
