//! Uniform bounds on the error of a dataspace linear classifier in which the
//! target dimension `k` of an analytic random projection plays the role of
//! the VC dimension. Each holds with probability `1 − δ`.

use std::f64::consts::PI;

use super::{
    check_delta, check_k, confidence_slack, srm_slack, BoundBreakdown, BoundKind, BoundParams,
    Constants, MarginProfile, Terms,
};
use crate::error::{Error, Result};
use crate::flipkernel::loss;
use crate::par::{self, pairwise_mean};

/// `2√2/√π · √(k/N)`: Lipschitz constant bound times the Rademacher
/// complexity of unit-norm linear functions.
fn rademacher_term(k: usize, n: usize) -> f64 {
    2.0 * (2.0 / PI).sqrt() * (k as f64 / n as f64).sqrt()
}

fn mean_loss(cosines: &[f64], k_of: impl Fn(usize) -> usize + Sync + Send) -> f64 {
    let terms = par::map(cosines.len(), |i| loss(k_of(i), cosines[i]));
    pairwise_mean(&terms)
}

fn validate(profile: &MarginProfile, delta: f64) -> Result<()> {
    check_delta(delta)?;
    if profile.is_empty() {
        return Err(Error::invalid("empty margin profile"));
    }
    Ok(())
}

/// `(1/N)Σ min(1, 2f_k(θ_n)) + 2√(2/π)√(k/N) + 3√(log(2/δ)/(2N))`, plus
/// `3√(log 2/2)√(k/N)` when `srm` makes it uniform over `k`.
pub fn bound_dataspace(profile: &MarginProfile, k: usize, delta: f64, srm: bool) -> Result<BoundBreakdown> {
    check_k(k)?;
    validate(profile, delta)?;
    let n = profile.len();
    let flip = mean_loss(profile.dataspace_cosines(), |_| k);
    let mut slack = vec![("confidence", confidence_slack(n, delta))];
    if srm {
        slack.push(("srm", srm_slack(k, n)));
    }
    Ok(BoundBreakdown::assemble(
        BoundKind::Dataspace,
        Terms {
            empirical: 0.0,
            flip,
            complexity: rademacher_term(k, n),
            slack,
        },
        1.0 - delta,
        Constants::default(),
        BoundParams {
            k: Some(k),
            n,
            delta,
            gamma: None,
            srm,
        },
    ))
}

/// Dataspace bound with a data-independent projection dimension `k_n` per
/// point; complexity and SRM terms are charged at `max_n k_n`.
pub fn bound_dataspace_pointwise_k(profile: &MarginProfile, ks: &[usize], delta: f64) -> Result<BoundBreakdown> {
    validate(profile, delta)?;
    if ks.len() != profile.len() {
        return Err(Error::DimensionMismatch {
            expected: profile.len(),
            found: ks.len(),
        });
    }
    if let Some(i) = ks.iter().position(|&k| k == 0) {
        return Err(Error::degenerate(i, "per-point k must be at least 1"));
    }
    let n = profile.len();
    let k_max = *ks.iter().max().expect("non-empty");
    let flip = mean_loss(profile.dataspace_cosines(), |i| ks[i]);
    Ok(BoundBreakdown::assemble(
        BoundKind::DataspacePointwiseK,
        Terms {
            empirical: 0.0,
            flip,
            complexity: rademacher_term(k_max, n),
            slack: vec![
                ("confidence", confidence_slack(n, delta)),
                ("srm", srm_slack(k_max, n)),
            ],
        },
        1.0 - delta,
        Constants::default(),
        BoundParams {
            k: Some(k_max),
            n,
            delta,
            gamma: None,
            srm: true,
        },
    ))
}

/// The real-valued per-point dimension `2/|cos θ_n|` behind [`bound_ldm`].
pub fn ldm_k(cosine: f64) -> f64 {
    2.0 / cosine.abs()
}

/// Margin-distribution bound obtained from the per-point bound with
/// `k_n = 2/|cos θ_n|` and the Chernoff form of `f_k`:
/// `(1/N)Σ 2e^{−cos θ_n} + (4/√π)(1/√N)·M + 3√(log(2/δ)/(2N)) + 3√(log 2/N)·M`
/// with `M = max_n √(1/|cos θ_n|)`.
pub fn bound_ldm(profile: &MarginProfile, delta: f64) -> Result<BoundBreakdown> {
    validate(profile, delta)?;
    let cosines = profile.dataspace_cosines();
    if let Some(i) = cosines.iter().position(|&c| c == 0.0) {
        return Err(Error::degenerate(i, "zero cosine: k(·) = 2/|cos| undefined"));
    }
    let n = profile.len();
    let nf = n as f64;
    let exp_terms: Vec<f64> = cosines.iter().map(|c| 2.0 * (-c).exp()).collect();
    let worst = cosines
        .iter()
        .map(|c| (1.0 / c.abs()).sqrt())
        .fold(0.0_f64, f64::max);
    Ok(BoundBreakdown::assemble(
        BoundKind::Ldm,
        Terms {
            empirical: 0.0,
            flip: pairwise_mean(&exp_terms),
            complexity: 4.0 / PI.sqrt() / nf.sqrt() * worst,
            slack: vec![
                ("confidence", confidence_slack(n, delta)),
                ("min_margin", 3.0 * (std::f64::consts::LN_2 / nf).sqrt() * worst),
            ],
        },
        1.0 - delta,
        Constants::default(),
        BoundParams {
            k: None,
            n,
            delta,
            gamma: None,
            srm: true,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn constant(c: f64, n: usize) -> MarginProfile {
        MarginProfile::from_cosines(vec![c; n]).unwrap()
    }

    #[test]
    fn dataspace_all_aligned() {
        let b = bound_dataspace(&constant(1.0, 100), 4, 0.05, false).unwrap();
        assert_eq!(b.flip_term, 0.0);
        assert_abs_diff_eq!(b.complexity_term, 0.319_154, epsilon = 1e-6);
        assert_abs_diff_eq!(b.slack("confidence").unwrap(), 0.407_430, epsilon = 1e-6);
        assert_abs_diff_eq!(b.total, 0.72659, epsilon = 1e-4);
        assert_eq!(b.confidence, 0.95);
    }

    #[test]
    fn dataspace_orthogonal_is_trivial_flip() {
        for k in [1, 7, 300] {
            let b = bound_dataspace(&constant(0.0, 20), k, 0.05, false).unwrap();
            assert_eq!(b.flip_term, 1.0);
        }
    }

    #[test]
    fn srm_adds_its_term() {
        let p = constant(0.3, 50);
        let plain = bound_dataspace(&p, 9, 0.05, false).unwrap();
        let srm = bound_dataspace(&p, 9, 0.05, true).unwrap();
        let expected = 3.0 * (0.5 * std::f64::consts::LN_2).sqrt() * (9.0f64 / 50.0).sqrt();
        assert_abs_diff_eq!(srm.total - plain.total, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(3.0 * (0.5 * std::f64::consts::LN_2).sqrt(), 1.766_115, epsilon = 1e-6);
    }

    #[test]
    fn pointwise_reduces_to_srm_dataspace() {
        let p = MarginProfile::from_cosines(vec![0.1, -0.4, 0.7, 0.25]).unwrap();
        let a = bound_dataspace_pointwise_k(&p, &[6; 4], 0.1).unwrap();
        let b = bound_dataspace(&p, 6, 0.1, true).unwrap();
        assert_eq!(a.total, b.total);
        let single = bound_dataspace_pointwise_k(&MarginProfile::from_cosines(vec![0.5]).unwrap(), &[3], 0.1).unwrap();
        assert_eq!(single.params.k, Some(3));
        assert!(bound_dataspace_pointwise_k(&p, &[1, 0, 2, 2], 0.1).is_err());
        assert!(bound_dataspace_pointwise_k(&p, &[1, 2], 0.1).is_err());
    }

    #[test]
    fn ldm_all_aligned() {
        let b = bound_ldm(&constant(1.0, 100), 0.05).unwrap();
        assert_abs_diff_eq!(b.flip_term, 2.0 / std::f64::consts::E, epsilon = 1e-15);
        assert_abs_diff_eq!(b.complexity_term, 0.225_676, epsilon = 1e-6);
        assert_abs_diff_eq!(b.slack("min_margin").unwrap(), 0.249_766, epsilon = 1e-6);
        assert_abs_diff_eq!(b.total, 1.618_632, epsilon = 1e-6);
    }

    #[test]
    fn ldm_rejects_zero_margin_with_index() {
        let p = MarginProfile::from_cosines(vec![0.5, 0.0, 0.2]).unwrap();
        match bound_ldm(&p, 0.05) {
            Err(Error::DegenerateInput { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}
