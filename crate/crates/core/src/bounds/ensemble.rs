//! Bounds for convex combinations `Σ α_t b_t(x)` of `±1`-valued base learners.

use super::{
    check_delta, check_k, confidence_slack, BoundBreakdown, BoundKind, BoundParams, Constants,
    MarginProfile, Terms,
};
use crate::error::{Error, Result};
use crate::flipkernel::loss;
use crate::linalg::{self, Matrix};
use crate::par::{self, pairwise_mean};

/// Base-learner predictions `b(x_n) ∈ {−1,+1}^T`, weights `α` with
/// `‖α‖₁ ≤ 1`, and the labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    predictions: Matrix,
    alpha: Vec<f64>,
    labels: Vec<i8>,
}

impl Ensemble {
    pub fn new(predictions: Matrix, alpha: Vec<f64>, labels: Vec<i8>) -> Result<Self> {
        if predictions.rows() == 0 || predictions.cols() == 0 {
            return Err(Error::invalid("ensemble needs at least one point and one learner"));
        }
        if alpha.len() != predictions.cols() {
            return Err(Error::DimensionMismatch {
                expected: predictions.cols(),
                found: alpha.len(),
            });
        }
        if labels.len() != predictions.rows() {
            return Err(Error::DimensionMismatch {
                expected: predictions.rows(),
                found: labels.len(),
            });
        }
        if let Some(i) = predictions.as_slice().iter().position(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::degenerate(i / predictions.cols(), "base prediction not in {-1,+1}"));
        }
        if let Some(i) = labels.iter().position(|&l| l != 1 && l != -1) {
            return Err(Error::degenerate(i, "label not in {-1,+1}"));
        }
        let l1: f64 = alpha.iter().map(|a| a.abs()).sum();
        if !(l1 > 0.0) || l1 > 1.0 + 1e-12 {
            return Err(Error::invalid(format!("ensemble weights need 0 < ‖α‖₁ ≤ 1, got {l1}")));
        }
        Ok(Ensemble {
            predictions,
            alpha,
            labels,
        })
    }

    pub fn n(&self) -> usize {
        self.predictions.rows()
    }

    pub fn t(&self) -> usize {
        self.predictions.cols()
    }

    pub fn alpha_l1(&self) -> f64 {
        self.alpha.iter().map(|a| a.abs()).sum()
    }

    /// `y_n α·b(x_n)`.
    pub fn margins(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| f64::from(self.labels[i]) * linalg::dot(&self.alpha, self.predictions.row(i)))
            .collect()
    }

    /// `cos θ_n = y_n α·b(x_n) / (‖α‖₂ √T)`.
    pub fn cosines(&self) -> Vec<f64> {
        let denom = linalg::norm(&self.alpha) * (self.t() as f64).sqrt();
        self.margins().into_iter().map(|m| (m / denom).clamp(-1.0, 1.0)).collect()
    }

    pub fn profile(&self) -> MarginProfile {
        let c = self.cosines();
        MarginProfile {
            scores: self.margins(),
            cosines: c,
            augmented: None,
            flagged: Vec::new(),
        }
    }
}

fn check_vc(vc_dim: usize) -> Result<()> {
    if vc_dim == 0 {
        return Err(Error::invalid("VC dimension of the base class must be at least 1"));
    }
    Ok(())
}

/// `(1/N)Σ min(1, 2f_k(θ_n)) + c√(k·V(B)/N) + 3√(log(2/δ)/(2N))`.
pub fn bound_ensemble_margin(
    ensemble: &Ensemble,
    k: usize,
    delta: f64,
    vc_dim: usize,
    constants: Constants,
) -> Result<BoundBreakdown> {
    check_k(k)?;
    check_delta(delta)?;
    check_vc(vc_dim)?;
    constants.validate()?;
    let n = ensemble.n();
    let cosines = ensemble.cosines();
    let terms = par::map(n, |i| loss(k, cosines[i]));
    Ok(BoundBreakdown::assemble(
        BoundKind::EnsembleMargin,
        Terms {
            empirical: 0.0,
            flip: pairwise_mean(&terms),
            complexity: constants.c * ((k * vc_dim) as f64 / n as f64).sqrt(),
            slack: vec![("confidence", confidence_slack(n, delta))],
        },
        1.0 - delta,
        constants,
        BoundParams {
            k: Some(k),
            n,
            delta,
            gamma: None,
            srm: false,
        },
    ))
}

/// Exponential-loss form:
/// `(1/N)Σ 2exp(−y_n α·b(x_n)/‖α‖₁) + 3√(log(2/δ)/(2N))
///  + (c√(V/N) + 3√(log 2/(2N)))·√(2T)·max_n √(‖α‖₁/|α·b(x_n)|)`.
pub fn bound_ensemble_exploss(
    ensemble: &Ensemble,
    delta: f64,
    vc_dim: usize,
    constants: Constants,
) -> Result<BoundBreakdown> {
    check_delta(delta)?;
    check_vc(vc_dim)?;
    constants.validate()?;
    let n = ensemble.n();
    let nf = n as f64;
    let l1 = ensemble.alpha_l1();
    let margins = ensemble.margins();
    if let Some(i) = margins.iter().position(|&m| m == 0.0) {
        return Err(Error::degenerate(i, "zero ensemble score α·b(x)"));
    }
    let exp_terms: Vec<f64> = margins.iter().map(|m| 2.0 * (-m / l1).exp()).collect();
    let worst = margins
        .iter()
        .map(|m| (l1 / m.abs()).sqrt())
        .fold(0.0_f64, f64::max);
    let spread = (2.0 * ensemble.t() as f64).sqrt() * worst;
    Ok(BoundBreakdown::assemble(
        BoundKind::EnsembleExploss,
        Terms {
            empirical: 0.0,
            flip: pairwise_mean(&exp_terms),
            complexity: constants.c * (vc_dim as f64 / nf).sqrt() * spread,
            slack: vec![
                ("confidence", confidence_slack(n, delta)),
                ("srm", 3.0 * (std::f64::consts::LN_2 / (2.0 * nf)).sqrt() * spread),
            ],
        },
        1.0 - delta,
        constants,
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

    fn single(preds: &[f64], labels: &[i8]) -> Ensemble {
        let m = Matrix::from_vec(preds.len(), 1, preds.to_vec()).unwrap();
        Ensemble::new(m, vec![1.0], labels.to_vec()).unwrap()
    }

    #[test]
    fn single_learner_margin_bound_is_training_error() {
        let e = single(&[1.0, -1.0, 1.0, 1.0], &[1, 1, 1, -1]);
        assert_eq!(e.cosines(), vec![1.0, -1.0, 1.0, -1.0]);
        let b = bound_ensemble_margin(&e, 5, 0.05, 1, Constants::default()).unwrap();
        assert_abs_diff_eq!(b.flip_term, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn single_learner_all_correct_exploss() {
        let e = single(&[1.0, -1.0], &[1, -1]);
        let b = bound_ensemble_exploss(&e, 0.05, 1, Constants::default()).unwrap();
        assert_abs_diff_eq!(b.flip_term, 0.735_759, epsilon = 1e-6);
    }

    #[test]
    fn validation() {
        let m = Matrix::from_vec(1, 2, vec![1.0, -1.0]).unwrap();
        assert!(Ensemble::new(m.clone(), vec![0.7, 0.7], vec![1]).is_err());
        assert!(Ensemble::new(m.clone(), vec![0.5], vec![1]).is_err());
        let bad = Matrix::from_vec(1, 2, vec![1.0, 0.0]).unwrap();
        assert!(Ensemble::new(bad, vec![0.5, 0.5], vec![1]).is_err());
        let e = Ensemble::new(m, vec![0.5, 0.5], vec![1]).unwrap();
        assert!(bound_ensemble_margin(&e, 3, 0.05, 0, Constants::default()).is_err());
        // α·b = 0
        assert!(matches!(
            bound_ensemble_exploss(&e, 0.05, 2, Constants::default()),
            Err(Error::DegenerateInput { index: 0, .. })
        ));
    }
}
