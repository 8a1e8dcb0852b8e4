//! Flipping probability of a dot product under Gaussian random projection.
//!
//! For `h, x ∈ R^d` at angle θ and a `k × d` matrix `R` with i.i.d. Gaussian
//! entries, `f_k(θ) = Pr{(Rh)ᵀRx ≤ 0}` depends on `k` and θ only. It equals
//! the regularized incomplete beta `I_{(1-cos θ)/2}(k/2, k/2)`, which is what
//! [`flip_exact`] evaluates.

pub mod special;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use special::{ln_gamma, regularized_incomplete_beta};

/// Cosines within this distance outside `[-1, 1]` are treated as rounding.
pub const COSINE_CLAMP_TOL: f64 = 1e-12;

/// Angle between two vectors, stored by its cosine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Angle {
    cosine: f64,
}

impl Angle {
    pub fn from_cosine(cosine: f64) -> Result<Self> {
        if !cosine.is_finite() || cosine.abs() > 1.0 + COSINE_CLAMP_TOL {
            return Err(Error::invalid(format!("cosine {cosine} outside [-1, 1]")));
        }
        Ok(Angle {
            cosine: cosine.clamp(-1.0, 1.0),
        })
    }

    pub fn from_theta(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(-COSINE_CLAMP_TOL..=PI + COSINE_CLAMP_TOL).contains(&theta) {
            return Err(Error::invalid(format!("angle {theta} outside [0, π]")));
        }
        Ok(Angle {
            cosine: theta.clamp(0.0, PI).cos(),
        })
    }

    pub fn cosine(&self) -> f64 {
        self.cosine
    }

    pub fn theta(&self) -> f64 {
        self.cosine.acos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipMethod {
    Exact,
    ChernoffGaussian,
    ChernoffSubgaussian,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryFamily {
    Gaussian,
    Subgaussian,
}

/// A flipping-probability value together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipEval {
    pub k: usize,
    pub cosine: f64,
    pub value: f64,
    pub method: FlipMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_stderr: Option<f64>,
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("projection dimension k must be at least 1"));
    }
    Ok(())
}

/// `f_k(θ)` from a raw cosine. Panics in debug builds on `k == 0`; callers
/// validate `k` once and then use this in their inner loops.
pub fn flip_prob(k: usize, cosine: f64) -> f64 {
    debug_assert!(k >= 1);
    let c = cosine.clamp(-1.0, 1.0);
    if c >= 1.0 {
        return 0.0;
    }
    if c <= -1.0 {
        return 1.0;
    }
    let a = 0.5 * k as f64;
    regularized_incomplete_beta(a, a, 0.5 * (1.0 - c))
}

pub fn flip_exact(k: usize, angle: Angle) -> Result<f64> {
    check_k(k)?;
    Ok(flip_prob(k, angle.cosine()))
}

pub fn flip_exact_eval(k: usize, angle: Angle) -> Result<FlipEval> {
    Ok(FlipEval {
        k,
        cosine: angle.cosine(),
        value: flip_exact(k, angle)?,
        method: FlipMethod::Exact,
        mc_stderr: None,
    })
}

/// Chernoff upper bound on the probability that the sign of `hᵀx` changes:
/// `exp(-k cos²θ / 2)` for Gaussian entries, `exp(-k cos²θ / 8)` for any
/// zero-mean subgaussian entry distribution.
pub fn flip_chernoff(k: usize, angle: Angle, family: EntryFamily) -> Result<f64> {
    check_k(k)?;
    let c = angle.cosine();
    if c == 0.0 {
        return Err(Error::invalid(
            "Chernoff flip bound needs a non-zero cosine (hᵀx ≠ 0)",
        ));
    }
    let denom = match family {
        EntryFamily::Gaussian => 2.0,
        EntryFamily::Subgaussian => 8.0,
    };
    Ok((-(k as f64) * c * c / denom).exp().min(1.0))
}

pub fn flip_chernoff_eval(k: usize, angle: Angle, family: EntryFamily) -> Result<FlipEval> {
    Ok(FlipEval {
        k,
        cosine: angle.cosine(),
        value: flip_chernoff(k, angle, family)?,
        method: match family {
            EntryFamily::Gaussian => FlipMethod::ChernoffGaussian,
            EntryFamily::Subgaussian => FlipMethod::ChernoffSubgaussian,
        },
        mc_stderr: None,
    })
}

/// Induced margin loss `min(1, 2 f_k(θ))` of a point with normalized margin
/// `cosine`. Equal to 1 whenever `cosine ≤ 0`.
pub fn loss(k: usize, cosine: f64) -> f64 {
    if cosine <= 0.0 {
        return 1.0;
    }
    (2.0 * flip_prob(k, cosine)).min(1.0)
}

/// `ln(Γ(k) / (2^{k-1} Γ(k/2)²))`, the log of `|d f_k / d cos θ|` at `cos θ = 0`.
fn ln_flip_slope_at_zero(k: usize) -> f64 {
    let kf = k as f64;
    ln_gamma(kf) - 2.0 * ln_gamma(0.5 * kf) - (kf - 1.0) * std::f64::consts::LN_2
}

/// `d f_k / d a` at `a = cos θ`:
/// `-Γ(k)/(2^{k-1}Γ(k/2)²) · (1-a²)^{(k-2)/2}`.
///
/// This is the derivative of the uncapped training objective. It is finite
/// on `(-1, 1)` for every `k ≥ 1`, and on `[-1, 1]` for `k ≥ 2`.
pub fn flip_derivative(k: usize, a: f64) -> f64 {
    debug_assert!(k >= 1);
    let exponent = 0.5 * (k as f64 - 2.0);
    let a = a.clamp(-1.0, 1.0);
    let ln_shape = if exponent == 0.0 {
        0.0
    } else {
        exponent * (-a * a).ln_1p()
    };
    -(ln_flip_slope_at_zero(k) + ln_shape).exp()
}

/// Derivative of [`loss`] with respect to the cosine.
///
/// Zero on the flat region `a < 0`; at the kink `a = 0` the right-hand value
/// is returned.
pub fn loss_derivative(k: usize, a: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::Unsupported(
            "loss derivative needs k ≥ 2 (unbounded near |a| = 1 for k = 1)".into(),
        ));
    }
    if !a.is_finite() || a.abs() > 1.0 + COSINE_CLAMP_TOL {
        return Err(Error::invalid(format!("cosine {a} outside [-1, 1]")));
    }
    if a < 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * flip_derivative(k, a))
}

/// Lipschitz constant of the induced loss in the cosine:
/// `2 Γ((k+1)/2) / (√π Γ(k/2))`, which never exceeds `√(2k/π)`.
pub fn lipschitz_constant(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Unsupported("Lipschitz constant needs k ≥ 2".into()));
    }
    let kf = k as f64;
    Ok(2.0 * (ln_gamma(0.5 * (kf + 1.0)) - ln_gamma(0.5 * kf)).exp() / PI.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn at(theta: f64) -> Angle {
        Angle::from_theta(theta).unwrap()
    }

    #[test]
    fn worked_examples() {
        assert_abs_diff_eq!(flip_exact(7, at(PI / 2.0)).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(flip_exact(1, at(PI / 3.0)).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(flip_exact(2, at(PI / 3.0)).unwrap(), 0.25, epsilon = 1e-12);
        assert_eq!(flip_exact(10, at(0.0)).unwrap(), 0.0);
        let a = flip_exact(5, at(2.0 * PI / 3.0)).unwrap();
        let b = flip_exact(5, at(PI / 3.0)).unwrap();
        assert_abs_diff_eq!(a, 1.0 - b, epsilon = 1e-12);
    }

    #[test]
    fn zero_k_rejected() {
        assert!(matches!(
            flip_exact(0, at(1.0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn endpoints_are_exact() {
        for k in [1, 2, 9, 400] {
            assert_eq!(flip_exact(k, Angle::from_cosine(1.0).unwrap()).unwrap(), 0.0);
            assert_eq!(flip_exact(k, Angle::from_cosine(-1.0).unwrap()).unwrap(), 1.0);
        }
    }

    #[test]
    fn angle_clamps_rounding_but_rejects_garbage() {
        assert_eq!(Angle::from_cosine(1.0 + 1e-13).unwrap().cosine(), 1.0);
        assert!(Angle::from_cosine(1.01).is_err());
        assert!(Angle::from_cosine(f64::NAN).is_err());
        assert!(Angle::from_theta(4.0).is_err());
    }

    #[test]
    fn chernoff_examples() {
        let c = Angle::from_cosine(0.5).unwrap();
        assert_abs_diff_eq!(
            flip_chernoff(10, c, EntryFamily::Gaussian).unwrap(),
            (-1.25f64).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            flip_chernoff(10, c, EntryFamily::Gaussian).unwrap(),
            0.286505,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            flip_chernoff(10, c, EntryFamily::Subgaussian).unwrap(),
            0.731616,
            epsilon = 1e-6
        );
        let one = Angle::from_cosine(1.0).unwrap();
        assert_abs_diff_eq!(
            flip_chernoff(6, one, EntryFamily::Gaussian).unwrap(),
            (-3.0f64).exp(),
            epsilon = 1e-15
        );
        assert!(flip_chernoff(6, Angle::from_cosine(0.0).unwrap(), EntryFamily::Gaussian).is_err());
    }

    #[test]
    fn loss_examples() {
        assert_eq!(loss(4, 0.0), 1.0);
        assert_abs_diff_eq!(loss(2, 0.4), 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(loss(1, (PI / 4.0).cos()), 0.5, epsilon = 1e-12);
        assert_eq!(loss(3, -0.2), 1.0);
    }

    #[test]
    fn loss_derivative_examples() {
        assert_abs_diff_eq!(loss_derivative(2, 0.3).unwrap(), -1.0, epsilon = 1e-12);
        assert_eq!(loss_derivative(2, -0.3).unwrap(), 0.0);
        assert!(matches!(loss_derivative(1, 0.3), Err(Error::Unsupported(_))));
        // kink: right-hand value
        assert_abs_diff_eq!(
            loss_derivative(6, 0.0).unwrap(),
            -lipschitz_constant(6).unwrap(),
            epsilon = 1e-12
        );

        let h = 1e-5;
        let fd = (loss(6, 0.5 + h) - loss(6, 0.5 - h)) / (2.0 * h);
        let an = loss_derivative(6, 0.5).unwrap();
        assert!(((fd - an) / an).abs() <= 1e-5, "fd {fd} an {an}");
    }

    #[test]
    fn derivative_survives_large_k() {
        let d = flip_derivative(2000, 0.01);
        assert!(d.is_finite() && d < 0.0);
        assert_abs_diff_eq!(flip_derivative(2, 1.0), -0.5, epsilon = 1e-14);
    }

    #[test]
    fn lipschitz_examples() {
        assert_abs_diff_eq!(lipschitz_constant(2).unwrap(), 1.0, epsilon = 1e-13);
        assert!(lipschitz_constant(2).unwrap() <= (4.0 / PI).sqrt());
        let mut prev = 0.0;
        for k in 2..=50 {
            let l = lipschitz_constant(k).unwrap();
            assert!(l <= (2.0 * k as f64 / PI).sqrt());
            assert!(l > prev);
            prev = l;
        }
        assert!(lipschitz_constant(50).unwrap() <= (100.0 / PI).sqrt());
    }
}
