//! Logistic regression with an `L_q` penalty `λ Σ_j |w_j|^q`, `q ∈ (0, 2]`.
//!
//! `q > 1` uses plain gradient descent. `q = 1` uses proximal gradient
//! (soft thresholding). `q < 1` smooths the penalty to `(|w_j| + ε)^q` and
//! majorizes it at each step by a weighted `L1` term, so every step is again
//! a soft threshold with coordinate-wise levels.

use rand_distr::{Distribution, Normal};

use super::model::{LinearModel, ModelMeta};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqConfig {
    pub q: f64,
    pub lambda: f64,
    pub iters: usize,
    pub seed: u64,
    /// Smoothing constant for `q < 1`.
    pub eps: f64,
}

impl Default for LqConfig {
    fn default() -> Self {
        LqConfig {
            q: 1.0,
            lambda: 0.0,
            iters: 2000,
            seed: 0,
            eps: 1e-3,
        }
    }
}

impl LqConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q <= 2.0) {
            return Err(Error::invalid(format!("q must lie in (0, 2], got {}", self.q)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::invalid(format!("lambda must be finite and ≥ 0, got {}", self.lambda)));
        }
        if self.iters == 0 {
            return Err(Error::invalid("iters must be at least 1"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::invalid("eps must be positive"));
        }
        Ok(())
    }
}

const WARM_START_STEPS: usize = 200;

fn loss_gradient(data: &Dataset, w: &[f64]) -> Vec<f64> {
    let n = data.n() as f64;
    let mut g = vec![0.0; w.len()];
    for i in 0..data.n() {
        let x = data.point(i);
        let y = data.label(i);
        let m = y * linalg::dot(w, x);
        // d/dm log(1 + e^{−m}) = −σ(−m)
        let s = if m >= 0.0 {
            let e = (-m).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + m.exp())
        };
        linalg::axpy(&mut g, -y * s / n, x);
    }
    g
}

fn soft(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Fits `w` (no intercept) by minimizing the mean logistic loss plus the
/// penalty. Deterministic given `config.seed`.
pub fn train_lq_logistic(data: &Dataset, config: &LqConfig) -> Result<LinearModel> {
    config.validate()?;
    let d = data.d();
    let mean_sq = (0..data.n()).map(|i| linalg::dot(data.point(i), data.point(i))).sum::<f64>() / data.n() as f64;
    let ridge = if config.q == 2.0 { 2.0 * config.lambda } else { 0.0 };
    let step = 1.0 / (0.25 * mean_sq + ridge).max(1e-12);

    let normal = Normal::new(0.0, 0.01).expect("valid normal");
    let mut g = rng::stream(config.seed, 0);
    let mut w: Vec<f64> = (0..d).map(|_| normal.sample(&mut g)).collect();

    let q = config.q;
    let lambda = config.lambda;
    if q < 1.0 {
        for _ in 0..WARM_START_STEPS {
            let grad = loss_gradient(data, &w);
            linalg::axpy(&mut w, -step, &grad);
        }
    }
    for _ in 0..config.iters {
        let grad = loss_gradient(data, &w);
        if q > 1.0 {
            for (wj, gj) in w.iter_mut().zip(&grad) {
                let pen = lambda * q * wj.abs().powf(q - 1.0) * wj.signum();
                *wj -= step * (gj + pen);
            }
        } else {
            for (wj, gj) in w.iter_mut().zip(&grad) {
                let level = if q == 1.0 {
                    lambda
                } else {
                    lambda * q * (wj.abs() + config.eps).powf(q - 1.0)
                };
                *wj = soft(*wj - step * gj, step * level);
            }
        }
    }
    if w.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroModel(format!(
            "penalty λ = {lambda} with q = {q} drives every weight to zero"
        )));
    }
    let mut model = LinearModel::new(w, 1)?;
    model.meta = ModelMeta {
        seed: config.seed,
        objective: None,
        iterations: config.iters,
    };
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn separable() -> Dataset {
        let x = Matrix::from_rows(&[
            vec![1.0, 0.5],
            vec![2.0, -0.3],
            vec![1.5, 1.0],
            vec![-1.0, 0.2],
            vec![-2.0, -0.5],
            vec![-1.2, 0.8],
        ])
        .unwrap();
        Dataset::new(x, vec![1, 1, 1, -1, -1, -1], "sep").unwrap()
    }

    #[test]
    fn unpenalized_fit_separates() {
        let m = train_lq_logistic(&separable(), &LqConfig::default()).unwrap();
        assert_eq!(m.error_rate(&separable()).unwrap(), 0.0);
    }

    #[test]
    fn bad_q_rejected() {
        let cfg = LqConfig { q: 2.5, ..Default::default() };
        assert!(train_lq_logistic(&separable(), &cfg).is_err());
    }

    #[test]
    fn deterministic() {
        let cfg = LqConfig { q: 0.5, lambda: 0.01, iters: 300, seed: 4, ..Default::default() };
        let a = train_lq_logistic(&separable(), &cfg).unwrap();
        let b = train_lq_logistic(&separable(), &cfg).unwrap();
        assert_eq!(a, b);
    }
}
