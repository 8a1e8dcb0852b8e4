//! The training objective `Obj(h, z) = Σ_n f_k(arccos a_n(h, z))` with
//! `a_n = hᵀ(x_n − z)y_n / (‖h‖‖x_n − z‖)`, and its gradients.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::flipkernel::{flip_derivative, flip_prob};
use crate::linalg;
use crate::par;

/// Cosines are kept this far inside `(-1, 1)` when forming gradients.
pub const COSINE_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub grad_h: Vec<f64>,
    pub grad_z: Vec<f64>,
}

fn validate(dataset: &Dataset, h: &[f64], z: &[f64], k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid(format!("objective needs k ≥ 2, got {k}")));
    }
    for v in [h, z] {
        if v.len() != dataset.d() {
            return Err(Error::DimensionMismatch {
                expected: dataset.d(),
                found: v.len(),
            });
        }
    }
    let h_norm = linalg::norm(h);
    if h_norm == 0.0 || !h_norm.is_finite() {
        return Err(Error::invalid("h must be finite and non-zero"));
    }
    Ok(h_norm)
}

struct PointTerm {
    value: f64,
    grad_h: Vec<f64>,
    grad_z: Vec<f64>,
}

fn point_term(dataset: &Dataset, i: usize, h_hat: &[f64], h_norm: f64, z: &[f64], k: usize, with_grad: bool) -> Option<PointTerm> {
    let y = dataset.label(i);
    let w = linalg::sub(dataset.point(i), z);
    let w_norm = linalg::norm(&w);
    if w_norm == 0.0 {
        return None;
    }
    let a = (y * linalg::dot(h_hat, &w) / w_norm).clamp(-1.0, 1.0);
    let value = flip_prob(k, a);
    if !with_grad {
        return Some(PointTerm {
            value,
            grad_h: Vec::new(),
            grad_z: Vec::new(),
        });
    }
    let a_g = a.clamp(-1.0 + COSINE_GUARD, 1.0 - COSINE_GUARD);
    let slope = flip_derivative(k, a_g);
    // ∂a/∂h = (I − ĥĥᵀ) u / ‖h‖ with u = w y / ‖w‖
    // ∂a/∂z = −(I − ŵŵᵀ) ĥ y / ‖w‖ = −(y ĥ − a ŵ) / ‖w‖
    let grad_h = (0..w.len())
        .map(|j| slope * (y * w[j] / w_norm - a * h_hat[j]) / h_norm)
        .collect();
    let grad_z = (0..w.len())
        .map(|j| -slope * (y * h_hat[j] - a * w[j] / w_norm) / w_norm)
        .collect();
    Some(PointTerm { value, grad_h, grad_z })
}

fn evaluate(dataset: &Dataset, h: &[f64], z: &[f64], k: usize, with_grad: bool) -> Result<Evaluation> {
    let h_norm = validate(dataset, h, z, k)?;
    let h_hat = linalg::scale(h, 1.0 / h_norm);
    let terms = par::map(dataset.n(), |i| point_term(dataset, i, &h_hat, h_norm, z, k, with_grad));
    let d = dataset.d();
    let mut values = Vec::with_capacity(terms.len());
    let mut grad_h = vec![0.0; if with_grad { d } else { 0 }];
    let mut grad_z = grad_h.clone();
    for (i, t) in terms.into_iter().enumerate() {
        let t = t.ok_or_else(|| Error::degenerate(i, "point coincides with the shift z"))?;
        values.push(t.value);
        if with_grad {
            linalg::axpy(&mut grad_h, 1.0, &t.grad_h);
            linalg::axpy(&mut grad_z, 1.0, &t.grad_z);
        }
    }
    Ok(Evaluation {
        value: par::pairwise_sum(&values),
        grad_h,
        grad_z,
    })
}

/// `Σ_n f_k(arccos a_n(h, z))`.
pub fn objective(dataset: &Dataset, h: &[f64], z: &[f64], k: usize) -> Result<f64> {
    Ok(evaluate(dataset, h, z, k, false)?.value)
}

/// Gradients of [`objective`] with respect to `h` and `z`.
pub fn gradients(dataset: &Dataset, h: &[f64], z: &[f64], k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let e = evaluate(dataset, h, z, k, true)?;
    Ok((e.grad_h, e.grad_z))
}

pub fn objective_and_gradients(dataset: &Dataset, h: &[f64], z: &[f64], k: usize) -> Result<Evaluation> {
    evaluate(dataset, h, z, k, true)
}
