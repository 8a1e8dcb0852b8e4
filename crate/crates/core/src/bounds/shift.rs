use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;

/// Upper estimate `(r/√N)·Σ_n 1/(‖x_n − z₀‖ − r)` of
/// `sup_{z ∈ B(z₀, r)} (r/√N) Σ_n 1/‖x_n − z‖`, the low-density condition
/// under which a shift learned inside `B(z₀, r)` costs `ε` extra complexity.
pub fn shift_condition(dataset: &Dataset, z0: &[f64], r: f64) -> Result<f64> {
    if z0.len() != dataset.d() {
        return Err(Error::DimensionMismatch {
            expected: dataset.d(),
            found: z0.len(),
        });
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("shift radius must be positive, got {r}")));
    }
    let mut sum = 0.0;
    for i in 0..dataset.n() {
        let dist = linalg::distance(dataset.point(i), z0);
        if dist <= r {
            return Err(Error::Unbounded(format!(
                "point {i} lies within the shift ball (distance {dist} ≤ r = {r})"
            )));
        }
        sum += 1.0 / (dist - r);
    }
    Ok(r / (dataset.n() as f64).sqrt() * sum)
}
