use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::flipkernel::COSINE_CLAMP_TOL;
use crate::linalg;
use crate::optimizer::LinearModel;

/// Normalized margins `cos θ_n = h·(x_n − z)y_n / (‖h‖‖x_n − z‖)` of a model
/// against a dataset.
///
/// When the model carries an intercept `b`, `augmented` holds the cosines of
/// `(h, b)` against `((x_n − z), 1)·y_n`; the dataspace bounds use those,
/// while the compressive bounds keep the unaugmented `cosines` for their flip
/// terms and use `scores` for the empirical error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginProfile {
    pub cosines: Vec<f64>,
    pub augmented: Option<Vec<f64>>,
    /// `y_n (h·(x_n − z) + b)`.
    pub scores: Vec<f64>,
    /// Points with `‖x_n − z‖ = 0`; their cosine is reported as 0.
    pub flagged: Vec<usize>,
}

impl MarginProfile {
    /// A profile given directly by its cosines (no intercept).
    pub fn from_cosines(cosines: Vec<f64>) -> Result<Self> {
        if cosines.is_empty() {
            return Err(Error::invalid("margin profile needs at least one point"));
        }
        let mut out = Vec::with_capacity(cosines.len());
        for (i, &c) in cosines.iter().enumerate() {
            if !c.is_finite() || c.abs() > 1.0 + COSINE_CLAMP_TOL {
                return Err(Error::degenerate(i, format!("cosine {c} outside [-1, 1]")));
            }
            out.push(c.clamp(-1.0, 1.0));
        }
        Ok(MarginProfile {
            scores: out.clone(),
            cosines: out,
            augmented: None,
            flagged: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.cosines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosines.is_empty()
    }

    /// Cosines the dataspace bounds are evaluated on.
    pub fn dataspace_cosines(&self) -> &[f64] {
        self.augmented.as_deref().unwrap_or(&self.cosines)
    }
}

pub fn margin_profile(dataset: &Dataset, model: &LinearModel) -> Result<MarginProfile> {
    model.validate()?;
    if model.d() != dataset.d() {
        return Err(Error::DimensionMismatch {
            expected: model.d(),
            found: dataset.d(),
        });
    }
    let h_norm = linalg::norm(&model.h);
    let b = model.b;
    let aug_h_norm = b.map(|b| (h_norm * h_norm + b * b).sqrt());
    let n = dataset.n();
    let mut cosines = Vec::with_capacity(n);
    let mut augmented = b.map(|_| Vec::with_capacity(n));
    let mut scores = Vec::with_capacity(n);
    let mut flagged = Vec::new();
    for i in 0..n {
        let y = dataset.label(i);
        let u = model.shifted(dataset.point(i));
        let u_norm = linalg::norm(&u);
        let raw = linalg::dot(&model.h, &u);
        scores.push(y * (raw + b.unwrap_or(0.0)));
        if u_norm == 0.0 {
            flagged.push(i);
            cosines.push(0.0);
        } else {
            cosines.push((y * raw / (h_norm * u_norm)).clamp(-1.0, 1.0));
        }
        if let (Some(aug), Some(b), Some(ahn)) = (augmented.as_mut(), b, aug_h_norm) {
            let au_norm = (u_norm * u_norm + 1.0).sqrt();
            aug.push((y * (raw + b) / (ahn * au_norm)).clamp(-1.0, 1.0));
        }
    }
    Ok(MarginProfile {
        cosines,
        augmented,
        scores,
        flagged,
    })
}
