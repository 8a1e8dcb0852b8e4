use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub seed: u64,
    pub objective: Option<f64>,
    pub iterations: usize,
}

/// Linear classifier `x ↦ sign(h·(x − z) + b)`; `z` defaults to 0, `b` to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub h: Vec<f64>,
    pub z: Option<Vec<f64>>,
    pub b: Option<f64>,
    /// Loss parameter (or projection dimension) the model was trained with.
    pub k: usize,
    pub meta: ModelMeta,
}

impl LinearModel {
    pub fn new(h: Vec<f64>, k: usize) -> Result<Self> {
        let m = LinearModel {
            h,
            z: None,
            b: None,
            k,
            meta: ModelMeta::default(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_shift(mut self, z: Vec<f64>) -> Result<Self> {
        self.z = Some(z);
        self.validate()?;
        Ok(self)
    }

    pub fn with_intercept(mut self, b: f64) -> Self {
        self.b = Some(b);
        self
    }

    pub fn d(&self) -> usize {
        self.h.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.h.is_empty() || linalg::norm(&self.h) == 0.0 || self.h.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("model weight vector h must be finite and non-zero"));
        }
        if let Some(z) = &self.z {
            if z.len() != self.h.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.h.len(),
                    found: z.len(),
                });
            }
        }
        if self.k == 0 {
            return Err(Error::invalid("model k must be at least 1"));
        }
        Ok(())
    }

    /// `x − z` (or `x` when no shift is set).
    pub fn shifted(&self, x: &[f64]) -> Vec<f64> {
        match &self.z {
            Some(z) => linalg::sub(x, z),
            None => x.to_vec(),
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        let s = match &self.z {
            Some(z) => self.h.iter().zip(x).zip(z).map(|((h, x), z)| h * (x - z)).sum(),
            None => linalg::dot(&self.h, x),
        };
        s + self.b.unwrap_or(0.0)
    }

    /// `+1` for a strictly positive score, `-1` otherwise.
    pub fn predict(&self, x: &[f64]) -> i8 {
        if self.score(x) > 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn error_rate(&self, data: &Dataset) -> Result<f64> {
        if data.d() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: data.d(),
            });
        }
        let wrong = (0..data.n())
            .filter(|&i| self.predict(data.point(i)) != data.labels()[i])
            .count();
        Ok(wrong as f64 / data.n() as f64)
    }
}
