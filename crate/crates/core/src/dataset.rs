use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `N` labelled points in `R^d`, labels in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    x: Matrix,
    y: Vec<i8>,
    pub feature_names: Option<Vec<String>>,
    pub source: String,
}

impl Dataset {
    pub fn new(x: Matrix, y: Vec<i8>, source: impl Into<String>) -> Result<Self> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::Data("dataset needs N ≥ 1 and d ≥ 1".into()));
        }
        if y.len() != x.rows() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                found: y.len(),
            });
        }
        if let Some(i) = y.iter().position(|&l| l != 1 && l != -1) {
            return Err(Error::Data(format!("label {} at row {i} not in {{-1,+1}}", y[i])));
        }
        if let Some(i) = (0..x.rows()).find(|&i| x.row(i).iter().any(|v| !v.is_finite())) {
            return Err(Error::Data(format!("non-finite feature value in row {i}")));
        }
        Ok(Dataset {
            x,
            y,
            feature_names: None,
            source: source.into(),
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: names.len(),
            });
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.x.row(i)
    }

    pub fn labels(&self) -> &[i8] {
        &self.y
    }

    pub fn label(&self, i: usize) -> f64 {
        f64::from(self.y[i])
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            feature_names: self.feature_names.clone(),
            source: self.source.clone(),
        }
    }

    pub fn count_label(&self, label: i8) -> usize {
        self.y.iter().filter(|&&l| l == label).count()
    }

    /// Mean of the points carrying `label`; `None` if the class is empty.
    pub fn class_centroid(&self, label: i8) -> Option<Vec<f64>> {
        let mut acc = vec![0.0; self.d()];
        let mut count = 0usize;
        for (i, &l) in self.y.iter().enumerate() {
            if l == label {
                crate::linalg::axpy(&mut acc, 1.0, self.point(i));
                count += 1;
            }
        }
        (count > 0).then(|| acc.iter().map(|v| v / count as f64).collect())
    }

    /// Both class centroids, or a data error naming the missing class.
    pub fn centroids(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let pos = self
            .class_centroid(1)
            .ok_or_else(|| Error::Data("no points with label +1".into()))?;
        let neg = self
            .class_centroid(-1)
            .ok_or_else(|| Error::Data("no points with label -1".into()))?;
        Ok((pos, neg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_labels_and_values() {
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(Dataset::new(x.clone(), vec![1, 0], "t").is_err());
        assert!(Dataset::new(x.clone(), vec![1], "t").is_err());
        let bad = Matrix::from_rows(&[vec![f64::NAN], vec![2.0]]).unwrap();
        assert!(Dataset::new(bad, vec![1, -1], "t").is_err());
        let ds = Dataset::new(x, vec![1, -1], "t").unwrap();
        assert_eq!(ds.centroids().unwrap(), (vec![1.0], vec![2.0]));
    }
}
