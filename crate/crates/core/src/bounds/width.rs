use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::par::{pairwise_sum, Exec};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthEstimate {
    pub width: f64,
    pub stderr: f64,
    pub samples: u64,
}

const SAMPLES_PER_BLOCK: u64 = 256;

/// Monte-Carlo estimate of the Gaussian width `E_g[max_{x∈T} g·x]` of the
/// finite set given by the rows of `points`.
pub fn gaussian_width_mc(points: &Matrix, samples: u64, seed: u64) -> Result<WidthEstimate> {
    gaussian_width_mc_with(Exec::default(), points, samples, seed)
}

pub fn gaussian_width_mc_with(exec: Exec, points: &Matrix, samples: u64, seed: u64) -> Result<WidthEstimate> {
    if points.rows() == 0 || points.cols() == 0 {
        return Err(Error::invalid("Gaussian width needs a non-empty point set"));
    }
    if samples < 2 {
        return Err(Error::invalid("Gaussian width needs at least 2 samples"));
    }
    let d = points.cols();
    let blocks = samples.div_ceil(SAMPLES_PER_BLOCK);
    let per_block = exec.map(blocks as usize, |b| {
        let b = b as u64;
        let n = SAMPLES_PER_BLOCK.min(samples - b * SAMPLES_PER_BLOCK);
        let mut rng = rng::stream(seed, b);
        let mut g = vec![0.0; d];
        (0..n)
            .map(|_| {
                for gi in g.iter_mut() {
                    *gi = rng.sample(StandardNormal);
                }
                points
                    .iter_rows()
                    .map(|x| crate::linalg::dot(&g, x))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect::<Vec<f64>>()
    });
    let sups: Vec<f64> = per_block.into_iter().flatten().collect();
    let n = sups.len() as f64;
    let mean = pairwise_sum(&sups) / n;
    let sq: Vec<f64> = sups.iter().map(|s| (s - mean) * (s - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    Ok(WidthEstimate {
        width: mean,
        stderr: (var / n).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_has_zero_width() {
        let p = Matrix::from_rows(&[vec![0.6, 0.8]]).unwrap();
        let w = gaussian_width_mc(&p, 20_000, 1).unwrap();
        assert!(w.width.abs() <= 4.0 * w.stderr, "{w:?}");
    }

    #[test]
    fn antipodal_pair_is_half_normal_mean() {
        let p = Matrix::from_rows(&[vec![-1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let w = gaussian_width_mc(&p, 40_000, 2).unwrap();
        let expected = (2.0 / std::f64::consts::PI).sqrt();
        assert!((w.width - expected).abs() <= 4.0 * w.stderr, "{w:?}");
    }

    #[test]
    fn empty_set_rejected() {
        assert!(gaussian_width_mc(&Matrix::zeros(0, 3), 10, 0).is_err());
    }

    #[test]
    fn deterministic_across_strategies() {
        let p = Matrix::from_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, -1.0, 3.0]]).unwrap();
        let a = gaussian_width_mc_with(Exec::Sequential, &p, 1000, 5).unwrap();
        let b = gaussian_width_mc_with(Exec::Parallel, &p, 1000, 5).unwrap();
        assert_eq!(a, b);
    }
}
