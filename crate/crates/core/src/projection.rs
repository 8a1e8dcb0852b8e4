//! Random projection matrices and the Monte-Carlo flip-rate oracle.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::flipkernel::{FlipEval, FlipMethod};
use crate::linalg::{self, Matrix};
use crate::par::Exec;
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntryDistribution {
    Gaussian { sigma: f64 },
    /// Unscaled ±1 entries.
    Rademacher,
}

impl Default for EntryDistribution {
    fn default() -> Self {
        EntryDistribution::Gaussian { sigma: 1.0 }
    }
}

impl EntryDistribution {
    fn sample(&self, rng: &mut StreamRng) -> f64 {
        match *self {
            EntryDistribution::Gaussian { sigma } => sigma * rng.sample::<f64, _>(StandardNormal),
            EntryDistribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSpec {
    pub k: usize,
    pub d: usize,
    pub distribution: EntryDistribution,
    pub seed: u64,
}

impl ProjectionSpec {
    pub fn gaussian(k: usize, d: usize, seed: u64) -> Self {
        ProjectionSpec {
            k,
            d,
            distribution: EntryDistribution::default(),
            seed,
        }
    }

    pub fn rademacher(k: usize, d: usize, seed: u64) -> Self {
        ProjectionSpec {
            k,
            d,
            distribution: EntryDistribution::Rademacher,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.d == 0 {
            return Err(Error::invalid(format!(
                "projection needs k ≥ 1 and d ≥ 1 (got k={}, d={})",
                self.k, self.d
            )));
        }
        if let EntryDistribution::Gaussian { sigma } = self.distribution {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::invalid(format!("gaussian sigma must be positive, got {sigma}")));
            }
        }
        Ok(())
    }
}

/// Draws the `k × d` matrix for `spec`. Entries are filled row by row from
/// stream 0 of the spec's seed.
pub fn sample_matrix(spec: &ProjectionSpec) -> Result<Matrix> {
    spec.validate()?;
    let mut rng = rng::stream(spec.seed, 0);
    let data = (0..spec.k * spec.d)
        .map(|_| spec.distribution.sample(&mut rng))
        .collect();
    Matrix::from_vec(spec.k, spec.d, data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedDataset {
    pub data: Dataset,
    pub spec: ProjectionSpec,
}

pub fn project(dataset: &Dataset, spec: &ProjectionSpec) -> Result<ProjectedDataset> {
    if dataset.d() != spec.d {
        return Err(Error::DimensionMismatch {
            expected: spec.d,
            found: dataset.d(),
        });
    }
    let r = sample_matrix(spec)?;
    Ok(ProjectedDataset {
        data: project_with(dataset, &r)?,
        spec: *spec,
    })
}

/// Applies a caller-supplied matrix to every point; labels carried over.
pub fn project_with(dataset: &Dataset, r: &Matrix) -> Result<Dataset> {
    if dataset.d() != r.cols() {
        return Err(Error::DimensionMismatch {
            expected: r.cols(),
            found: dataset.d(),
        });
    }
    let mut data = Vec::with_capacity(dataset.n() * r.rows());
    for i in 0..dataset.n() {
        data.extend(r.matvec(dataset.point(i))?);
    }
    let x = Matrix::from_vec(dataset.n(), r.rows(), data)?;
    Dataset::new(x, dataset.labels().to_vec(), format!("{} (projected)", dataset.source))
}

/// Result of a Monte-Carlo flip-rate run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McRate {
    pub rate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub flips: u64,
}

impl McRate {
    fn from_counts(flips: u64, trials: u64) -> Self {
        let rate = flips as f64 / trials as f64;
        McRate {
            rate,
            stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
            trials,
            flips,
        }
    }

    pub fn to_eval(&self, k: usize, cosine: f64) -> FlipEval {
        FlipEval {
            k,
            cosine,
            value: self.rate,
            method: FlipMethod::MonteCarlo,
            mc_stderr: Some(self.stderr),
        }
    }
}

/// Trials per random stream. Block `b` covers trials `[b·TRIALS_PER_BLOCK, …)`
/// and draws from stream `b + 1` of the spec's seed (stream 0 is reserved
/// for [`sample_matrix`]).
pub const TRIALS_PER_BLOCK: u64 = 4096;

/// Fraction of independent draws of `R` with `(Rh)ᵀ(Ru) ≤ 0`. Ties count as flips.
pub fn mc_flip_rate(h: &[f64], u: &[f64], spec: &ProjectionSpec, trials: u64) -> Result<McRate> {
    mc_flip_rate_with(Exec::default(), h, u, spec, trials)
}

pub fn mc_flip_rate_with(
    exec: Exec,
    h: &[f64],
    u: &[f64],
    spec: &ProjectionSpec,
    trials: u64,
) -> Result<McRate> {
    spec.validate()?;
    for (name, v) in [("h", h), ("u", u)] {
        if v.len() != spec.d {
            return Err(Error::DimensionMismatch {
                expected: spec.d,
                found: v.len(),
            });
        }
        if linalg::norm(v) == 0.0 {
            return Err(Error::invalid(format!("{name} must be non-zero")));
        }
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let blocks = trials.div_ceil(TRIALS_PER_BLOCK);
    let counts = exec.map(blocks as usize, |b| {
        let b = b as u64;
        let n = TRIALS_PER_BLOCK.min(trials - b * TRIALS_PER_BLOCK);
        let mut rng = rng::stream(spec.seed, b + 1);
        (0..n).filter(|_| projected_dot(h, u, spec, &mut rng) <= 0.0).count() as u64
    });
    Ok(McRate::from_counts(counts.iter().sum(), trials))
}

/// `(Rh)ᵀ(Ru)` for one freshly drawn `R`, generated row by row.
fn projected_dot(h: &[f64], u: &[f64], spec: &ProjectionSpec, rng: &mut StreamRng) -> f64 {
    let mut acc = 0.0;
    for _ in 0..spec.k {
        let mut rh = 0.0;
        let mut ru = 0.0;
        for (hj, uj) in h.iter().zip(u) {
            let r = spec.distribution.sample(rng);
            rh += r * hj;
            ru += r * uj;
        }
        acc += rh * ru;
    }
    acc
}

/// A pair of unit vectors in `R^d` at the given angle, rotated away from the
/// coordinate axes so every coordinate participates.
pub fn vector_pair_at_angle(d: usize, cosine: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if d < 2 {
        return Err(Error::invalid("need d ≥ 2 to embed an angle"));
    }
    let c = cosine.clamp(-1.0, 1.0);
    let s = (1.0 - c * c).sqrt();
    // orthonormal e, f: e ∝ (1,1,…,1), f ∝ alternating pattern orthogonal to e
    let e: Vec<f64> = vec![1.0 / (d as f64).sqrt(); d];
    let mut f: Vec<f64> = (0..d).map(|j| (j as f64 + 1.0).sin()).collect();
    let proj = linalg::dot(&f, &e);
    linalg::axpy(&mut f, -proj, &e);
    let nf = linalg::norm(&f);
    let f = linalg::scale(&f, 1.0 / nf);
    let u: Vec<f64> = e.iter().zip(&f).map(|(a, b)| c * a + s * b).collect();
    Ok((e, u))
}
