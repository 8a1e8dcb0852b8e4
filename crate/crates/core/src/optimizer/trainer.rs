//! The bound-minimizing classifier: joint CG over `(h, z)` with `z` kept in a
//! small ball around the midpoint of the class centroids.

use rand_distr::{Distribution, StandardNormal};

use super::cg::{minimize_projected, CgOptions};
use super::model::{LinearModel, ModelMeta};
use super::objective::objective_and_gradients;
use crate::bounds::shift_condition;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::par;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub k: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub restarts: usize,
    /// Radius of the ball `z` is confined to. `None` means a quarter of the
    /// distance between the class centroids; `Some(0.0)` pins `z` at the
    /// midpoint.
    pub r_shift: Option<f64>,
    pub seed: u64,
    /// Scale of the Gaussian perturbation applied to `h₀` on restarts after
    /// the first, relative to `‖h₀‖`.
    pub init_noise: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            k: 5,
            max_iters: 300,
            grad_tol: 1e-7,
            restarts: 4,
            r_shift: None,
            seed: 0,
            init_noise: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::invalid(format!("training needs k ≥ 2, got {}", self.k)));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::invalid("grad_tol must be positive"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if let Some(r) = self.r_shift {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(Error::invalid(format!("r_shift must be finite and ≥ 0, got {r}")));
            }
        }
        if !(self.init_noise >= 0.0) {
            return Err(Error::invalid("init_noise must be ≥ 0"));
        }
        Ok(())
    }

    fn cg_options(&self) -> CgOptions {
        CgOptions {
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            ..CgOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub restart: usize,
    /// Final mean objective.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Mean objective at the start and after each accepted step.
    pub history: Vec<f64>,
    /// Distance of the final `z` from the ball centre.
    pub shift_offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: LinearModel,
    pub runs: Vec<RunSummary>,
    pub best_run: usize,
    pub z0: Vec<f64>,
    pub r_shift: f64,
    /// Output of `shift_condition` for the ball, when it is finite.
    pub shift_epsilon: Option<f64>,
}

struct Problem<'a> {
    data: &'a Dataset,
    k: usize,
    z0: Vec<f64>,
    r: f64,
}

impl Problem<'_> {
    fn d(&self) -> usize {
        self.data.d()
    }

    fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let d = self.d();
        let e = objective_and_gradients(self.data, &x[..d], &x[d..], self.k)?;
        let n = self.data.n() as f64;
        let mut g = e.grad_h;
        g.extend(e.grad_z);
        g.iter_mut().for_each(|v| *v /= n);
        Ok((e.value / n, g))
    }

    /// Rescales `h` to unit norm (the objective does not see its length) and
    /// projects `z` onto the ball.
    fn project(&self, x: &mut [f64]) {
        let d = self.d();
        let (h, z) = x.split_at_mut(d);
        let hn = linalg::norm(h);
        if hn > 0.0 && hn.is_finite() {
            h.iter_mut().for_each(|v| *v /= hn);
        }
        let dist = linalg::distance(z, &self.z0);
        if dist > self.r {
            for (zj, cj) in z.iter_mut().zip(&self.z0) {
                *zj = if self.r == 0.0 { *cj } else { cj + (*zj - cj) * self.r / dist };
            }
        }
    }

    fn run(&self, start: Vec<f64>, restart: usize, opts: &CgOptions) -> Result<(Vec<f64>, RunSummary)> {
        let d = self.d();
        let out = minimize_projected(&start, |x| self.eval(x), |x| self.project(x), opts)?;
        let shift_offset = linalg::distance(&out.x[d..], &self.z0);
        Ok((
            out.x,
            RunSummary {
                restart,
                objective: out.value,
                iterations: out.iterations,
                converged: out.converged,
                history: out.history,
                shift_offset,
            },
        ))
    }
}

fn setup<'a>(dataset: &'a Dataset, config: &TrainConfig) -> Result<(Problem<'a>, Vec<f64>)> {
    config.validate()?;
    if dataset.n() < 2 {
        return Err(Error::Data("training needs at least two points".into()));
    }
    let (pos, neg) = dataset.centroids()?;
    let h0 = linalg::sub(&pos, &neg);
    let gap = linalg::norm(&h0);
    if gap == 0.0 {
        return Err(Error::Data("class centroids coincide; no initial direction".into()));
    }
    let z0: Vec<f64> = pos.iter().zip(&neg).map(|(a, b)| 0.5 * (a + b)).collect();
    let r = config.r_shift.unwrap_or(0.25 * gap);
    Ok((
        Problem {
            data: dataset,
            k: config.k,
            z0,
            r,
        },
        h0,
    ))
}

fn finish(problem: &Problem, x: &[f64], summary: &RunSummary, config: &TrainConfig) -> Result<LinearModel> {
    let d = problem.d();
    let mut model = LinearModel::new(x[..d].to_vec(), config.k)?.with_shift(x[d..].to_vec())?;
    model.meta = ModelMeta {
        seed: config.seed,
        objective: Some(summary.objective),
        iterations: summary.iterations,
    };
    Ok(model)
}

/// Trains and returns the best model together with per-restart traces.
pub fn train_bound_minimizer_traced(dataset: &Dataset, config: &TrainConfig) -> Result<TrainOutcome> {
    let (problem, h0) = setup(dataset, config)?;
    let d = problem.d();
    let h0_norm = linalg::norm(&h0);
    let opts = config.cg_options();
    let results = par::map(config.restarts, |restart| {
        let mut start = h0.clone();
        if restart > 0 && config.init_noise > 0.0 {
            let mut g = rng::stream(config.seed, restart as u64);
            let s = config.init_noise * h0_norm / (d as f64).sqrt();
            for v in start.iter_mut() {
                let e: f64 = StandardNormal.sample(&mut g);
                *v += s * e;
            }
        }
        start.extend_from_slice(&problem.z0);
        problem.run(start, restart, &opts)
    });
    let mut runs: Vec<RunSummary> = Vec::with_capacity(results.len());
    let mut best: Option<(usize, Vec<f64>)> = None;
    for (i, r) in results.into_iter().enumerate() {
        let (x, summary) = r?;
        let better = match &best {
            None => true,
            Some((b, _)) => summary.objective < runs[*b].objective,
        };
        if better {
            best = Some((i, x));
        }
        runs.push(summary);
    }
    let (best_run, x) = best.expect("at least one restart");
    let model = finish(&problem, &x, &runs[best_run], config)?;
    let shift_epsilon = if problem.r > 0.0 {
        shift_condition(dataset, &problem.z0, problem.r).ok()
    } else {
        None
    };
    Ok(TrainOutcome {
        model,
        runs,
        best_run,
        z0: problem.z0,
        r_shift: problem.r,
        shift_epsilon,
    })
}

pub fn train_bound_minimizer(dataset: &Dataset, config: &TrainConfig) -> Result<LinearModel> {
    Ok(train_bound_minimizer_traced(dataset, config)?.model)
}

/// One further CG run warm-started from `model`. The result's mean objective
/// is never above the starting model's (when that lies inside the ball).
pub fn refine_bound_minimizer(dataset: &Dataset, model: &LinearModel, config: &TrainConfig) -> Result<LinearModel> {
    let (problem, _) = setup(dataset, config)?;
    if model.d() != dataset.d() {
        return Err(Error::DimensionMismatch {
            expected: dataset.d(),
            found: model.d(),
        });
    }
    let mut start = model.h.clone();
    start.extend(model.z.clone().unwrap_or_else(|| problem.z0.clone()));
    let (x, summary) = problem.run(start, 0, &config.cg_options())?;
    finish(&problem, &x, &summary, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn toy() -> Dataset {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        Dataset::new(x, vec![1, -1], "toy").unwrap()
    }

    #[test]
    fn toy_direction_is_recovered() {
        let out = train_bound_minimizer_traced(&toy(), &TrainConfig::default()).unwrap();
        let c = linalg::cosine(&out.model.h, &[1.0, 0.0]).unwrap();
        assert!(c >= 0.99, "cosine {c}");
        assert!(out.model.meta.objective.unwrap() <= 1e-3);
        for run in &out.runs {
            assert!(run.history.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let ds = Dataset::new(x, vec![1, 1], "one").unwrap();
        assert!(train_bound_minimizer(&ds, &TrainConfig::default()).is_err());
        let cfg = TrainConfig { k: 1, ..Default::default() };
        assert!(train_bound_minimizer(&toy(), &cfg).is_err());
    }
}
