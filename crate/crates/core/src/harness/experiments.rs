//! Experiment runners. Every runner evaluates its cells (grid point × seed)
//! in parallel and emits rows in the canonical parameter order.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::data::gen_two_gaussians;
use super::persist::ExperimentReport;
use super::stats::spearman;
use crate::bounds::{bound_compressive_exact, bound_compressive_split, bound_dataspace, margin_profile, Constants, MarginProfile};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::optimizer::{
    select_k, stratified_folds, train_bound_minimizer, train_erm_lowdim, train_lq_logistic, ErmMode, LinearModel,
    LqConfig, TrainConfig, DEFAULT_K_GRID, EXACT_MAX_K, EXACT_MAX_N,
};
use crate::par;
use crate::projection::{project_with, sample_matrix, EntryDistribution, ProjectionSpec};
use crate::rng;

fn collect<T>(cells: Vec<Result<T>>) -> Result<Vec<T>> {
    cells.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffParams {
    pub n: usize,
    pub cos_variance: f64,
    pub delta: f64,
    pub k_grid: Vec<usize>,
    pub seed: u64,
}

impl Default for TradeoffParams {
    fn default() -> Self {
        TradeoffParams {
            n: 5000,
            cos_variance: 1.0 / 9.0,
            delta: 0.05,
            k_grid: (1..=200).collect(),
            seed: 0,
        }
    }
}

/// `n` cosines from `N(0, variance)`; draws outside `[-1, 1]` are replaced
/// by uniform draws on `[-1, 1]`.
pub fn tradeoff_cosines(n: usize, variance: f64, seed: u64) -> Result<Vec<f64>> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::invalid(format!("cosine variance must be positive, got {variance}")));
    }
    let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| Error::invalid(e.to_string()))?;
    let mut g = rng::stream(seed, 0);
    Ok((0..n)
        .map(|_| {
            let c: f64 = normal.sample(&mut g);
            if (-1.0..=1.0).contains(&c) {
                c
            } else {
                g.random_range(-1.0..=1.0)
            }
        })
        .collect())
}

/// Dataspace bound on synthetic cosines across `k`: rows
/// `(k, flip_term, complexity_plus_slack, total)`.
pub fn experiment_tradeoff(p: &TradeoffParams) -> Result<ExperimentReport> {
    if p.n == 0 || p.k_grid.is_empty() {
        return Err(Error::invalid("tradeoff needs n ≥ 1 and a non-empty k grid"));
    }
    let mut grid = p.k_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let profile = MarginProfile::from_cosines(tradeoff_cosines(p.n, p.cos_variance, p.seed)?)?;
    let cells = par::map(grid.len(), |i| bound_dataspace(&profile, grid[i], p.delta, false));
    let cells = collect(cells)?;
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .zip(&cells)
        .map(|(&k, b)| vec![k as f64, b.flip_term, b.complexity_plus_slack(), b.total])
        .collect();
    let best = rows
        .iter()
        .min_by(|a, b| a[3].total_cmp(&b[3]))
        .expect("non-empty grid");
    let mut summary = BTreeMap::new();
    summary.insert("argmin_k".into(), best[0]);
    summary.insert("min_total".into(), best[3]);
    let mut params = BTreeMap::new();
    params.insert("n".into(), p.n.to_string());
    params.insert("cos_variance".into(), p.cos_variance.to_string());
    params.insert("delta".into(), p.delta.to_string());
    params.insert("k_min".into(), grid[0].to_string());
    params.insert("k_max".into(), grid[grid.len() - 1].to_string());
    Ok(ExperimentReport {
        name: "tradeoff".into(),
        params,
        columns: ["k", "flip_term", "complexity_plus_slack", "total"].map(String::from).to_vec(),
        rows,
        summary,
        seed: p.seed,
    })
}

/// Training set and holdout of the two-Gaussian problem for one repetition.
fn two_gaussian_split(n_per_class: usize, holdout: usize, d: usize, c: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let train = gen_two_gaussians(n_per_class, d, c, rng::derive_seed(seed, 1))?;
    let hold = gen_two_gaussians(holdout.div_ceil(2), d, c, rng::derive_seed(seed, 2))?;
    Ok((train, hold))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSelectParams {
    pub q_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    pub seeds: Vec<u64>,
    pub k: usize,
    pub delta: f64,
    pub n_per_class: usize,
    pub d: usize,
    pub center_scale: f64,
    /// Size of the separate holdout sample.
    pub holdout: usize,
    pub iters: usize,
}

impl Default for ModelSelectParams {
    fn default() -> Self {
        ModelSelectParams {
            q_grid: vec![0.5, 1.0, 2.0],
            lambda_grid: vec![0.001, 0.003, 0.01, 0.02, 0.03],
            seeds: (0..5).collect(),
            k: 10,
            delta: 0.05,
            n_per_class: 140,
            d: 20,
            center_scale: 0.5,
            holdout: 120,
            iters: 2000,
        }
    }
}

/// Dataspace bound of `L_q`-regularised logistic fits against their holdout
/// error. Rows `(q, lambda, seed, train_error, holdout_error, flip_term,
/// bound)`; the summary carries the rank correlation between bound and
/// holdout error over the `(q, λ)` grid.
pub fn experiment_modelselect(p: &ModelSelectParams) -> Result<ExperimentReport> {
    if p.q_grid.is_empty() || p.lambda_grid.is_empty() || p.seeds.is_empty() {
        return Err(Error::invalid("modelselect needs non-empty q, lambda and seed lists"));
    }
    let mut cells = Vec::new();
    for &q in &p.q_grid {
        for &lambda in &p.lambda_grid {
            for &seed in &p.seeds {
                cells.push((q, lambda, seed));
            }
        }
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    let results = par::map(cells.len(), |i| -> Result<Option<Vec<f64>>> {
        let (q, lambda, seed) = cells[i];
        let (train, hold) = two_gaussian_split(p.n_per_class, p.holdout, p.d, p.center_scale, seed)?;
        let cfg = LqConfig {
            q,
            lambda,
            iters: p.iters,
            seed: rng::derive_seed(seed, 3),
            ..LqConfig::default()
        };
        let model = match train_lq_logistic(&train, &cfg) {
            Ok(m) => m,
            // no direction to bound; the cell is dropped and counted
            Err(Error::ZeroModel(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let b = bound_dataspace(&margin_profile(&train, &model)?, p.k, p.delta, false)?;
        Ok(Some(vec![
            q,
            lambda,
            seed as f64,
            model.error_rate(&train)?,
            model.error_rate(&hold)?,
            b.flip_term,
            b.total,
        ]))
    });
    let all = collect(results)?;
    let dropped = all.iter().filter(|r| r.is_none()).count();
    let rows: Vec<Vec<f64>> = all.into_iter().flatten().collect();

    // cell means over seeds, in grid order
    let mut mean_bound = Vec::new();
    let mut mean_hold = Vec::new();
    for chunk in rows.chunk_by(|a, b| a[0] == b[0] && a[1] == b[1]) {
        mean_bound.push(chunk.iter().map(|r| r[6]).sum::<f64>() / chunk.len() as f64);
        mean_hold.push(chunk.iter().map(|r| r[4]).sum::<f64>() / chunk.len() as f64);
    }
    let mut per_seed = Vec::new();
    for &s in &p.seeds {
        let of_seed = || rows.iter().filter(|r| r[2] == s as f64);
        let b: Vec<f64> = of_seed().map(|r| r[6]).collect();
        let h: Vec<f64> = of_seed().map(|r| r[4]).collect();
        if let Some(r) = spearman(&b, &h) {
            per_seed.push(r);
        }
    }
    let mut summary = BTreeMap::new();
    summary.insert("spearman".into(), spearman(&mean_bound, &mean_hold).unwrap_or(f64::NAN));
    summary.insert(
        "spearman_per_seed_mean".into(),
        if per_seed.is_empty() {
            f64::NAN
        } else {
            per_seed.iter().sum::<f64>() / per_seed.len() as f64
        },
    );
    summary.insert("max_bound".into(), rows.iter().map(|r| r[6]).fold(f64::NEG_INFINITY, f64::max));
    summary.insert("cells".into(), rows.len() as f64);
    summary.insert("zero_weight_fits".into(), dropped as f64);

    let mut params = BTreeMap::new();
    params.insert("q_grid".into(), join(&p.q_grid));
    params.insert("lambda_grid".into(), join(&p.lambda_grid));
    params.insert("k".into(), p.k.to_string());
    params.insert("delta".into(), p.delta.to_string());
    params.insert("n_per_class".into(), p.n_per_class.to_string());
    params.insert("d".into(), p.d.to_string());
    params.insert("holdout".into(), p.holdout.to_string());
    Ok(ExperimentReport {
        name: "modelselect".into(),
        params,
        columns: ["q", "lambda", "seed", "train_error", "holdout_error", "flip_term", "bound"]
            .map(String::from)
            .to_vec(),
        rows,
        summary,
        seed: p.seeds[0],
    })
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressiveParams {
    pub k_grid: Vec<usize>,
    pub family: EntryDistribution,
    pub delta: f64,
    pub seeds: Vec<u64>,
    pub constants: Constants,
    /// Used when a cell exceeds the exact-search caps.
    pub surrogate: TrainConfig,
}

impl Default for CompressiveParams {
    fn default() -> Self {
        CompressiveParams {
            k_grid: vec![1, 2, 3],
            family: EntryDistribution::default(),
            delta: 0.05,
            seeds: (0..5).collect(),
            constants: Constants::default(),
            surrogate: TrainConfig::default(),
        }
    }
}

/// Compressive ERM end to end. Each seed splits the data into stratified
/// halves; the reference dataspace classifier is the centroid difference
/// through the centroid midpoint of the training half. Rows
/// `(k, seed, train_error, holdout_error, measured_flip, flip_term,
/// split_bound, exact_bound)`.
pub fn experiment_compressive(dataset: &Dataset, p: &CompressiveParams) -> Result<ExperimentReport> {
    if p.k_grid.is_empty() || p.seeds.is_empty() {
        return Err(Error::invalid("compressive needs non-empty k grid and seeds"));
    }
    p.constants.validate()?;
    let mut grid = p.k_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let mut seeds = p.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let cells: Vec<(usize, u64)> = grid.iter().flat_map(|&k| seeds.iter().map(move |&s| (k, s))).collect();

    let results = par::map(cells.len(), |i| -> Result<Vec<f64>> {
        let (k, seed) = cells[i];
        let halves = stratified_folds(dataset.labels(), 2, rng::derive_seed(seed, 10))?;
        let train = dataset.subset(&halves[0]);
        let hold = dataset.subset(&halves[1]);
        let (pos, neg) = train.centroids()?;
        let h = linalg::sub(&pos, &neg);
        let z0: Vec<f64> = pos.iter().zip(&neg).map(|(a, b)| 0.5 * (a + b)).collect();
        let reference = LinearModel::new(h.clone(), k)?.with_shift(z0.clone())?;
        let profile = margin_profile(&train, &reference)?;

        let spec = ProjectionSpec {
            k,
            d: dataset.d(),
            distribution: p.family,
            seed: rng::derive_seed(seed, 1000 + k as u64),
        };
        let r = sample_matrix(&spec)?;
        let train_p = project_with(&train, &r)?;
        let hold_p = project_with(&hold, &r)?;
        let mode = if k <= EXACT_MAX_K && train_p.n() <= EXACT_MAX_N {
            ErmMode::Exact
        } else {
            ErmMode::Surrogate {
                config: TrainConfig {
                    seed: rng::derive_seed(seed, 20),
                    ..p.surrogate
                },
            }
        };
        let erm = train_erm_lowdim(&train_p, mode)?;

        let rh = r.matvec(&h)?;
        let rz = r.matvec(&z0)?;
        let mut flips = 0usize;
        for i in 0..train.n() {
            if profile.cosines[i] > 0.0 {
                let u = linalg::sub(train_p.point(i), &rz);
                if train.label(i) * linalg::dot(&rh, &u) <= 0.0 {
                    flips += 1;
                }
            }
        }
        let split = bound_compressive_split(&profile, k, p.delta, p.constants)?;
        let exact = bound_compressive_exact(&profile, k, p.delta, p.constants)?;
        Ok(vec![
            k as f64,
            seed as f64,
            erm.error_rate(&train_p)?,
            erm.error_rate(&hold_p)?,
            flips as f64 / train.n() as f64,
            split.flip_term,
            split.total,
            exact.total,
        ])
    });
    let rows = collect(results)?;
    let covered = |j: usize| rows.iter().filter(|r| r[j] >= r[3]).count() as f64 / rows.len() as f64;
    let mut summary = BTreeMap::new();
    summary.insert("coverage_split".into(), covered(6));
    summary.insert("coverage_exact".into(), covered(7));
    summary.insert("cells".into(), rows.len() as f64);
    let mut params = BTreeMap::new();
    params.insert("k_grid".into(), grid.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    params.insert("delta".into(), p.delta.to_string());
    params.insert("family".into(), serde_json::to_string(&p.family)?);
    params.insert("source".into(), dataset.source.clone());
    Ok(ExperimentReport {
        name: "compressive".into(),
        params,
        columns: [
            "k",
            "seed",
            "train_error",
            "holdout_error",
            "measured_flip",
            "flip_term",
            "split_bound",
            "exact_bound",
        ]
        .map(String::from)
        .to_vec(),
        rows,
        summary,
        seed: seeds[0],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoGaussParams {
    /// One repetition per seed on generated data, or the seeds of the random
    /// half/half splits when `data` is given.
    pub seeds: Vec<u64>,
    pub n_per_class: usize,
    pub d: usize,
    pub center_scale: f64,
    pub holdout: usize,
    pub train: TrainConfig,
    /// Choose `k` by 5-fold cross-validation on the training part.
    pub select_k: bool,
    pub k_grid: Vec<usize>,
    pub logistic_iters: usize,
    pub data: Option<Dataset>,
}

impl Default for TwoGaussParams {
    fn default() -> Self {
        TwoGaussParams {
            seeds: (0..5).collect(),
            n_per_class: 140,
            d: 20,
            center_scale: 0.5,
            holdout: 1000,
            train: TrainConfig::default(),
            select_k: true,
            k_grid: DEFAULT_K_GRID.to_vec(),
            logistic_iters: 2000,
            data: None,
        }
    }
}

/// Holdout error of the bound minimizer against unregularised logistic
/// regression. Rows `(seed, k, minimizer_error, logistic_error)`.
pub fn experiment_twogauss(p: &TwoGaussParams) -> Result<ExperimentReport> {
    if p.seeds.is_empty() {
        return Err(Error::invalid("twogauss needs at least one seed"));
    }
    let mut seeds = p.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let results = par::map(seeds.len(), |i| -> Result<Vec<f64>> {
        let seed = seeds[i];
        let (train, hold) = match &p.data {
            Some(ds) => {
                let halves = stratified_folds(ds.labels(), 2, rng::derive_seed(seed, 30))?;
                (ds.subset(&halves[0]), ds.subset(&halves[1]))
            }
            None => two_gaussian_split(p.n_per_class, p.holdout, p.d, p.center_scale, seed)?,
        };
        let base = TrainConfig {
            seed: rng::derive_seed(seed, 4),
            ..p.train
        };
        let k = if p.select_k {
            select_k(&train, &p.k_grid, 5, &base)?.k
        } else {
            base.k
        };
        let minimizer = train_bound_minimizer(&train, &TrainConfig { k, ..base })?;
        let logistic = train_lq_logistic(
            &train,
            &LqConfig {
                q: 2.0,
                lambda: 0.0,
                iters: p.logistic_iters,
                seed: rng::derive_seed(seed, 5),
                ..LqConfig::default()
            },
        )?;
        Ok(vec![seed as f64, k as f64, minimizer.error_rate(&hold)?, logistic.error_rate(&hold)?])
    });
    let rows = collect(results)?;
    let n = rows.len() as f64;
    let m_err = rows.iter().map(|r| r[2]).sum::<f64>() / n;
    let l_err = rows.iter().map(|r| r[3]).sum::<f64>() / n;
    let mut summary = BTreeMap::new();
    summary.insert("mean_minimizer_error".into(), m_err);
    summary.insert("mean_logistic_error".into(), l_err);
    summary.insert("difference".into(), m_err - l_err);
    let mut params = BTreeMap::new();
    params.insert("select_k".into(), p.select_k.to_string());
    params.insert(
        "source".into(),
        p.data.as_ref().map_or_else(|| "two_gaussians".to_string(), |d| d.source.clone()),
    );
    params.insert("holdout".into(), p.holdout.to_string());
    Ok(ExperimentReport {
        name: "twogauss".into(),
        params,
        columns: ["seed", "k", "minimizer_error", "logistic_error"].map(String::from).to_vec(),
        rows,
        summary,
        seed: seeds[0],
    })
}
