//! Zero-one empirical risk minimization for affine classifiers on
//! low-dimensional (projected) data.

use super::model::LinearModel;
use super::trainer::{train_bound_minimizer, TrainConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::par;

/// Largest dimension the exact search accepts.
pub const EXACT_MAX_K: usize = 3;
/// Largest sample size the exact search accepts.
pub const EXACT_MAX_N: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErmMode {
    /// Enumerates every hyperplane through `dim` points.
    Exact,
    /// Bound minimizer at `config.k`, followed by the best intercept.
    Surrogate { config: TrainConfig },
}

/// Best intercept `b` for the rule `sign(s + b)` (positive iff `s + b > 0`).
/// Returns `(b, errors)`; among equally good thresholds the smallest is kept.
pub fn best_threshold(scores: &[f64], labels: &[i8]) -> (f64, usize) {
    assert_eq!(scores.len(), labels.len());
    if scores.is_empty() {
        return (0.0, 0);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // threshold t below every score: everything predicted positive
    let mut errors = labels.iter().filter(|&&l| l != 1).count();
    let mut best = (scores[order[0]] - 1.0, errors);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            // moving t past s turns this point negative
            if labels[order[i]] == 1 {
                errors += 1;
            } else {
                errors -= 1;
            }
            i += 1;
        }
        let t = if i < order.len() {
            0.5 * (s + scores[order[i]])
        } else {
            s + 1.0
        };
        if errors < best.1 {
            best = (t, errors);
        }
    }
    (-best.0, best.1)
}

pub fn train_erm_lowdim(data: &Dataset, mode: ErmMode) -> Result<LinearModel> {
    match mode {
        ErmMode::Exact => exact(data),
        ErmMode::Surrogate { config } => {
            let model = train_bound_minimizer(data, &config)?;
            let scores: Vec<f64> = (0..data.n()).map(|i| model.score(data.point(i))).collect();
            let (b, errors) = best_threshold(&scores, data.labels());
            let mut model = model.with_intercept(b);
            model.meta.objective = Some(errors as f64 / data.n() as f64);
            Ok(model)
        }
    }
}

fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for j in c..n {
                m[r][j] -= f * m[c][j];
            }
        }
    }
    det
}

/// Null vector of the `k × (k+1)` matrix with rows `[x_i, 1]`, by cofactors.
fn hyperplane_through(rows: &[Vec<f64>]) -> Vec<f64> {
    let cols = rows.len() + 1;
    (0..cols)
        .map(|skip| {
            let minor: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| (0..cols).filter(|&j| j != skip).map(|j| r[j]).collect())
                .collect();
            let sign = if skip % 2 == 0 { 1.0 } else { -1.0 };
            sign * determinant(minor)
        })
        .collect()
}

struct Candidate {
    errors: usize,
    /// `(w, b)` stacked.
    v: Vec<f64>,
    subset: Vec<usize>,
}

fn augmented(data: &Dataset) -> Vec<Vec<f64>> {
    (0..data.n())
        .map(|i| {
            let mut r = data.point(i).to_vec();
            r.push(1.0);
            r
        })
        .collect()
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Best candidate among subsets whose smallest member is `first`.
fn search_from(rows: &[Vec<f64>], labels: &[i8], dim: usize, first: usize) -> Option<Candidate> {
    let n = rows.len();
    if first + dim > n {
        return None;
    }
    let scale = rows
        .iter()
        .map(|r| linalg::norm(&r[..dim]))
        .fold(1.0_f64, f64::max);
    let mut best: Option<Candidate> = None;
    let mut rest: Vec<usize> = (first + 1..first + dim).collect();
    loop {
        let mut subset = vec![first];
        subset.extend_from_slice(&rest);
        let sub_rows: Vec<Vec<f64>> = subset.iter().map(|&i| rows[i].clone()).collect();
        let v = hyperplane_through(&sub_rows);
        let w_norm = linalg::norm(&v[..dim]);
        if w_norm > 0.0 {
            let tol = 1e-10 * (w_norm * scale + v[dim].abs());
            // errors for +v and −v; points on the plane outside the subset count
            // against both orientations
            let (mut plus, mut minus) = (0usize, 0usize);
            for (j, r) in rows.iter().enumerate() {
                let s = linalg::dot(&v, r);
                if s.abs() <= tol {
                    if !subset.contains(&j) {
                        plus += 1;
                        minus += 1;
                    }
                } else if (s > 0.0) != (labels[j] == 1) {
                    plus += 1;
                } else {
                    minus += 1;
                }
            }
            let (errors, v) = if plus <= minus {
                (plus, v)
            } else {
                (minus, v.iter().map(|x| -x).collect())
            };
            if best.as_ref().is_none_or(|b| errors < b.errors) {
                best = Some(Candidate { errors, v, subset });
            }
        }
        if dim == 1 || !next_combination(&mut rest, n) {
            break;
        }
        if rest[0] <= first {
            break;
        }
    }
    best
}

/// Moves the hyperplane off its defining points so that each lands on its
/// correct side without flipping any other point.
fn perturb(rows: &[Vec<f64>], labels: &[i8], cand: &Candidate) -> Vec<f64> {
    let v = &cand.v;
    let a: Vec<&Vec<f64>> = cand.subset.iter().map(|&i| &rows[i]).collect();
    let t: Vec<f64> = cand.subset.iter().map(|&i| f64::from(labels[i])).collect();
    let gram: Vec<Vec<f64>> = a
        .iter()
        .map(|ri| a.iter().map(|rj| linalg::dot(ri, rj)).collect())
        .collect();
    let Some(coef) = linalg::solve(gram, t) else {
        return v.clone();
    };
    let mut delta = vec![0.0; v.len()];
    for (c, r) in coef.iter().zip(&a) {
        linalg::axpy(&mut delta, *c, r);
    }
    let mut eps = f64::INFINITY;
    for (j, r) in rows.iter().enumerate() {
        if cand.subset.contains(&j) {
            continue;
        }
        let s = linalg::dot(v, r).abs();
        let ds = linalg::dot(&delta, r).abs();
        if s > 0.0 && ds > 0.0 {
            eps = eps.min(0.5 * s / ds);
        }
    }
    if !eps.is_finite() {
        eps = 1.0;
    }
    let mut out = v.clone();
    linalg::axpy(&mut out, eps, &delta);
    out
}

fn exact(data: &Dataset) -> Result<LinearModel> {
    let (n, dim) = (data.n(), data.d());
    if dim > EXACT_MAX_K || n > EXACT_MAX_N {
        return Err(Error::Unsupported(format!(
            "exact ERM is limited to dimension ≤ {EXACT_MAX_K} and N ≤ {EXACT_MAX_N} (got dimension {dim}, N = {n}); use surrogate mode"
        )));
    }
    let rows = augmented(data);
    let labels = data.labels();

    let pos = data.count_label(1);
    let neg = n - pos;
    let reach = rows.iter().map(|r| r[0].abs()).fold(0.0, f64::max) + 1.0;
    let mut w = vec![0.0; dim];
    w[0] = 1.0;
    let mut best_model = {
        let b = if pos >= neg { reach } else { -reach };
        LinearModel::new(w, dim)?.with_intercept(b)
    };
    let mut best_err = pos.min(neg);

    let found = par::map(n, |i| search_from(&rows, labels, dim, i));
    for cand in found.into_iter().flatten() {
        if cand.errors >= best_err {
            continue;
        }
        let v = perturb(&rows, labels, &cand);
        let Ok(model) = LinearModel::new(v[..dim].to_vec(), dim) else {
            continue;
        };
        let model = model.with_intercept(v[dim]);
        let err = (0..n)
            .filter(|&j| model.predict(data.point(j)) != labels[j])
            .count();
        if err < best_err {
            best_err = err;
            best_model = model;
        }
    }
    best_model.meta.objective = Some(best_err as f64 / n as f64);
    Ok(best_model)
}
