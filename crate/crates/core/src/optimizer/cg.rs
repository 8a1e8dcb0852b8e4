//! Polak–Ribière conjugate gradient with backtracking Armijo line search and
//! an optional projection onto a convex feasible set.

use crate::error::Result;
use crate::linalg::{axpy, dot, norm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    pub max_iters: usize,
    /// Stop once the projected-gradient norm falls to this value.
    pub grad_tol: f64,
    pub armijo_c1: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            max_iters: 300,
            grad_tol: 1e-7,
            armijo_c1: 1e-4,
            shrink: 0.5,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after the start point and after every accepted step.
    pub history: Vec<f64>,
}

/// Minimizes `f` over the set `project` maps onto. `f` returns the value and
/// gradient; an `Err` at a trial point rejects that step. Accepted steps
/// never increase the objective.
pub fn minimize_projected<F, P>(x0: &[f64], f: F, project: P, opts: &CgOptions) -> Result<CgOutcome>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
    P: Fn(&mut [f64]),
{
    let mut x = x0.to_vec();
    project(&mut x);
    let (mut fx, mut g) = f(&x)?;
    let mut history = vec![fx];
    let mut dir: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut step = 1.0 / norm(&g).max(1e-12);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        if projected_gradient_norm(&x, &g, &project) <= opts.grad_tol {
            converged = true;
            break;
        }
        if dot(&g, &dir) >= 0.0 {
            dir = g.iter().map(|v| -v).collect();
        }
        let accepted = line_search(&x, fx, &g, &dir, step, &f, &project, opts).or_else(|| {
            let steepest: Vec<f64> = g.iter().map(|v| -v).collect();
            let start = 1.0 / norm(&g).max(1e-12);
            line_search(&x, fx, &g, &steepest, start, &f, &project, opts).map(|r| {
                dir = steepest;
                r
            })
        });
        let Some((x_new, f_new, g_new, alpha)) = accepted else {
            break;
        };
        iterations += 1;

        let gg = dot(&g, &g);
        let beta = if gg > 0.0 {
            (dot(&g_new, &g_new) - dot(&g_new, &g)) / gg
        } else {
            0.0
        };
        let beta = beta.max(0.0);
        for (d, gn) in dir.iter_mut().zip(&g_new) {
            *d = -gn + beta * *d;
        }
        let progress = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        history.push(fx);
        step = (alpha * 2.0).min(1e6);
        if progress == 0.0 && beta == 0.0 {
            // the line search only found a null step
            break;
        }
    }
    Ok(CgOutcome {
        x,
        value: fx,
        iterations,
        converged,
        history,
    })
}

fn projected_gradient_norm<P: Fn(&mut [f64])>(x: &[f64], g: &[f64], project: &P) -> f64 {
    let mut y = x.to_vec();
    axpy(&mut y, -1.0, g);
    project(&mut y);
    y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

#[allow(clippy::too_many_arguments)]
fn line_search<F, P>(
    x: &[f64],
    fx: f64,
    g: &[f64],
    dir: &[f64],
    initial: f64,
    f: &F,
    project: &P,
    opts: &CgOptions,
) -> Option<(Vec<f64>, f64, Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
    P: Fn(&mut [f64]),
{
    let mut alpha = initial;
    for _ in 0..opts.max_backtracks {
        let mut trial = x.to_vec();
        axpy(&mut trial, alpha, dir);
        project(&mut trial);
        let moved: Vec<f64> = trial.iter().zip(x).map(|(a, b)| a - b).collect();
        let predicted = dot(g, &moved);
        if predicted < 0.0 {
            if let Ok((ft, gt)) = f(&trial) {
                if ft.is_finite() && ft <= fx + opts.armijo_c1 * predicted && ft <= fx {
                    return Some((trial, ft, gt, alpha));
                }
            }
        }
        alpha *= opts.shrink;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
            Ok((v, g))
        };
        let opts = CgOptions {
            max_iters: 5000,
            grad_tol: 1e-8,
            ..Default::default()
        };
        let out = minimize_projected(&[-1.2, 1.0], f, |_| {}, &opts).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-5 && (out.x[1] - 1.0).abs() < 1e-5, "{out:?}");
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn projection_onto_box_is_respected() {
        // minimize (x-3)² subject to x ≤ 1
        let f = |x: &[f64]| Ok(((x[0] - 3.0).powi(2), vec![2.0 * (x[0] - 3.0)]));
        let project = |x: &mut [f64]| x[0] = x[0].min(1.0);
        let out = minimize_projected(&[0.0], f, project, &CgOptions::default()).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-9);
        assert!(out.converged);
    }
}
