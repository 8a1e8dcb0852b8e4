mod common;

use flipbound::linalg::{self, Matrix};
use flipbound::optimizer::{
    gradients, objective, refine_bound_minimizer, train_bound_minimizer, train_bound_minimizer_traced,
    train_erm_lowdim, train_lq_logistic, ErmMode, LqConfig, TrainConfig,
};
use flipbound::{rng, Dataset};
use rand::Rng;
use rand_distr::StandardNormal;

fn random_problem(seed: u64, n: usize, d: usize) -> (Dataset, Vec<f64>, Vec<f64>) {
    let mut g = rng::stream(seed, 0);
    let (x, y) = common::random_instance(&mut g, n, d);
    let h: Vec<f64> = (0..d).map(|_| g.sample(StandardNormal)).collect();
    let z: Vec<f64> = (0..d).map(|_| 0.3 * g.sample::<f64, _>(StandardNormal)).collect();
    (Dataset::new(x, y, "random").unwrap(), h, z)
}

fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], step: f64) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[j] += step;
            m[j] -= step;
            (f(&p) - f(&m)) / (2.0 * step)
        })
        .collect()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff = linalg::norm(&linalg::sub(a, b));
    diff / linalg::norm(b).max(1e-12)
}

#[test]
fn gradients_match_finite_differences_on_100_instances() {
    let mut count = 0;
    for (i, &d) in [3usize, 10].iter().enumerate() {
        for &k in &[2usize, 5, 20] {
            for rep in 0..17 {
                if count == 100 {
                    break;
                }
                let (ds, h, z) = random_problem(1000 * i as u64 + 100 * k as u64 + rep, 7, d);
                let (gh, gz) = gradients(&ds, &h, &z, k).unwrap();
                let fh = central_difference(|v| objective(&ds, v, &z, k).unwrap(), &h, 1e-6);
                let fz = central_difference(|v| objective(&ds, &h, v, k).unwrap(), &z, 1e-6);
                assert!(rel_err(&gh, &fh) <= 1e-5, "grad_h d={d} k={k} rep={rep}: {}", rel_err(&gh, &fh));
                assert!(rel_err(&gz, &fz) <= 1e-5, "grad_z d={d} k={k} rep={rep}: {}", rel_err(&gz, &fz));
                assert!(linalg::dot(&gh, &h).abs() <= 1e-10 * linalg::norm(&h).max(1.0));
                count += 1;
            }
        }
    }
    assert_eq!(count, 100);
}

#[test]
fn d5_n7_example() {
    let (ds, h, z) = random_problem(55, 7, 5);
    let (gh, gz) = gradients(&ds, &h, &z, 5).unwrap();
    let fh = central_difference(|v| objective(&ds, v, &z, 5).unwrap(), &h, 1e-6);
    let fz = central_difference(|v| objective(&ds, &h, v, 5).unwrap(), &z, 1e-6);
    assert!(rel_err(&gh, &fh) <= 1e-5);
    assert!(rel_err(&gz, &fz) <= 1e-5);
}

fn toy() -> Dataset {
    let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
    Dataset::new(x, vec![1, -1], "toy").unwrap()
}

#[test]
fn toy_minimizer_agrees_with_direction_grid() {
    let ds = toy();
    let model = train_bound_minimizer(&ds, &TrainConfig::default()).unwrap();
    // brute force over 3600 directions with z at the origin
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..3600 {
        let t = i as f64 * std::f64::consts::TAU / 3600.0;
        let v = objective(&ds, &[t.cos(), t.sin()], &[0.0, 0.0], 5).unwrap();
        if v < best.0 {
            best = (v, t);
        }
    }
    assert!(best.1.cos() > 0.9999);
    let c = linalg::cosine(&model.h, &[1.0, 0.0]).unwrap();
    assert!(c >= 0.99);
    assert!(model.meta.objective.unwrap() <= 1e-3);
}

#[test]
fn training_is_deterministic_and_refinement_does_not_worsen() {
    let (ds, _, _) = random_problem(8, 60, 4);
    let cfg = TrainConfig { k: 5, seed: 3, restarts: 3, ..Default::default() };
    let a = train_bound_minimizer(&ds, &cfg).unwrap();
    let b = train_bound_minimizer(&ds, &cfg).unwrap();
    assert_eq!(a, b);
    let r = refine_bound_minimizer(&ds, &a, &cfg).unwrap();
    assert!(r.meta.objective.unwrap() <= a.meta.objective.unwrap());
}

#[test]
fn accepted_steps_never_increase_and_shift_stays_in_ball() {
    for seed in 0..5 {
        let (ds, _, _) = random_problem(200 + seed, 40, 3);
        let cfg = TrainConfig { k: 8, seed, r_shift: Some(0.2), ..Default::default() };
        let out = train_bound_minimizer_traced(&ds, &cfg).unwrap();
        for run in &out.runs {
            assert!(run.history.windows(2).all(|w| w[1] <= w[0]), "seed {seed}");
            assert!(run.shift_offset <= 0.2 + 1e-12);
        }
        let z = out.model.z.as_ref().unwrap();
        assert!(linalg::distance(z, &out.z0) <= 0.2 + 1e-12);
        // the objective is scale-invariant, so compare angles only
        let best = &out.runs[out.best_run];
        assert!(out.runs.iter().all(|r| r.objective >= best.objective));
    }
}

#[test]
fn exact_erm_matches_sweep_oracle() {
    for inst in 0..20u64 {
        let mut g = rng::stream(inst, 7);
        let n = 20 + (inst as usize % 4) * 10;
        let (x, y) = common::random_instance(&mut g, n, 2);
        let ds = Dataset::new(x.clone(), y.clone(), "erm").unwrap();
        let model = train_erm_lowdim(&ds, ErmMode::Exact).unwrap();
        let exact = (model.error_rate(&ds).unwrap() * n as f64).round() as usize;
        let sweep = common::sweep_oracle(&x, &y, 100_000, inst);
        assert!(exact <= sweep, "instance {inst}: exact {exact} > sweep {sweep}");
        let surrogate = train_erm_lowdim(
            &ds,
            ErmMode::Surrogate { config: TrainConfig { k: 5, seed: inst, ..Default::default() } },
        )
        .unwrap();
        assert!(surrogate.error_rate(&ds).unwrap() >= model.error_rate(&ds).unwrap());
    }
}

#[test]
fn exact_erm_in_three_dimensions() {
    let mut g = rng::stream(5, 7);
    let (x, y) = common::random_instance(&mut g, 30, 3);
    let ds = Dataset::new(x.clone(), y.clone(), "erm3").unwrap();
    let model = train_erm_lowdim(&ds, ErmMode::Exact).unwrap();
    let exact = (model.error_rate(&ds).unwrap() * 30.0).round() as usize;
    assert!(exact <= common::sweep_oracle(&x, &y, 20_000, 5));
}

fn gaussians() -> Dataset {
    flipbound::harness::gen_two_gaussians(100, 10, 1.5, 2).unwrap()
}

#[test]
fn logistic_without_penalty_separates_well_separated_gaussians() {
    let ds = gaussians();
    let m = train_lq_logistic(&ds, &LqConfig { q: 2.0, lambda: 0.0, iters: 3000, ..Default::default() }).unwrap();
    assert_eq!(m.error_rate(&ds).unwrap(), 0.0);
}

#[test]
fn l1_penalty_shrinks_the_weights() {
    let ds = flipbound::harness::gen_two_gaussians(140, 20, 0.5, 1).unwrap();
    let l1 = |lambda: f64| {
        let m = train_lq_logistic(&ds, &LqConfig { q: 1.0, lambda, ..Default::default() }).unwrap();
        m.h.iter().map(|v| v.abs()).sum::<f64>()
    };
    assert!(l1(0.05) < l1(0.0));
}

#[test]
fn small_q_gives_sparser_fits() {
    let ds = flipbound::harness::gen_two_gaussians(140, 20, 0.5, 1).unwrap();
    let zeros = |q: f64| {
        let m = train_lq_logistic(&ds, &LqConfig { q, lambda: 0.02, ..Default::default() }).unwrap();
        m.h.iter().filter(|v| v.abs() < 1e-3).count()
    };
    assert!(zeros(0.5) > zeros(2.0), "q=0.5: {}, q=2: {}", zeros(0.5), zeros(2.0));
}
