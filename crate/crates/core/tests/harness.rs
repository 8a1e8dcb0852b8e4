use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use flipbound::bounds::{bound_dataspace, MarginProfile};
use flipbound::harness::{
    experiment_compressive, experiment_tradeoff, gen_two_gaussians, load_csv, load_model, load_report_rows, save_csv,
    save_model, save_report, tradeoff_cosines, CompressiveParams, ExperimentReport, TradeoffParams,
};
use flipbound::optimizer::{train_bound_minimizer, TrainConfig};

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds = gen_two_gaussians(15, 4, 0.5, 3).unwrap();
    let path = dir.path().join("d.csv");
    save_csv(&ds, &path).unwrap();
    let back = load_csv(&path, "label", "1").unwrap();
    assert_eq!(back.n(), ds.n());
    assert_eq!(back.labels(), ds.labels());
    assert_eq!(back.x(), ds.x());
}

#[test]
fn model_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds = gen_two_gaussians(20, 3, 0.8, 1).unwrap();
    let m = train_bound_minimizer(&ds, &TrainConfig { restarts: 1, ..TrainConfig::default() }).unwrap();
    let path = dir.path().join("m.json");
    save_model(&m, &path).unwrap();
    assert_eq!(load_model(&path).unwrap(), m);
}

#[test]
fn report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let r = ExperimentReport {
        name: "x".into(),
        params: BTreeMap::new(),
        columns: vec!["a".into(), "b".into()],
        rows: vec![vec![0.1, 1.0 / 3.0], vec![-2.5e-17, 7.0]],
        summary: BTreeMap::new(),
        seed: 0,
    };
    let path = dir.path().join("r.csv");
    save_report(&r, &path).unwrap();
    let (cols, rows) = load_report_rows(&path).unwrap();
    assert_eq!(cols, r.columns);
    assert_eq!(rows, r.rows);
}

#[test]
fn tradeoff_rows_match_direct_evaluation() {
    let p = TradeoffParams::default();
    let r = experiment_tradeoff(&p).unwrap();
    assert_eq!(r.rows.len(), 200);
    let profile = MarginProfile::from_cosines(tradeoff_cosines(p.n, p.cos_variance, p.seed).unwrap()).unwrap();
    for row in r.rows.iter().step_by(20) {
        let b = bound_dataspace(&profile, row[0] as usize, p.delta, false).unwrap();
        assert_abs_diff_eq!(row[3], b.total, epsilon = 1e-12);
        assert_abs_diff_eq!(row[1], b.flip_term, epsilon = 1e-12);
    }
}

#[test]
fn tradeoff_is_seed_deterministic() {
    let p = TradeoffParams { k_grid: (1..=30).collect(), ..TradeoffParams::default() };
    assert_eq!(experiment_tradeoff(&p).unwrap().rows, experiment_tradeoff(&p).unwrap().rows);
}

#[test]
fn compressive_exact_bound_covers_holdout_mostly() {
    let ds = gen_two_gaussians(40, 10, 0.7, 6).unwrap();
    let p = CompressiveParams { seeds: vec![0, 1], ..CompressiveParams::default() };
    let r = experiment_compressive(&ds, &p).unwrap();
    assert_eq!(r.rows.len(), 6);
    for row in &r.rows {
        // split and exact bounds are valid probabilities-plus-slack, never below the empirical error
        assert!(row[6] >= row[2] && row[7].is_finite());
    }
    assert!(r.summary["coverage_exact"] >= 0.5);
}
