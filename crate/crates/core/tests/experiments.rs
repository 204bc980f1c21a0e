use randlp::experiments::{
    run_avg_experiment, run_consistency_experiment, run_dist_experiment, ExperimentConfig, SolverKind,
};
use randlp::report::{avg_csv, AVG_HEADER};
use randlp::Error;

#[test]
fn small_model_average_converges_to_expectation() {
    for (c1, c2) in [(5.0, 0.0), (4.0, 4.0)] {
        let cfg = ExperimentConfig::new(12, c1, c2, 20_000, 4);
        let row = &run_avg_experiment(&cfg).unwrap()[0];
        let gap = (row.avg_answer_sets - row.theory_finite_n).abs();
        assert!(gap < 4.0 * row.stderr, "c1={c1} c2={c2}: {row:?}");
    }
}

#[test]
fn counting_procedures_are_interchangeable() {
    let mut cfg = ExperimentConfig::new(16, 5.0, 2.0, 300, 12);
    let fast = run_avg_experiment(&cfg).unwrap();
    cfg.solver = SolverKind::BruteForce;
    assert_eq!(fast, run_avg_experiment(&cfg).unwrap());
}

#[test]
fn dist_totals_match_average() {
    let cfg = ExperimentConfig::new(30, 5.0, 0.0, 500, 2);
    let d = run_dist_experiment(&cfg).unwrap();
    let avg = &run_avg_experiment(&cfg).unwrap()[0];
    assert_eq!(d.rows.len(), 31);
    assert_eq!(d.rows[0].empirical_avg, 0.0);
    assert_eq!(d.rows[30].empirical_avg, 0.0);
    let sum: f64 = d.rows.iter().map(|r| r.empirical_avg).sum();
    assert!((sum - avg.avg_answer_sets).abs() < 1e-12);
    assert!((d.total_answer_sets as f64 / 500.0 - avg.avg_answer_sets).abs() < 1e-12);
}

#[test]
fn consistency_ratio_bounded_by_answer_set_presence() {
    let cfg = ExperimentConfig::new(40, 3.0, 0.0, 400, 6);
    let row = run_consistency_experiment(&cfg).unwrap().rows[0];
    assert!(row.pred_gamma < row.pred_full);
    let dist = run_dist_experiment(&cfg).unwrap();
    assert!(row.empirical_ratio > 0.0 && row.empirical_ratio < 1.0);
    // A consistent program contributes at least one answer set.
    assert!(row.empirical_ratio * 400.0 <= dist.total_answer_sets as f64);
}

#[test]
fn grid_order_and_csv_shape() {
    let mut cfg = ExperimentConfig::new(20, 5.0, 0.0, 50, 1);
    cfg.ns = vec![20, 30];
    cfg.c2s = vec![0.0, 1.0];
    let rows = run_avg_experiment(&cfg).unwrap();
    let keys: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.c2)).collect();
    assert_eq!(keys, vec![(20, 0.0), (20, 1.0), (30, 0.0), (30, 1.0)]);
    let csv = avg_csv(&rows);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(AVG_HEADER));
    assert_eq!(lines.count(), 4);
}

#[test]
fn solver_limit_aborts_the_row() {
    let mut cfg = ExperimentConfig::new(30, 5.0, 0.0, 200, 3);
    cfg.solver_limit = Some(1);
    assert!(matches!(run_avg_experiment(&cfg), Err(Error::Trial { .. })));
}
