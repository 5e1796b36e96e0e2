use l01svm::model::Model;
use l01svm::solver::support_hyperplane_gap;
use l01svm::synthgen::{gen_two_gaussians, GaussianSpec};
use l01svm::*;

/// Example-1 style clouds pushed far enough apart that the classes separate.
fn separated(m: usize, seed: u64) -> (Dataset, Dataset) {
    let mut spec = GaussianSpec::new(m, seed);
    spec.mu_pos = [2.0, -12.0];
    spec.mu_neg = [-2.0, 12.0];
    gen_two_gaussians(&spec).unwrap()
}

fn scaled(m: usize, seed: u64) -> (Dataset, Dataset, ScalingMap) {
    let (train, test) = separated(m, seed);
    let s = fit_scaler(&train);
    (apply_scaler(&train, &s).unwrap(), apply_scaler(&test, &s).unwrap(), s)
}

#[test]
fn converged_solution_is_stationary_and_accurate() {
    let (train, test, _) = scaled(500, 3);
    let sd = signed_design(&train);
    let cfg = SolverConfig::default().with_penalties(4.0, 1.0);
    let res = solve(&sd, &cfg).unwrap();
    assert!(res.converged, "{:?}", res.residuals);
    assert!(res.residuals.max_theta < cfg.tol);
    assert!(res.trace.tni() <= cfg.max_iter);
    assert_eq!(accuracy(&predict(&res.w, res.b, test.x()).unwrap(), test.y()), 1.0);

    let m = sd.sample_count() as f64;
    assert!(support_hyperplane_gap(&sd, &res) <= m.sqrt() * cfg.tol);

    let band = (2.0 * cfg.c * cfg.sigma).sqrt();
    let mut on_t = vec![false; sd.sample_count()];
    for &i in &res.support_indices {
        on_t[i] = true;
    }
    for (i, &l) in res.lambda.iter().enumerate() {
        if on_t[i] {
            assert!(l >= -band - 10.0 * cfg.tol && l < 10.0 * cfg.tol, "lambda[{i}] = {l}");
        } else {
            assert_eq!(l, 0.0);
        }
    }

    let again = stationarity_residuals(&sd, &res.point(), &res.support_indices, cfg.c, cfg.sigma).unwrap();
    assert!((again.max_theta - res.residuals.max_theta).abs() < 1e-12);
}

#[test]
fn solve_is_deterministic() {
    let (train, _, _) = scaled(300, 9);
    let sd = signed_design(&train);
    let cfg = SolverConfig::default().with_penalties(2.0, 0.25);
    let a = solve(&sd, &cfg).unwrap();
    let b = solve(&sd, &cfg).unwrap();
    assert_eq!(a.point(), b.point());
    assert_eq!(a.support_indices, b.support_indices);
    assert_eq!(a.trace.records, b.trace.records);
}

#[test]
fn cross_validation_matches_across_execution_modes() {
    let (train, _) = separated(60, 4);
    let grid = Grid { c_values: vec![0.5, 2.0], sigma_values: vec![0.25, 1.0] };
    let base = SolverConfig::default();
    let seq = cross_validate(&train, &grid, &CvPlan::new(5, 11).sequential(), &base).unwrap();
    let par = cross_validate(&train, &grid, &CvPlan { exec: Execution::Parallel, ..CvPlan::new(5, 11) }, &base).unwrap();
    assert_eq!(seq.cells, par.cells);
    assert_eq!(seq.selected, par.selected);
    assert_eq!(seq.cells.len(), 4);
    assert!(seq.best().mean_accuracy > 0.95);
}

#[test]
fn model_text_round_trip_predicts_the_same() {
    let (raw_train, raw_test) = separated(200, 5);
    let s = fit_scaler(&raw_train);
    let train = apply_scaler(&raw_train, &s).unwrap();
    let cfg = SolverConfig::default();
    let res = solve(&signed_design(&train), &cfg).unwrap();
    let model = Model::from_result(&res, cfg, Some(s));
    let back = Model::from_text(&model.to_text()).unwrap();
    assert_eq!(back, model);
    let p = back.predict(&raw_test).unwrap();
    assert_eq!(p, model.predict(&raw_test).unwrap());
    assert!(accuracy(&p, raw_test.y()) > 0.99);
}

#[test]
fn libsvm_file_round_trip_feeds_the_solver() {
    let (train, _) = separated(50, 6);
    let text = write_libsvm(&train);
    let back = parse_libsvm(&text, None).unwrap();
    assert_eq!(back, train);
}
