use l01svm::solver::{solve_w_direct, solve_w_woodbury, update_w, WPath, WorkingSet};
use l01svm::{signed_design, Dataset, Matrix};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// `(I + σ AᵀA) w = σ Aᵀ v` solved with a general LU factorization.
fn lu_oracle(rows: &[Vec<f64>], v: &[f64], sigma: f64) -> Vec<f64> {
    let n = rows[0].len();
    let a = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let lhs = DMatrix::identity(n, n) + a.transpose() * &a * sigma;
    let rhs = a.transpose() * DVector::from_column_slice(v) * sigma;
    lhs.lu().solve(&rhs).expect("oracle system is non-singular").iter().copied().collect()
}

fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = b.iter().map(|y| y * y).sum::<f64>().sqrt().max(1.0);
    diff / scale
}

fn instance() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, f64)> {
    (1usize..12, 1usize..12, -3i32..4).prop_flat_map(|(t, n, sexp)| {
        (
            proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, n), t),
            proptest::collection::vec(-2.0f64..2.0, t),
            Just(2f64.powi(sexp)),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn direct_and_woodbury_agree_with_lu((rows, v, sigma) in instance()) {
        let a_t = Matrix::from_rows(&rows).unwrap();
        let oracle = lu_oracle(&rows, &v, sigma);
        let direct = solve_w_direct(&a_t, &v, sigma).unwrap();
        let woodbury = solve_w_woodbury(&a_t, &v, sigma).unwrap();
        prop_assert!(rel_gap(&direct, &oracle) < 1e-8);
        prop_assert!(rel_gap(&woodbury, &oracle) < 1e-8);
        prop_assert!(rel_gap(&direct, &woodbury) < 1e-8);
    }
}

#[test]
fn path_choice_follows_shape() {
    assert_eq!(WPath::select(2, 100), WPath::Direct);
    assert_eq!(WPath::select(5, 5), WPath::Direct);
    assert_eq!(WPath::select(100, 3), WPath::Woodbury);
}

#[test]
fn update_w_uses_only_the_working_set() {
    // Rows outside T must not influence w, whatever their values.
    let x = Matrix::from_rows(&[[1.0, 2.0], [0.5, -1.0], [1e3, -1e3]]).unwrap();
    let d = Dataset::new(x, vec![1.0, -1.0, 1.0]).unwrap();
    let sd = signed_design(&d);
    let ws = WorkingSet { indices: vec![0, 1], z: vec![0.5, 0.5, 9.0] };
    let u = [0.0, 0.0, 9.0];
    let lambda = [-0.2, 0.1, 0.0];
    let (b, sigma) = (0.3, 2.0);
    let w = update_w(&sd, &ws, &u, b, &lambda, sigma).unwrap();

    let rows: Vec<Vec<f64>> = ws.indices.iter().map(|&i| sd.a().row(i).to_vec()).collect();
    let v: Vec<f64> = ws
        .indices
        .iter()
        .map(|&i| -(u[i] + b * sd.y()[i] - 1.0 + lambda[i] / sigma))
        .collect();
    assert!(rel_gap(&w, &lu_oracle(&rows, &v, sigma)) < 1e-12);
}
