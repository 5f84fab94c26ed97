use super::*;
use crate::data::Column;
use crate::linalg::qr_least_squares;
use approx::assert_relative_eq;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

fn toy(n: usize, p: usize, seed: u64, noise: f64) -> Dataset {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let columns: Vec<Column> = (0..p)
        .map(|j| Column {
            name: format!("x{}", j + 1),
            values: (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
        })
        .collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let eps: f64 = (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0;
            1.0 + 2.0 * columns[0].values[i] + noise * eps
        })
        .collect();
    Dataset::new("toy", y, columns).unwrap()
}

#[test]
fn enet_mu_zero_is_exactly_lasso() {
    let data = toy(15, 6, 11, 0.5);
    for lambda in [0.05, 0.8, 4.0] {
        let a = lasso_cd(&data, lambda).unwrap();
        let b = enet_cd(&data, lambda, 0.0).unwrap();
        assert_eq!(a, b, "shared solver path must agree bit for bit");
    }
}

#[test]
fn dantzig_zero_at_large_lambda_and_ols_at_zero() {
    let data = toy(12, 4, 7, 0.4);
    let std_corr = {
        // λ ≥ ‖X'y‖_∞ makes β = 0 feasible and optimal.
        let big = 1e6;
        let beta = dantzig_lp(&data, big).unwrap();
        assert!(beta.iter().all(|&b| b.abs() < 1e-10));
        big
    };
    let _ = std_corr;

    // At λ = 0 the constraint pins X'(y−Xβ) = 0: the normal equations, so
    // the solution is OLS on the standardized scale (full column rank).
    let square = toy(6, 4, 3, 0.3);
    let beta = dantzig_lp(&square, 0.0).unwrap();
    let n = square.n();
    let (yc, _) = crate::linalg::center(&square.y);
    let mut cols = Vec::new();
    for j in 0..square.p() {
        let (c, _) = crate::linalg::center(&square.columns[j].values);
        let scale = (crate::linalg::dot(&c, &c) / n as f64).sqrt();
        cols.push(c.iter().map(|v| v / scale).collect::<Vec<f64>>());
    }
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    let x = Mat::from_columns(&refs).unwrap();
    let ols = qr_least_squares(&x, &yc).unwrap().coefficients;
    for (a, b) in beta.iter().zip(&ols) {
        assert_relative_eq!(a, b, epsilon = 1e-6, max_relative = 1e-6);
    }
}

#[test]
fn dantzig_matches_vertex_objective_on_small_instances() {
    // The LP objective (minimum L1 norm) agrees with an exhaustive check
    // over the l1 ball faces via the simplex oracle already validated in
    // simplex::tests; here assert the defining feasibility plus optimality
    // against a fine polyhedral scan on p = 2.
    let data = toy(10, 2, 21, 0.6);
    let lambda = 0.9;
    let beta = dantzig_lp(&data, lambda).unwrap();
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    // Scan feasible candidates on a grid: none may beat the LP optimum.
    let n = data.n();
    let (yc, _) = crate::linalg::center(&data.y);
    let mut cols = Vec::new();
    for j in 0..data.p() {
        let (c, _) = crate::linalg::center(&data.columns[j].values);
        let scale = (crate::linalg::dot(&c, &c) / n as f64).sqrt();
        cols.push(c.iter().map(|v| v / scale).collect::<Vec<f64>>());
    }
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    let x = Mat::from_columns(&refs).unwrap();
    let feasible = |b: &[f64]| -> bool {
        let fitted = x.matvec(b).unwrap();
        (0..2).all(|j| {
            let r: f64 = x
                .column(j)
                .iter()
                .zip(yc.iter().zip(&fitted))
                .map(|(xv, (yv, fv))| xv * (yv - fv))
                .sum();
            r.abs() <= lambda + 1e-9
        })
    };
    assert!(feasible(&beta));
    let mut best_grid = f64::INFINITY;
    for i in -60..=60 {
        for j in -60..=60 {
            let cand = [i as f64 * 0.05, j as f64 * 0.05];
            if feasible(&cand) {
                best_grid = best_grid.min(cand[0].abs() + cand[1].abs());
            }
        }
    }
    assert!(l1 <= best_grid + 1e-7, "LP value {l1} vs grid scan {best_grid}");
}

#[test]
fn support_threshold() {
    let support = selected_support(&[0.5, 0.0, -1e-12]);
    assert_eq!(support.bits(), &[true, false, false]);
    assert!(selected_support(&[0.0, 0.0]).is_null());
}

#[test]
fn loo_grid_of_size_one_returns_it() {
    // Degenerate grid comes from λ_max scaling; emulate by checking the
    // selected λ always belongs to the grid and ties prefer larger λ.
    let data = toy(10, 3, 5, 4.0);
    let fit = tune(&data, &Method::Lasso, FoldScheme::LeaveOneOut).unwrap();
    assert!(fit.paths[0].lambda_grid.contains(&fit.lambda));
    assert!(fit.paths[0].cv_error.iter().all(|e| e.is_finite()));
}

#[test]
fn pure_noise_selects_near_lambda_max() {
    // Signal-free response: the majority of seeds keep (almost) no active
    // variables at the LOO-selected λ.
    let mut empty = 0;
    let runs = 12;
    for seed in 0..runs {
        let mut rng = ChaCha12Rng::seed_from_u64(900 + seed);
        let columns: Vec<Column> = (0..5)
            .map(|j| Column {
                name: format!("x{}", j + 1),
                values: (0..15).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
            })
            .collect();
        let y: Vec<f64> = (0..15)
            .map(|_| (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0)
            .collect();
        let data = Dataset::new("noise", y, columns).unwrap();
        let fit = tune(&data, &Method::Lasso, FoldScheme::LeaveOneOut).unwrap();
        if fit.support.p_gamma() <= 1 {
            empty += 1;
        }
    }
    assert!(
        empty * 2 > runs,
        "expected sparse selections on noise, got {empty}/{runs}"
    );
}

#[test]
fn strong_signal_is_recovered() {
    let mut hits = 0;
    let runs = 20;
    for seed in 0..runs {
        let data = toy(15, 5, 3000 + seed, 0.3);
        let fit = tune(&data, &Method::Lasso, FoldScheme::LeaveOneOut).unwrap();
        if fit.support.bits()[0] {
            hits += 1;
        }
    }
    assert!(hits >= 19, "strong predictor found in only {hits}/{runs} runs");
}

#[test]
fn path_monotonicity_and_prediction() {
    let data = toy(15, 4, 77, 0.7);
    let fit = tune(&data, &Method::Lasso, FoldScheme::LeaveOneOut).unwrap();
    let path = &fit.paths[0];
    let first = selected_support(&path.coefficients[0]);
    let last = selected_support(path.coefficients.last().unwrap());
    assert_eq!(first.p_gamma(), 0, "all penalized coefficients zero at λ_max");
    assert!(last.p_gamma() >= first.p_gamma());

    // Prediction on the training design reproduces intercept + slopes.
    let x_new = DesignMatrix::from_dataset(&data);
    let pred = fit.predict(&x_new).unwrap();
    for (i, p) in pred.iter().enumerate() {
        let mut v = fit.intercept;
        for j in 0..data.p() {
            v += fit.coefficients[j] * data.columns[j].values[i];
        }
        assert_relative_eq!(p, &v, epsilon = 1e-10);
    }
}

#[test]
fn kfold_scheme_is_deterministic() {
    let data = toy(30, 4, 123, 0.8);
    let a = tune(&data, &Method::Enet, FoldScheme::KFold { k: 10, seed: 9 }).unwrap();
    let b = tune(&data, &Method::Enet, FoldScheme::KFold { k: 10, seed: 9 }).unwrap();
    assert_eq!(a.lambda, b.lambda);
    assert_eq!(a.mu, b.mu);
    assert_eq!(a.beta_std, b.beta_std);
}
