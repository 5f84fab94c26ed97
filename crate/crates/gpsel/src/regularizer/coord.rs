//! Cyclic coordinate descent for the Lasso and elastic-net objectives
//!   ||y − Xβ||² + λ Σ|β_j| (+ μ Σ β_j²)
//! on internally standardized data (paper scaling: no 1/2, no 1/n, so the
//! all-zero threshold is λ_max = 2‖X'y‖_∞).

use crate::linalg::{dot, Mat};
use crate::{Error, Result};

const MAX_CYCLES: usize = 100_000;
const COEF_TOL: f64 = 1e-9;

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

pub(crate) fn objective(x: &Mat, y: &[f64], beta: &[f64], lambda: f64, mu: f64) -> f64 {
    let fitted = x.matvec(beta).expect("shape checked by caller");
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let l2: f64 = beta.iter().map(|b| b * b).sum();
    rss + lambda * l1 + mu * l2
}

/// Coordinate descent on standardized columns. `warm` seeds the solve (path
/// fits pass the previous grid point's solution).
pub(crate) fn cd_solve(
    x: &Mat,
    y: &[f64],
    lambda: f64,
    mu: f64,
    warm: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let p = x.cols();
    if lambda < 0.0 || mu < 0.0 {
        return Err(Error::Domain("penalties must be nonnegative".into()));
    }
    let col_sq: Vec<f64> = (0..p).map(|j| dot(x.column(j), x.column(j))).collect();
    let mut beta = warm.map_or_else(|| vec![0.0; p], <[f64]>::to_vec);
    let mut residual: Vec<f64> = {
        let fitted = x.matvec(&beta)?;
        y.iter().zip(fitted).map(|(a, b)| a - b).collect()
    };
    #[cfg(debug_assertions)]
    let mut prev_obj = objective(x, y, &beta, lambda, mu);
    for _cycle in 0..MAX_CYCLES {
        let mut max_delta = 0.0_f64;
        for j in 0..p {
            let xj = x.column(j);
            let rho = dot(xj, &residual) + col_sq[j] * beta[j];
            let new = soft_threshold(rho, lambda / 2.0) / (col_sq[j] + mu);
            let delta = new - beta[j];
            if delta != 0.0 {
                for (r, v) in residual.iter_mut().zip(xj) {
                    *r -= delta * v;
                }
                beta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        #[cfg(debug_assertions)]
        {
            let obj = objective(x, y, &beta, lambda, mu);
            debug_assert!(
                obj <= prev_obj * (1.0 + 1e-12) + 1e-9,
                "coordinate descent objective increased: {prev_obj} -> {obj}"
            );
            prev_obj = obj;
        }
        if max_delta < COEF_TOL {
            return Ok(beta);
        }
    }
    Err(Error::NoConvergence(MAX_CYCLES))
}

/// Largest KKT violation over coordinates: for zero coefficients the excess
/// of |2 x_j'r| over λ, for active ones the distance of 2 x_j'r − 2 μ β_j
/// from λ·sign(β_j).
pub fn kkt_violation(x: &Mat, y: &[f64], beta: &[f64], lambda: f64, mu: f64) -> f64 {
    let fitted = x.matvec(beta).expect("shape checked by caller");
    let residual: Vec<f64> = y.iter().zip(fitted).map(|(a, b)| a - b).collect();
    let mut worst = 0.0_f64;
    for j in 0..x.cols() {
        let grad = 2.0 * dot(x.column(j), &residual) - 2.0 * mu * beta[j];
        let v = if beta[j] == 0.0 {
            (grad.abs() - lambda).max(0.0)
        } else {
            (grad - lambda * beta[j].signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}
