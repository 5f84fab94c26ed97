//! Dense least-squares primitives shared by every selector.
//!
//! All fits go through a single Householder QR path; normal equations are
//! never formed in production code (they only appear as a test oracle).
//! A pivot check `|R[k,k]| < n * eps * max_j ||x_j||` flags rank deficiency.

use crate::{Error, Result};

/// Dense column-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Build from column slices; every column must have the same length.
    pub fn from_columns(columns: &[&[f64]]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.len());
        let mut data = Vec::with_capacity(rows * cols);
        for col in columns {
            if col.len() != rows {
                return Err(Error::ShapeMismatch(format!(
                    "column length {} != {}",
                    col.len(),
                    rows
                )));
            }
            data.extend_from_slice(col);
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// `self * v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "matvec: {} columns vs vector of length {}",
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.rows];
        for j in 0..self.cols {
            let col = self.column(j);
            let vj = v[j];
            for (o, c) in out.iter_mut().zip(col) {
                *o += c * vj;
            }
        }
        Ok(out)
    }

    /// `self^T * v`.
    pub fn tr_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "tr_matvec: {} rows vs vector of length {}",
                self.rows,
                v.len()
            )));
        }
        Ok((0..self.cols).map(|j| dot(self.column(j), v)).collect())
    }
}

/// Least-squares fit of `y` on the columns of an assembled design matrix.
#[derive(Debug, Clone)]
pub struct LsqFit {
    /// Minimizer of `||y - X b||^2`, one entry per design column.
    pub coefficients: Vec<f64>,
    /// `||y - fitted||^2`, accumulated from the orthogonal transform tail so
    /// it stays accurate near interpolation.
    pub rss: f64,
    pub fitted: Vec<f64>,
    /// Number of columns accepted by the pivot check (always `cols` here;
    /// deficient designs are rejected instead of truncated).
    pub rank: usize,
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2_sq(v: &[f64]) -> f64 {
    dot(v, v)
}

/// Householder QR of `x`, stored compactly: the upper triangle of the worked
/// copy holds R, columns below the diagonal hold the reflector tails.
struct HouseholderQr {
    qr: Mat,
    /// Leading reflector coefficients (v_0 after normalization is implicit 1).
    betas: Vec<f64>,
    col_norm_max: f64,
}

impl HouseholderQr {
    fn factor(x: &Mat) -> Result<Self> {
        let (n, k) = (x.rows(), x.cols());
        if n < k {
            return Err(Error::ShapeMismatch(format!(
                "need rows >= cols, got {n} x {k}"
            )));
        }
        let col_norm_max = (0..k)
            .map(|j| norm2_sq(x.column(j)).sqrt())
            .fold(0.0_f64, f64::max);
        let tol = n as f64 * f64::EPSILON * col_norm_max;

        let mut qr = x.clone();
        let mut betas = vec![0.0; k];
        for j in 0..k {
            // Reflector annihilating qr[j+1.., j].
            let (head, tail_sq) = {
                let col = qr.column(j);
                (col[j], norm2_sq(&col[j + 1..]))
            };
            let norm = (head * head + tail_sq).sqrt();
            if norm <= tol {
                return Err(Error::RankDeficient {
                    col: j,
                    pivot: norm,
                    tol,
                });
            }
            let alpha = if head >= 0.0 { -norm } else { norm };
            // v = x_j - alpha e_j, scaled so v[j] = 1.
            let v0 = head - alpha;
            let beta = -v0 / alpha; // = v'v / (2 ... ) in the scaled form
            {
                let col = qr.column_mut(j);
                col[j] = alpha;
                for item in col.iter_mut().skip(j + 1) {
                    *item /= v0;
                }
            }
            betas[j] = beta;
            // Apply (I - beta v v') to the remaining columns.
            for c in j + 1..k {
                let s = {
                    let vj = qr.column(j);
                    let cc = qr.column(c);
                    let mut s = cc[j];
                    for i in j + 1..n {
                        s += vj[i] * cc[i];
                    }
                    s * beta
                };
                let vtail: Vec<f64> = qr.column(j)[j + 1..n].to_vec();
                let cc = qr.column_mut(c);
                cc[j] -= s;
                for (i, vi) in (j + 1..n).zip(vtail) {
                    cc[i] -= s * vi;
                }
            }
        }
        Ok(HouseholderQr {
            qr,
            betas,
            col_norm_max,
        })
    }

    /// Apply Q^T to a vector.
    fn qt_apply(&self, y: &[f64]) -> Vec<f64> {
        let (n, k) = (self.qr.rows(), self.qr.cols());
        let mut out = y.to_vec();
        for j in 0..k {
            let vj = self.qr.column(j);
            let mut s = out[j];
            for i in j + 1..n {
                s += vj[i] * out[i];
            }
            s *= self.betas[j];
            out[j] -= s;
            for i in j + 1..n {
                out[i] -= s * vj[i];
            }
        }
        out
    }

    /// Solve R b = z[0..k] by back substitution.
    fn r_solve(&self, z: &[f64]) -> Result<Vec<f64>> {
        let k = self.qr.cols();
        let tol = self.qr.rows() as f64 * f64::EPSILON * self.col_norm_max;
        let mut b = vec![0.0; k];
        for j in (0..k).rev() {
            let rjj = self.qr.get(j, j);
            if rjj.abs() <= tol {
                return Err(Error::RankDeficient {
                    col: j,
                    pivot: rjj.abs(),
                    tol,
                });
            }
            let mut s = z[j];
            for c in j + 1..k {
                s -= self.qr.get(j, c) * b[c];
            }
            b[j] = s / rjj;
        }
        Ok(b)
    }
}

/// Least squares by Householder QR.
///
/// `rss` comes from the tail of Q^T y, which keeps it accurate even when the
/// residual is many orders of magnitude below `||y||`.
pub fn qr_least_squares(x: &Mat, y: &[f64]) -> Result<LsqFit> {
    if x.rows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "design has {} rows, response has {}",
            x.rows(),
            y.len()
        )));
    }
    let k = x.cols();
    let qr = HouseholderQr::factor(x)?;
    let qty = qr.qt_apply(y);
    let coefficients = qr.r_solve(&qty)?;
    let fitted = x.matvec(&coefficients)?;
    let rss = norm2_sq(&qty[k..]);
    Ok(LsqFit {
        coefficients,
        rss,
        fitted,
        rank: k,
    })
}

/// `y' P y` where P is the orthogonal projector onto the column span of `x`.
///
/// Computed as the head of `||Q^T y||^2`, clamped into `[0, y'y]`.
pub fn projection_quadform(x: &Mat, y: &[f64]) -> Result<f64> {
    if x.rows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "design has {} rows, response has {}",
            x.rows(),
            y.len()
        )));
    }
    let qr = HouseholderQr::factor(x)?;
    let qty = qr.qt_apply(y);
    let q = norm2_sq(&qty[..x.cols()]);
    Ok(q.clamp(0.0, norm2_sq(y)))
}

/// Subtract the mean: returns `(v - mean, mean)`.
///
/// Two-pass compensated computation so the output sums to zero at the level
/// of a few ulps even for large offsets.
pub fn center(v: &[f64]) -> (Vec<f64>, f64) {
    let m1 = compensated_mean(v);
    let mut w: Vec<f64> = v.iter().map(|x| x - m1).collect();
    let m2 = compensated_mean(&w);
    for x in w.iter_mut() {
        *x -= m2;
    }
    (w, m1 + m2)
}

/// Neumaier-compensated mean.
fn compensated_mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &x in v {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    (sum + comp) / v.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    /// Normal-equation oracle: solve (X'X) b = X'y by Gaussian elimination.
    /// Test-only; production never forms normal equations.
    fn normal_equation_fit(x: &Mat, y: &[f64]) -> Vec<f64> {
        let k = x.cols();
        let mut a = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                a[i][j] = dot(x.column(i), x.column(j));
            }
            a[i][k] = dot(x.column(i), y);
        }
        for p in 0..k {
            let pivot_row = (p..k).max_by(|&r, &s| a[r][p].abs().total_cmp(&a[s][p].abs())).unwrap();
            a.swap(p, pivot_row);
            let piv = a[p][p];
            for r in 0..k {
                if r != p {
                    let f = a[r][p] / piv;
                    for c in p..=k {
                        let apc = a[p][c];
                        a[r][c] -= f * apc;
                    }
                }
            }
        }
        (0..k).map(|i| a[i][k] / a[i][i]).collect()
    }

    fn random_matrix(rng: &mut ChaCha12Rng, n: usize, k: usize) -> Mat {
        let mut m = Mat::zeros(n, k);
        for j in 0..k {
            for i in 0..n {
                m.set(i, j, rng.gen::<f64>() * 2.0 - 1.0);
            }
        }
        m
    }

    #[test]
    fn exact_interpolation() {
        let x = Mat::from_columns(&[&[1.0, 1.0, 1.0, 1.0], &[1.0, 2.0, 3.0, 4.0]]).unwrap();
        let y = [1.0, 2.0, 3.0, 4.0];
        let fit = qr_least_squares(&x, &y).unwrap();
        assert_relative_eq!(fit.coefficients[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(fit.coefficients[1], 1.0, epsilon = 1e-12);
        assert!(fit.rss.abs() < 1e-24);
    }

    #[test]
    fn intercept_only_is_mean() {
        let x = Mat::from_columns(&[&[1.0, 1.0]]).unwrap();
        let fit = qr_least_squares(&x, &[3.0, 5.0]).unwrap();
        assert_relative_eq!(fit.coefficients[0], 4.0, epsilon = 1e-14);
        assert_relative_eq!(fit.rss, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn matches_normal_equation_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = random_matrix(&mut rng, 10, 3);
            let y: Vec<f64> = (0..10).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let fit = qr_least_squares(&x, &y).unwrap();
            let oracle = normal_equation_fit(&x, &y);
            for (a, b) in fit.coefficients.iter().zip(&oracle) {
                assert_relative_eq!(a, b, epsilon = 1e-9);
            }
            assert_relative_eq!(
                fit.rss,
                norm2_sq(&y.iter().zip(&fit.fitted).map(|(a, b)| a - b).collect::<Vec<_>>()),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn quadform_constant_column() {
        let n = 6;
        let ones = vec![1.0; n];
        let x = Mat::from_columns(&[&ones]).unwrap();
        let y = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let ybar = 3.5;
        let q = projection_quadform(&x, &y).unwrap();
        assert_relative_eq!(q, n as f64 * ybar * ybar, epsilon = 1e-10);
    }

    #[test]
    fn quadform_in_span_is_yty() {
        let x = Mat::from_columns(&[&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]]).unwrap();
        // y = 2*1 + 3*x
        let y = [5.0, 8.0, 11.0];
        let q = projection_quadform(&x, &y).unwrap();
        assert_relative_eq!(q, norm2_sq(&y), max_relative = 1e-12);
    }

    #[test]
    fn quadform_matches_explicit_projector() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..10 {
            let x = random_matrix(&mut rng, 8, 2);
            let y: Vec<f64> = (0..8).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            // P y via the normal-equation oracle.
            let b = normal_equation_fit(&x, &y);
            let py = x.matvec(&b).unwrap();
            let q = projection_quadform(&x, &y).unwrap();
            assert_relative_eq!(q, dot(&py, &y), epsilon = 1e-10);
        }
    }

    #[test]
    fn pythagoras_and_nesting() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let x = random_matrix(&mut rng, 12, 4);
        let y: Vec<f64> = (0..12).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let yty = norm2_sq(&y);
        let sub = Mat::from_columns(&[x.column(0), x.column(1)]).unwrap();
        let full = Mat::from_columns(&[x.column(0), x.column(1), x.column(2), x.column(3)]).unwrap();
        let q_sub = projection_quadform(&sub, &y).unwrap();
        let q_full = projection_quadform(&full, &y).unwrap();
        assert!(q_sub <= q_full + 1e-12 * yty, "projection norms must be monotone");
        let fit = qr_least_squares(&full, &y).unwrap();
        assert_relative_eq!(q_full + fit.rss, yty, max_relative = 1e-9);
    }

    #[test]
    fn rank_deficient_rejected() {
        let c = [1.0, 2.0, 3.0, 4.0];
        let x = Mat::from_columns(&[&c, &c]).unwrap();
        match qr_least_squares(&x, &[1.0, 1.0, 1.0, 1.0]) {
            Err(Error::RankDeficient { .. }) => {}
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn center_basic() {
        let (c, m) = center(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(c, vec![-1.0, 0.0, 1.0]);
        let (c0, m0) = center(&[4.25; 9]);
        assert_eq!(m0, 4.25);
        assert!(c0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn center_residual_mean_and_idempotence() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..20 {
            let v: Vec<f64> = (0..15).map(|_| rng.gen::<f64>() * 1e6 - 5e5).collect();
            let (c, _) = center(&v);
            let maxabs = v.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
            let resid: f64 = c.iter().sum();
            assert!(resid.abs() <= 1e-12 * 15.0 * maxabs);
            let mean_mag = (resid / 15.0).abs();
            assert!(mean_mag < 1e-10, "centered mean {mean_mag} too large");
            let (c2, _) = center(&c);
            for (a, b) in c.iter().zip(&c2) {
                assert!((a - b).abs() <= 1e-14 * maxabs.max(1.0));
            }
        }
    }
}
