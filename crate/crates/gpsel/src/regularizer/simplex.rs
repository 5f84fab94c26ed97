//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Variables are nonnegative; rows carry explicit senses. Built for the
//! small dense programs of the Dantzig selector (tens of rows), with a hard
//! guard against misuse on large instances.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// min c'x  s.t.  A x (<=|=|>=) b,  x >= 0.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraint_matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub sense: Vec<Sense>,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 1_000_000;

pub fn simplex_solve(lp: &LpProblem) -> Result<(Vec<f64>, f64)> {
    let m = lp.constraint_matrix.len();
    let n = lp.objective.len();
    if m > 500 || n > 500 {
        return Err(Error::ShapeMismatch(format!(
            "dense simplex guard: {m} rows x {n} cols exceeds 500"
        )));
    }
    if lp.rhs.len() != m || lp.sense.len() != m {
        return Err(Error::ShapeMismatch("rows, rhs and senses must align".into()));
    }
    for (i, row) in lp.constraint_matrix.iter().enumerate() {
        if row.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "row {i} has {} coefficients, expected {n}",
                row.len()
            )));
        }
    }
    if lp
        .constraint_matrix
        .iter()
        .flatten()
        .chain(lp.objective.iter())
        .chain(lp.rhs.iter())
        .any(|v| !v.is_finite())
    {
        return Err(Error::Domain("non-finite entry in linear program".into()));
    }

    // Normalize to b >= 0 and count auxiliary columns.
    let mut rows = lp.constraint_matrix.clone();
    let mut rhs = lp.rhs.clone();
    let mut sense = lp.sense.clone();
    for i in 0..m {
        if rhs[i] < 0.0 {
            for v in rows[i].iter_mut() {
                *v = -*v;
            }
            rhs[i] = -rhs[i];
            sense[i] = match sense[i] {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let n_slack = sense.iter().filter(|s| **s != Sense::Eq).count();
    let n_art = sense.iter().filter(|s| **s != Sense::Le).count();
    let total = n + n_slack + n_art;

    // Tableau: m rows of [vars | slacks/surplus | artificials | rhs].
    let mut t = vec![vec![0.0_f64; total + 1]; m];
    let mut basis = vec![usize::MAX; m];
    let mut slack_at = n;
    let mut art_at = n + n_slack;
    let mut artificial_cols = Vec::new();
    for i in 0..m {
        t[i][..n].copy_from_slice(&rows[i]);
        t[i][total] = rhs[i];
        match sense[i] {
            Sense::Le => {
                t[i][slack_at] = 1.0;
                basis[i] = slack_at;
                slack_at += 1;
            }
            Sense::Ge => {
                t[i][slack_at] = -1.0;
                slack_at += 1;
                t[i][art_at] = 1.0;
                basis[i] = art_at;
                artificial_cols.push(art_at);
                art_at += 1;
            }
            Sense::Eq => {
                t[i][art_at] = 1.0;
                basis[i] = art_at;
                artificial_cols.push(art_at);
                art_at += 1;
            }
        }
    }

    let mut pivots_left = MAX_PIVOTS;
    let is_artificial = |c: usize| c >= n + n_slack;

    // Phase 1: minimize the sum of artificials.
    if !artificial_cols.is_empty() {
        let mut cost = vec![0.0_f64; total + 1];
        for &c in &artificial_cols {
            cost[c] = 1.0;
        }
        for (i, &b) in basis.iter().enumerate() {
            if is_artificial(b) {
                for (c, v) in cost.iter_mut().enumerate() {
                    *v -= t[i][c];
                }
            }
        }
        run_phase(&mut t, &mut basis, &mut cost, total, &mut pivots_left, |_| true)?;
        let phase1 = -cost[total];
        if phase1 > 1e-7 {
            return Err(Error::Infeasible);
        }
        // Drive any artificial still basic (at zero) out of the basis.
        for i in 0..m {
            if is_artificial(basis[i]) {
                if let Some(c) = (0..n + n_slack).find(|&c| t[i][c].abs() > PIVOT_TOL) {
                    pivot(&mut t, &mut basis, i, c, total);
                } // else: redundant row, the artificial stays basic at zero
            }
        }
    }

    // Phase 2: minimize the true objective, artificials banned.
    let mut cost = vec![0.0_f64; total + 1];
    cost[..n].copy_from_slice(&lp.objective);
    for i in 0..m {
        let b = basis[i];
        let cb = if b < n { lp.objective[b] } else { 0.0 };
        if cb != 0.0 {
            for c in 0..=total {
                cost[c] -= cb * t[i][c];
            }
        }
    }
    run_phase(&mut t, &mut basis, &mut cost, total, &mut pivots_left, |c| {
        !is_artificial(c)
    })?;

    let mut x = vec![0.0_f64; n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = t[i][total];
        }
    }
    let objective = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
    Ok((x, objective))
}

/// Bland-rule pivoting until no reduced cost is below −COST_TOL.
fn run_phase(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &mut [f64],
    total: usize,
    pivots_left: &mut usize,
    allowed: impl Fn(usize) -> bool,
) -> Result<()> {
    let m = t.len();
    loop {
        // Entering variable: smallest index with negative reduced cost.
        let Some(enter) = (0..total).find(|&c| allowed(c) && cost[c] < -COST_TOL) else {
            return Ok(());
        };
        // Ratio test; ties broken by smallest basic variable index (Bland).
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let a = t[i][enter];
            if a > PIVOT_TOL {
                let ratio = t[i][total] / a;
                let replace = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-12
                            || (ratio < best + 1e-12 && basis[i] < basis[l])
                    }
                };
                if replace {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return Err(Error::Unbounded);
        };
        if *pivots_left == 0 {
            return Err(Error::IterationLimit);
        }
        *pivots_left -= 1;
        pivot(t, basis, leave, enter, total);
        // Update the cost row.
        let factor = cost[enter];
        if factor != 0.0 {
            for c in 0..=total {
                cost[c] -= factor * t[leave][c];
            }
        }
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize, total: usize) {
    let piv = t[row][col];
    for c in 0..=total {
        t[row][c] /= piv;
    }
    for i in 0..t.len() {
        if i != row {
            let f = t[i][col];
            if f != 0.0 {
                for c in 0..=total {
                    let v = t[row][c];
                    t[i][c] -= f * v;
                }
            }
        }
    }
    basis[row] = col;
}
