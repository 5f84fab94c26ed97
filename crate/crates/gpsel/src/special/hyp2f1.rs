//! Gaussian hypergeometric function ₂F₁(a,b;c;x) in log scale.
//!
//! The parameter regime served here is a,b,c > 0 with x ∈ [0,1). Values grow
//! like (1−x)^{c−a−b} with c−a−b strongly negative, so everything is
//! accumulated in scaled form and returned as ln ₂F₁.
//!
//! Evaluation strategy:
//! - direct power series (all terms positive) whenever its estimated length
//!   is affordable, with an Euler transform x-branch when the transformed
//!   series is both positive-term and cheaper;
//! - otherwise the argument is within O(1e-4) of 1 and the function is
//!   evaluated through the 1−x connection formulas, with the log/digamma
//!   form when c−a−b is an integer.

use super::gamma::{digamma, ln_gamma, signed_ln_gamma};
use crate::{Error, Result};

/// Parameter bundle for ln ₂F₁(a,b;c;x).
#[derive(Debug, Clone, Copy)]
pub struct Hyp2f1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x: f64,
}

/// Hard cap on direct-series length. Beyond this the 1−x expansions take
/// over (their own sums converge in tens of terms there).
const SERIES_LIMIT: usize = 400_000;

/// Relative truncation target for all series; leaves margin below the 1e-10
/// accuracy contract.
const TERM_EPS: f64 = 1e-17;

pub fn log_hyp2f1(p: &Hyp2f1Params) -> Result<f64> {
    log_hyp2f1_cpl(p.a, p.b, p.c, p.x, 1.0 - p.x)
}

/// Entry point with an explicitly supplied complement `omx = 1 - x`.
/// Callers that know 1−x more precisely than x (residual ratios near
/// saturation) pass it here to keep the near-unit branch fully accurate.
pub(crate) fn log_hyp2f1_cpl(a: f64, b: f64, c: f64, x: f64, omx: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(Error::Domain(format!(
            "hyp2f1 requires a,b,c > 0 (got a={a}, b={b}, c={c})"
        )));
    }
    if !(0.0..1.0).contains(&x) || omx <= 0.0 || omx > 1.0 {
        return Err(Error::Domain(format!(
            "hyp2f1 argument must satisfy 0 <= x < 1 (got x={x}, 1-x={omx})"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    let direct = series_cost(a, b, c, x, omx);
    // Euler transform: positive-term series in (c-a, c-b) when both stay
    // positive; worthwhile only if it genuinely shortens the sum.
    let (ca, cb) = (c - a, c - b);
    if x > 0.5 && ca > 0.0 && cb > 0.0 && series_cost(ca, cb, c, x, omx) < direct {
        let ln_tail = log_series_positive(ca, cb, c, x, SERIES_LIMIT)?;
        return Ok((c - a - b) * omx.ln() + ln_tail);
    }
    if direct <= SERIES_LIMIT as f64 {
        return log_series_positive(a, b, c, x, SERIES_LIMIT);
    }

    let s = c - a - b;
    let m = s.round();
    if (s - m).abs() < 1e-9 {
        log_near_unit_integer(a, b, c, m as i64, omx)
    } else {
        log_near_unit_generic(a, b, c, s, omx)
    }
}

/// Estimated number of series terms: turnover of the term ratio plus the
/// geometric decay needed to reach the truncation target.
fn series_cost(a: f64, b: f64, c: f64, x: f64, omx: f64) -> f64 {
    let turnover = ((a + b - c - 1.0) * x).max(0.0) / omx;
    let decay = 42.0 / omx.min(0.7);
    turnover + decay + 16.0
}

/// Direct series with all-positive terms, accumulated in scaled form.
/// Stops on a geometric tail bound held for three consecutive terms.
fn log_series_positive(a: f64, b: f64, c: f64, x: f64, budget: usize) -> Result<f64> {
    let mut sum = 1.0_f64;
    let mut term = 1.0_f64;
    let mut offset = 0.0_f64;
    let mut streak = 0u32;
    let mut k = 0.0_f64;
    for _ in 0..budget {
        let ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        term *= ratio;
        sum += term;
        if sum > 1e290 {
            offset += sum.ln();
            term /= sum;
            sum = 1.0;
        }
        if ratio < 1.0 {
            let q = ratio.max(x);
            if term * q / (1.0 - q) < TERM_EPS * sum {
                streak += 1;
                if streak >= 3 {
                    return Ok(offset + sum.ln());
                }
            } else {
                streak = 0;
            }
        } else {
            streak = 0;
        }
        k += 1.0;
    }
    Err(Error::NoConvergence(budget))
}

/// General series with possibly sign-alternating terms, returned as
/// `(sign, ln|sum|)`. Used only inside the near-unit expansions where the
/// argument is tiny, so partial cancellation stays mild.
fn series_signed(a: f64, b: f64, c: f64, x: f64, budget: usize) -> Result<(f64, f64)> {
    let mut sum = 1.0_f64;
    let mut term = 1.0_f64;
    let mut offset = 0.0_f64;
    let mut streak = 0u32;
    let mut k = 0.0_f64;
    for _ in 0..budget {
        let ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        term *= ratio;
        sum += term;
        let mag = sum.abs().max(term.abs());
        if mag > 1e290 {
            offset += mag.ln();
            term /= mag;
            sum /= mag;
        }
        if ratio.abs() < 1.0 && term.abs() < TERM_EPS * sum.abs().max(1e-290) {
            streak += 1;
            if streak >= 3 {
                return Ok((sum.signum(), offset + sum.abs().ln()));
            }
        } else {
            streak = 0;
        }
        k += 1.0;
    }
    Err(Error::NoConvergence(budget))
}

/// Signed log-sum: combine `(sign_i, ln|v_i|)` terms into one.
fn signed_log_sum(parts: &[(f64, f64)]) -> (f64, f64) {
    let max = parts
        .iter()
        .filter(|(s, _)| *s != 0.0)
        .map(|(_, l)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return (0.0, f64::NEG_INFINITY);
    }
    let acc: f64 = parts
        .iter()
        .filter(|(s, _)| *s != 0.0)
        .map(|(s, l)| s * (l - max).exp())
        .sum();
    (acc.signum(), max + acc.abs().ln())
}

/// Connection formula in w = 1-x for non-integer s = c-a-b:
///   F = Γ(c)Γ(s)/(Γ(c-a)Γ(c-b)) · F(a,b;1-s;w)
///     + Γ(c)Γ(-s)/(Γ(a)Γ(b)) · w^s · F(c-a,c-b;1+s;w)
fn log_near_unit_generic(a: f64, b: f64, c: f64, s: f64, w: f64) -> Result<f64> {
    let ln_c = ln_gamma(c);

    let (g_s, sg_s) = signed_ln_gamma(s);
    let (g_ca, sg_ca) = signed_ln_gamma(c - a);
    let (g_cb, sg_cb) = signed_ln_gamma(c - b);
    let t1 = if sg_ca == 0.0 || sg_cb == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        let (sign_inner, ln_inner) = series_signed(a, b, 1.0 - s, w, 100_000)?;
        (
            sg_s * sg_ca * sg_cb * sign_inner,
            ln_c + g_s - g_ca - g_cb + ln_inner,
        )
    };

    let (g_ms, sg_ms) = signed_ln_gamma(-s);
    let (sign_inner2, ln_inner2) = series_signed(c - a, c - b, 1.0 + s, w, 100_000)?;
    let t2 = (
        sg_ms * sign_inner2,
        ln_c + g_ms - ln_gamma(a) - ln_gamma(b) + s * w.ln() + ln_inner2,
    );

    let (sign, ln_abs) = signed_log_sum(&[t1, t2]);
    if sign <= 0.0 {
        return Err(Error::NoConvergence(0));
    }
    Ok(ln_abs)
}

/// Integer-case connection formula (log/digamma form). For m >= 0 this is
/// the expansion of F(a,b;a+b+m;x) around x = 1; m < 0 is reduced to the
/// positive case through the Euler transform, which maps the parameter pair
/// to (c-a, c-b) and the offset to -m.
fn log_near_unit_integer(a: f64, b: f64, c: f64, m: i64, w: f64) -> Result<f64> {
    if m >= 0 {
        log_w_expansion_nonneg(a, b, c, m as usize, w)
    } else {
        let ln_tail = log_w_expansion_nonneg(c - a, c - b, c, (-m) as usize, w)?;
        Ok((m as f64) * w.ln() + ln_tail)
    }
}

/// DLMF-style expansion of F(alpha,beta;alpha+beta+m;x) in w = 1-x, m >= 0:
///   F = Γ(m)Γ(c)/(Γ(alpha+m)Γ(beta+m)) Σ_{k<m} (alpha)_k(beta)_k/(k!(1-m)_k) w^k
///     - (-w)^m Γ(c)/(Γ(alpha)Γ(beta)) Σ_{k≥0} (alpha+m)_k(beta+m)_k/(k!(k+m)!) w^k
///         · [ln w - ψ(k+1) - ψ(k+m+1) + ψ(alpha+k+m) + ψ(beta+k+m)]
///
/// alpha or beta may be negative (Euler-reduced case); alpha+m and beta+m
/// are then the original positive parameters, so the infinite sum only sees
/// positive digamma arguments. A nonpositive-integer alpha or beta zeroes
/// the reciprocal gamma prefactor and with it the whole log series.
fn log_w_expansion_nonneg(alpha: f64, beta: f64, c: f64, m: usize, w: f64) -> Result<f64> {
    let ln_c = ln_gamma(c);
    let mf = m as f64;

    // Finite part (absent for m = 0).
    let finite = if m == 0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        let mut sum = 1.0_f64;
        let mut term = 1.0_f64;
        for k in 0..(m - 1) {
            let kf = k as f64;
            term *= (alpha + kf) * (beta + kf) / ((kf + 1.0) * (1.0 - mf + kf)) * w;
            sum += term;
        }
        let (g_am, sg_am) = signed_ln_gamma(alpha + mf);
        let (g_bm, sg_bm) = signed_ln_gamma(beta + mf);
        (
            sum.signum() * sg_am * sg_bm,
            ln_gamma(mf) + ln_c - g_am - g_bm + sum.abs().ln(),
        )
    };

    // Log part.
    let (g_a, sg_a) = signed_ln_gamma(alpha);
    let (g_b, sg_b) = signed_ln_gamma(beta);
    let log_part = if sg_a == 0.0 || sg_b == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        let ln_w = w.ln();
        let am = alpha + mf;
        let bm = beta + mf;
        let mut psi_k1 = digamma(1.0);
        let mut psi_km1 = digamma(mf + 1.0);
        let mut psi_a = digamma(am);
        let mut psi_b = digamma(bm);
        let mut coeff = 1.0_f64; // (am)_k (bm)_k / (k! (k+m)!) w^k, scaled by 1/m! below
        let mut sum = 0.0_f64;
        let mut converged = false;
        for k in 0..100_000 {
            let kf = k as f64;
            let bracket = ln_w - psi_k1 - psi_km1 + psi_a + psi_b;
            let term = coeff * bracket;
            sum += term;
            if term.abs() < TERM_EPS * sum.abs().max(1e-30) && k > 2 {
                converged = true;
                break;
            }
            coeff *= (am + kf) * (bm + kf) / ((kf + 1.0) * (kf + mf + 1.0)) * w;
            psi_k1 += 1.0 / (kf + 1.0);
            psi_km1 += 1.0 / (kf + mf + 1.0);
            psi_a += 1.0 / (am + kf);
            psi_b += 1.0 / (bm + kf);
        }
        if !converged {
            return Err(Error::NoConvergence(100_000));
        }
        // -(−w)^m = (−1)^{m+1} w^m ; 1/m! folded into the running coefficient start.
        let parity = if m % 2 == 0 { -1.0 } else { 1.0 };
        (
            parity * sg_a * sg_b * sum.signum(),
            ln_c - g_a - g_b + mf * ln_w - ln_gamma(mf + 1.0) + sum.abs().ln(),
        )
    };

    let (sign, ln_abs) = signed_log_sum(&[finite, log_part]);
    if sign <= 0.0 {
        return Err(Error::NoConvergence(0));
    }
    Ok(ln_abs)
}
