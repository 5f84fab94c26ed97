//! Per-method log-marginal scores, shrinkage factors and the 1-D empirical
//! Bayes maximization.
//!
//! All closed forms run on the complements 1−r² carried by `ModelStats`, so
//! they remain accurate arbitrarily close to saturation. Every ₂F₁ closed
//! form here has an independent quadrature route in `special`; the test
//! suites hold the two within 1e-6 of each other on posterior odds.

use crate::linalg::LsqFit;
use crate::model::ModelStats;
use crate::special::{log_integral_01, QuadOpts};
use crate::special::log_hyp2f1_cpl;
use crate::{Error, Result};

/// Log-marginal of the Jeffreys-prior selector on the uncentered model:
/// ln [ ₂F₁(n/2, 1; (p_γ+3)/2; y'P y/y'y) / (p_γ+1) ].
pub fn score_nims(stats: &ModelStats, n: usize) -> Result<f64> {
    if stats.saturated_uncentered() {
        return Err(Error::DegenerateModel);
    }
    if n <= stats.p_gamma + 3 {
        return Err(Error::Integrability {
            n,
            p_gamma: stats.p_gamma,
        });
    }
    let pf = stats.p_gamma as f64;
    let lf = log_hyp2f1_cpl(
        n as f64 / 2.0,
        1.0,
        (pf + 3.0) / 2.0,
        stats.r2_uncentered,
        stats.omr2_uncentered,
    )?;
    Ok(lf - (pf + 1.0).ln())
}

/// Posterior expectation of g/(g+1) under the Jeffreys prior:
/// 2·₂F₁(n/2, 2; (p_γ+3)/2+1; r²) / [(p_γ+3)·₂F₁(n/2, 1; (p_γ+3)/2; r²)].
pub fn shrinkage_nims(stats: &ModelStats, n: usize) -> Result<f64> {
    if stats.saturated_uncentered() {
        return Err(Error::DegenerateModel);
    }
    let pf = stats.p_gamma as f64;
    let nf = n as f64 / 2.0;
    let num = log_hyp2f1_cpl(
        nf,
        2.0,
        (pf + 3.0) / 2.0 + 1.0,
        stats.r2_uncentered,
        stats.omr2_uncentered,
    )?;
    let den = log_hyp2f1_cpl(
        nf,
        1.0,
        (pf + 3.0) / 2.0,
        stats.r2_uncentered,
        stats.omr2_uncentered,
    )?;
    let s = (2.0_f64.ln() - (pf + 3.0).ln() + num - den).exp();
    Ok(s.clamp(f64::MIN_POSITIVE, 1.0 - 1e-16))
}

/// Hyper-g log-marginal on the centered model. a = 2 is the location-scale
/// invariant member and requires the null model to be excluded; a > 2 uses
/// the proper hyperprior with normalizing constant (a−2)/2.
pub fn score_hyper_g(stats: &ModelStats, n: usize, a: f64) -> Result<f64> {
    if a < 2.0 {
        return Err(Error::Domain(format!("hyper-g requires a >= 2, got {a}")));
    }
    if stats.saturated_centered() {
        return Err(Error::DegenerateModel);
    }
    let pf = stats.p_gamma as f64;
    let nf = (n as f64 - 1.0) / 2.0;
    if a == 2.0 {
        if stats.p_gamma == 0 {
            return Err(Error::NullModelNotAllowed);
        }
        let lf = log_hyp2f1_cpl(
            nf,
            1.0,
            (pf + 2.0) / 2.0,
            stats.r2_centered,
            stats.omr2_centered,
        )?;
        Ok(lf - pf.ln())
    } else {
        let lf = log_hyp2f1_cpl(
            nf,
            1.0,
            (pf + a) / 2.0,
            stats.r2_centered,
            stats.omr2_centered,
        )?;
        Ok((a - 2.0).ln() - (pf + a - 2.0).ln() + lf)
    }
}

/// E[g/(1+g)] under the hyper-g posterior: 2/(p_γ+a) times the ratio of the
/// b = 2 to the b = 1 hypergeometric value.
pub fn shrinkage_hyper_g(stats: &ModelStats, n: usize, a: f64) -> Result<f64> {
    if stats.saturated_centered() {
        return Err(Error::DegenerateModel);
    }
    let pf = stats.p_gamma as f64;
    let nf = (n as f64 - 1.0) / 2.0;
    let c = (pf + a) / 2.0;
    let num = log_hyp2f1_cpl(nf, 2.0, c + 1.0, stats.r2_centered, stats.omr2_centered)?;
    let den = log_hyp2f1_cpl(nf, 1.0, c, stats.r2_centered, stats.omr2_centered)?;
    let s = (2.0_f64.ln() - (pf + a).ln() + num - den).exp();
    Ok(s.clamp(f64::MIN_POSITIVE, 1.0 - 1e-16))
}

/// Fixed-g log Bayes factor against the null model (centered convention):
/// ((n−1−p_γ)/2)·ln(1+g) − ((n−1)/2)·ln(1+g(1−r²)).
pub fn score_fixed_g(stats: &ModelStats, n: usize, g: f64) -> Result<f64> {
    if g < 0.0 {
        return Err(Error::Domain(format!("fixed-g requires g >= 0, got {g}")));
    }
    if stats.saturated_centered() {
        return Err(Error::DegenerateModel);
    }
    let pf = stats.p_gamma as f64;
    let nf = n as f64;
    Ok((nf - 1.0 - pf) / 2.0 * (1.0 + g).ln()
        - (nf - 1.0) / 2.0 * (1.0 + g * stats.omr2_centered).ln())
}

/// Benchmark-prior value of g.
pub fn bric_g(n: usize, p: usize) -> f64 {
    (n as f64).max((p * p) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcKind {
    Aic,
    Bic,
}

/// AIC/BIC as pseudo log-marginals: −criterion/2 with
/// criterion = n·ln(rss/n) + penalty·(p_γ+2), counting intercept and
/// variance among the parameters.
pub fn information_criterion_score(rss: f64, n: usize, p_gamma: usize, kind: IcKind) -> Result<f64> {
    if rss <= f64::MIN_POSITIVE {
        return Err(Error::ZeroResidual);
    }
    let nf = n as f64;
    let penalty = match kind {
        IcKind::Aic => 2.0,
        IcKind::Bic => nf.ln(),
    };
    let k = (p_gamma + 2) as f64;
    let criterion = nf * (rss / nf).ln() + penalty * k;
    Ok(-criterion / 2.0)
}

/// Wrapper over a finished least-squares fit (intercept included in the
/// coefficient count).
pub fn score_information_criterion(fit: &LsqFit, n: usize, kind: IcKind) -> Result<f64> {
    information_criterion_score(fit.rss, n, fit.coefficients.len().saturating_sub(1), kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbMode {
    Local,
    Global,
}

/// Local EB plug-in: ĝ_γ = max(F_γ − 1, 0) with
/// F_γ = (r²/p_γ) / ((1−r²)/(n−1−p_γ)); the null model takes ĝ = 0.
pub fn eb_local_g(stats: &ModelStats, n: usize) -> Result<f64> {
    if stats.p_gamma == 0 {
        return Ok(0.0);
    }
    let dof = n as f64 - 1.0 - stats.p_gamma as f64;
    if dof <= 0.0 || stats.saturated_centered() {
        return Err(Error::DegenerateModel);
    }
    let f = (stats.r2_centered / stats.p_gamma as f64) / (stats.omr2_centered / dof);
    Ok((f - 1.0).max(0.0))
}

/// Score every model under empirical Bayes. Returns per-model
/// (score, ĝ) pairs; under `Global` the ĝ is shared and maximizes the sum
/// of fixed-g marginals over g ∈ [0, 1e8].
pub fn score_eb(stats_all: &[ModelStats], n: usize, mode: EbMode) -> Result<Vec<(f64, f64)>> {
    match mode {
        EbMode::Local => stats_all
            .iter()
            .map(|s| {
                let g = eb_local_g(s, n)?;
                Ok((score_fixed_g(s, n, g)?, g))
            })
            .collect(),
        EbMode::Global => {
            let g = eb_global_g(stats_all, n)?;
            stats_all
                .iter()
                .map(|s| Ok((score_fixed_g(s, n, g)?, g)))
                .collect()
        }
    }
}

/// Log of the EB-global objective Σ_γ exp(score_fixed_g(γ, g)).
fn log_eb_objective(stats_all: &[ModelStats], n: usize, g: f64) -> f64 {
    let scores: Vec<f64> = stats_all
        .iter()
        .filter_map(|s| score_fixed_g(s, n, g).ok())
        .collect();
    log_sum_exp(&scores)
}

pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Bracketed 1-D maximization of the EB-global objective on u = ln(1+g):
/// coarse grid scan to bracket, then golden-section refinement.
pub fn eb_global_g(stats_all: &[ModelStats], n: usize) -> Result<f64> {
    const G_MAX: f64 = 1e8;
    let u_max = (1.0 + G_MAX).ln();
    let grid = 400;
    let h = |u: f64| log_eb_objective(stats_all, n, u.exp_m1());
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..=grid {
        let u = u_max * i as f64 / grid as f64;
        let v = h(u);
        if v > best.1 {
            best = (i, v);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::OptimizationFailure(
            "EB objective not finite anywhere on the bracket".into(),
        ));
    }
    let lo = u_max * best.0.saturating_sub(1) as f64 / grid as f64;
    let hi = u_max * (best.0 + 1).min(grid) as f64 / grid as f64;
    let (mut a, mut b) = (lo, hi);
    if !(b > a) {
        return Err(Error::OptimizationFailure("bracket collapsed".into()));
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (h(c), h(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 * u_max.max(1.0) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = h(d);
        }
    }
    let u = 0.5 * (a + b);
    Ok(u.exp_m1().max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZsBase {
    Null,
    Full,
}

/// ln BF(γ : null) under the Cauchy coefficient prior, i.e. the g-prior
/// mixed over the Ga(1/2, n/2) prior on 1/g:
/// ∫₀^∞ (1+g)^{(n−1−p_γ)/2} (1+g(1−r²))^{−(n−1)/2}
///        √(n/2)/Γ(1/2) · g^{−3/2} e^{−n/(2g)} dg,
/// evaluated on t = g/(1+g) ∈ (0,1). The prior is proper, so the null model
/// gives exactly 0.
pub fn zs_log_bf_null(stats: &ModelStats, n: usize) -> Result<f64> {
    if stats.p_gamma == 0 {
        return Ok(0.0);
    }
    if stats.saturated_centered() {
        return Err(Error::DegenerateModel);
    }
    zs_integral(stats, n, false)
}

/// E[g/(1+g)] under the Zellner–Siow posterior for one model, as a ratio of
/// two quadratures.
pub fn shrinkage_zs(stats: &ModelStats, n: usize) -> Result<f64> {
    if stats.saturated_centered() {
        return Err(Error::DegenerateModel);
    }
    let num = zs_integral(stats, n, true)?;
    let den = zs_integral(stats, n, false)?;
    Ok((num - den).exp().clamp(f64::MIN_POSITIVE, 1.0 - 1e-16))
}

fn zs_integral(stats: &ModelStats, n: usize, weight_t: bool) -> Result<f64> {
    let nf = n as f64;
    let pf = stats.p_gamma as f64;
    let omr2 = stats.omr2_centered;
    let ln_const = 0.5 * (nf / (2.0 * std::f64::consts::PI)).ln();
    let sigma = (pf - 1.0) / 2.0;
    let nu = if sigma >= 2.0 {
        1
    } else {
        (3.0 / (1.0 + sigma)).ceil().max(1.0) as u32
    };
    let ln_f = move |t: f64, omt: f64| -> f64 {
        if t <= 0.0 || omt <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let base = ln_const + sigma * omt.ln() - 1.5 * t.ln()
            - (nf - 1.0) / 2.0 * (omt + t * omr2).ln()
            - nf * omt / (2.0 * t);
        if weight_t {
            base + t.ln()
        } else {
            base
        }
    };
    log_integral_01(ln_f, nu, QuadOpts::default())
        .map_err(|e| Error::QuadratureFailure(format!("zellner-siow marginal: {e}")))
}

/// Bayes factor against the chosen base model. `Full` requires the full
/// model's statistics and scores γ by BF(γ:null)/BF(full:null).
pub fn score_zellner_siow(
    stats: &ModelStats,
    n: usize,
    base: ZsBase,
    full: Option<&ModelStats>,
) -> Result<f64> {
    let bf = zs_log_bf_null(stats, n)?;
    match base {
        ZsBase::Null => Ok(bf),
        ZsBase::Full => {
            let full_stats = full.ok_or_else(|| {
                Error::ShapeMismatch("full-model statistics required for the full base".into())
            })?;
            Ok(bf - zs_log_bf_null(full_stats, n)?)
        }
    }
}
