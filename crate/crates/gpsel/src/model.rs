//! Model space: the 2^p inclusion indicators, per-model design assembly and
//! the R²-type sufficient statistics under both model conventions.
//!
//! Convention M_γ keeps the intercept inside the projector (uncentered
//! ratio y'P y / y'y); convention M_inv centers response and covariates and
//! projects onto the centered columns.

use crate::data::{Column, Dataset, DesignMatrix};
use crate::linalg::{center, norm2_sq, qr_least_squares};
use crate::{Error, Result};

/// Inclusion indicator over p predictors with cached popcount.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelIndicator {
    bits: Vec<bool>,
    p_gamma: usize,
}

impl ModelIndicator {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let p_gamma = bits.iter().filter(|&&b| b).count();
        ModelIndicator { bits, p_gamma }
    }

    /// Indicator over `p` variables with the given 0-based indices active.
    pub fn from_indices(p: usize, active: &[usize]) -> Self {
        let mut bits = vec![false; p];
        for &i in active {
            bits[i] = true;
        }
        Self::from_bits(bits)
    }

    pub fn null(p: usize) -> Self {
        Self::from_bits(vec![false; p])
    }

    pub fn full(p: usize) -> Self {
        Self::from_bits(vec![true; p])
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of predictors in the universe.
    pub fn p(&self) -> usize {
        self.bits.len()
    }

    /// Number of active predictors.
    pub fn p_gamma(&self) -> usize {
        self.p_gamma
    }

    pub fn is_null(&self) -> bool {
        self.p_gamma == 0
    }

    pub fn active_indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Subset relation: every active bit of `self` is active in `other`.
    pub fn is_subset_of(&self, other: &ModelIndicator) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Display as a bit string, first variable leftmost.
    pub fn bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Human-readable label using the dataset's column names.
    pub fn label(&self, names: &[String]) -> String {
        if self.is_null() {
            return "<null>".into();
        }
        self.active_indices()
            .iter()
            .map(|&i| names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1)))
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// All admissible indicators in binary counting order: bit i of the counter
/// is variable i, so the sequence for p = 2 reads 00, 10, 01, 11.
/// Admissibility keeps p_γ + 1 <= n (full-rank fits) and an optional
/// explicit size cap.
pub fn enumerate_models(
    p: usize,
    n: usize,
    include_null: bool,
    max_size: Option<usize>,
) -> Result<Vec<ModelIndicator>> {
    const ENUMERATION_GUARD: usize = 25;
    if p > ENUMERATION_GUARD {
        return Err(Error::TooManyModels(p));
    }
    let cap = max_size.unwrap_or(p).min(n.saturating_sub(1)).min(p);
    let mut out = Vec::new();
    for code in 0u64..(1u64 << p) {
        let bits: Vec<bool> = (0..p).map(|i| code >> i & 1 == 1).collect();
        let gamma = ModelIndicator::from_bits(bits);
        if gamma.is_null() && !include_null {
            continue;
        }
        if gamma.p_gamma() > cap {
            continue;
        }
        out.push(gamma);
    }
    Ok(out)
}

/// Per-model sufficient statistics. The complements `omr2_*` are computed
/// directly from residual sums of squares so they stay meaningful when the
/// ratios approach 1.
#[derive(Debug, Clone, Copy)]
pub struct ModelStats {
    pub n: usize,
    pub p_gamma: usize,
    /// Residual sum of squares of the intercept-included fit.
    pub rss: f64,
    /// y'P y / y'y with the intercept column inside the projector.
    pub r2_uncentered: f64,
    pub omr2_uncentered: f64,
    /// Centered ratio (y-ȳ)'P (y-ȳ) / (y-ȳ)'(y-ȳ) over centered columns.
    pub r2_centered: f64,
    pub omr2_centered: f64,
}

/// Saturation threshold: ratios within 1e-12 of 1 are degenerate because
/// the posterior integrands diverge at r² = 1.
pub const SATURATION_EPS: f64 = 1e-12;

impl ModelStats {
    pub fn saturated_uncentered(&self) -> bool {
        self.omr2_uncentered <= SATURATION_EPS
    }

    pub fn saturated_centered(&self) -> bool {
        self.omr2_centered <= SATURATION_EPS
    }
}

/// Assemble the design for `gamma` under the uncentered convention
/// (intercept column plus active predictors).
pub fn design_for(data: &Dataset, gamma: &ModelIndicator) -> Result<DesignMatrix> {
    if gamma.p() != data.p() {
        return Err(Error::ShapeMismatch(format!(
            "indicator over {} variables, dataset has {}",
            gamma.p(),
            data.p()
        )));
    }
    let columns: Vec<Column> = gamma
        .active_indices()
        .into_iter()
        .map(|i| data.columns[i].clone())
        .collect();
    DesignMatrix::new(columns, data.n(), true)
}

/// Sufficient statistics for one model under both conventions.
pub fn model_stats(data: &Dataset, gamma: &ModelIndicator) -> Result<ModelStats> {
    let n = data.n();
    if gamma.p_gamma() + 1 > n {
        return Err(Error::ShapeMismatch(format!(
            "model with {} predictors inadmissible at n = {n}",
            gamma.p_gamma()
        )));
    }
    let y = &data.y;
    let yty = norm2_sq(y);
    if yty == 0.0 {
        return Err(Error::Domain("response is identically zero".into()));
    }
    let (yc, _) = center(y);
    let ycyc = norm2_sq(&yc);
    if ycyc == 0.0 {
        return Err(Error::Domain("response is constant".into()));
    }

    // Uncentered convention: intercept inside the projector.
    let x_unc = design_for(data, gamma)?.assemble()?;
    let fit = qr_least_squares(&x_unc, y)?;
    let rss = fit.rss;
    let omr2_uncentered = (rss / yty).clamp(0.0, 1.0);
    let r2_uncentered = 1.0 - omr2_uncentered;

    // Centered convention: project centered response on centered columns.
    let (r2_centered, omr2_centered) = if gamma.is_null() {
        (0.0, 1.0)
    } else {
        let centered_cols: Vec<Vec<f64>> = gamma
            .active_indices()
            .into_iter()
            .map(|i| center(&data.columns[i].values).0)
            .collect();
        let refs: Vec<&[f64]> = centered_cols.iter().map(|c| c.as_slice()).collect();
        let xc = crate::linalg::Mat::from_columns(&refs)?;
        let fit_c = qr_least_squares(&xc, &yc)?;
        let om = (fit_c.rss / ycyc).clamp(0.0, 1.0);
        (1.0 - om, om)
    };

    Ok(ModelStats {
        n,
        p_gamma: gamma.p_gamma(),
        rss,
        r2_uncentered,
        omr2_uncentered,
        r2_centered,
        omr2_centered,
    })
}
