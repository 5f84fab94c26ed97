//! Variable-selection methods: log-marginals and criteria for the whole
//! g-prior roster plus AIC/BIC, posterior model probabilities under a
//! uniform prior over the admissible model set, MAP selection, and
//! model-averaged prediction.

mod scores;

pub use scores::{
    bric_g, eb_global_g, eb_local_g, information_criterion_score, score_eb, score_fixed_g,
    score_hyper_g, score_information_criterion, score_nims, score_zellner_siow, shrinkage_hyper_g,
    shrinkage_nims, shrinkage_zs, zs_log_bf_null, EbMode, IcKind, ZsBase,
};
pub(crate) use scores::log_sum_exp;

use crate::data::{Dataset, DesignMatrix};
use crate::linalg::{center, qr_least_squares, Mat};
use crate::model::{design_for, enumerate_models, model_stats, ModelIndicator, ModelStats};
use crate::{Error, Result};

/// Which model convention a method scores under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Intercept inside the g-prior and the projector (not location
    /// invariant).
    MGamma,
    /// Centered covariates, flat prior on the intercept (location
    /// invariant).
    MInv,
}

/// Every method the benchmark engine knows how to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Oracle,
    Aic,
    Bic,
    Bric,
    FixedG { g: f64 },
    EbLocal,
    EbGlobal,
    ZsNull,
    ZsFull,
    HyperG { a: f64 },
    Nims,
    Lasso,
    Dantzig,
    Enet,
}

impl Method {
    /// Canonical display name, matching the benchmark tables.
    pub fn name(&self) -> String {
        match self {
            Method::Oracle => "ORACLE".into(),
            Method::Aic => "AIC".into(),
            Method::Bic => "BIC".into(),
            Method::Bric => "BRIC".into(),
            Method::FixedG { g } => format!("G({g})"),
            Method::EbLocal => "EB-L".into(),
            Method::EbGlobal => "EB-G".into(),
            Method::ZsNull => "ZS-N".into(),
            Method::ZsFull => "ZS-F".into(),
            Method::HyperG { a } => format!("HG-{a}"),
            Method::Nims => "NIMS".into(),
            Method::Lasso => "LASSO".into(),
            Method::Dantzig => "DZ".into(),
            Method::Enet => "ENET".into(),
        }
    }

    /// Parse a user-supplied method name.
    pub fn parse(name: &str) -> Result<Method> {
        let up = name.trim().to_uppercase().replace('_', "-");
        let m = match up.as_str() {
            "ORACLE" => Method::Oracle,
            "AIC" => Method::Aic,
            "BIC" => Method::Bic,
            "BRIC" => Method::Bric,
            "EB-L" | "EBL" => Method::EbLocal,
            "EB-G" | "EBG" => Method::EbGlobal,
            "ZS-N" | "ZSN" => Method::ZsNull,
            "ZS-F" | "ZSF" => Method::ZsFull,
            "HG-2" | "HG2" => Method::HyperG { a: 2.0 },
            "HG-3" | "HG3" => Method::HyperG { a: 3.0 },
            "HG-4" | "HG4" => Method::HyperG { a: 4.0 },
            "NIMS" => Method::Nims,
            "LASSO" => Method::Lasso,
            "DZ" | "DANTZIG" => Method::Dantzig,
            "ENET" => Method::Enet,
            _ => return Err(Error::UnknownMethod(name.to_string())),
        };
        Ok(m)
    }

    /// The full roster, in report order. ORACLE is included only when the
    /// generating truth is known.
    pub fn all(truth_known: bool) -> Vec<Method> {
        let mut v = Vec::new();
        if truth_known {
            v.push(Method::Oracle);
        }
        v.extend([
            Method::Aic,
            Method::Bic,
            Method::Bric,
            Method::EbLocal,
            Method::EbGlobal,
            Method::ZsNull,
            Method::ZsFull,
            Method::HyperG { a: 3.0 },
            Method::HyperG { a: 4.0 },
            Method::HyperG { a: 2.0 },
            Method::Nims,
            Method::Lasso,
            Method::Dantzig,
            Method::Enet,
        ]);
        v
    }

    pub fn is_regularizer(&self) -> bool {
        matches!(self, Method::Lasso | Method::Dantzig | Method::Enet)
    }

    /// Posterior-based methods (scored over the enumerated model space).
    pub fn is_model_scoring(&self) -> bool {
        !self.is_regularizer() && !matches!(self, Method::Oracle)
    }

    /// g-prior family members (the "Bayesian block" of the reports).
    pub fn is_bayesian(&self) -> bool {
        matches!(
            self,
            Method::Bric
                | Method::FixedG { .. }
                | Method::EbLocal
                | Method::EbGlobal
                | Method::ZsNull
                | Method::ZsFull
                | Method::HyperG { .. }
                | Method::Nims
        )
    }

    pub fn convention(&self) -> Option<Convention> {
        match self {
            Method::Nims => Some(Convention::MGamma),
            Method::Aic | Method::Bic => Some(Convention::MGamma),
            Method::Bric
            | Method::FixedG { .. }
            | Method::EbLocal
            | Method::EbGlobal
            | Method::ZsNull
            | Method::ZsFull
            | Method::HyperG { .. } => Some(Convention::MInv),
            _ => None,
        }
    }

    /// HG-2 excludes the null model; everything else keeps it.
    pub fn includes_null(&self) -> bool {
        !matches!(self, Method::HyperG { a } if *a == 2.0)
    }
}

/// Score of one model: unnormalized log-marginal (or −criterion/2),
/// normalized posterior probability, and the shrinkage multiplier used by
/// model-averaged prediction.
#[derive(Debug, Clone)]
pub struct ModelScore {
    pub gamma: ModelIndicator,
    pub log_marginal: f64,
    pub posterior_prob: f64,
    pub shrinkage: Option<f64>,
}

/// Full scoring outcome over the admissible model space.
#[derive(Debug, Clone)]
pub struct Selection {
    pub method: Method,
    pub scores: Vec<ModelScore>,
    pub map_index: usize,
    /// Saturated or otherwise unscorable models, excluded from the posterior.
    pub degenerate: Vec<ModelIndicator>,
    /// Shared global-EB estimate of g when the method defines one.
    pub eb_g: Option<f64>,
}

impl Selection {
    pub fn map(&self) -> &ModelIndicator {
        &self.scores[self.map_index].gamma
    }

    /// Highest-probability models, most probable first.
    pub fn top_k(&self, k: usize) -> Vec<&ModelScore> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&i, &j| {
            self.scores[j]
                .posterior_prob
                .total_cmp(&self.scores[i].posterior_prob)
                .then_with(|| self.scores[i].gamma.p_gamma().cmp(&self.scores[j].gamma.p_gamma()))
        });
        idx.into_iter().take(k).map(|i| &self.scores[i]).collect()
    }
}

/// Softmax of log scores in log-sum-exp form (uniform prior over models).
pub fn normalize_posterior(log_scores: &[f64]) -> Result<Vec<f64>> {
    if !log_scores.iter().any(|v| v.is_finite()) {
        return Err(Error::AllDegenerate);
    }
    let lse = log_sum_exp(log_scores);
    Ok(log_scores.iter().map(|v| (v - lse).exp()).collect())
}

/// Index of the MAP model: highest posterior probability, ties broken by
/// smaller model size, then lexicographic bit order.
pub fn map_model(scores: &[ModelScore]) -> usize {
    let mut best = 0;
    for i in 1..scores.len() {
        let (a, b) = (&scores[i], &scores[best]);
        let better = match a.posterior_prob.total_cmp(&b.posterior_prob) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => match a.gamma.p_gamma().cmp(&b.gamma.p_gamma()) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => a.gamma.bits() < b.gamma.bits(),
            },
        };
        if better {
            best = i;
        }
    }
    best
}

/// Score the whole admissible model space of `data` under `method`.
/// Saturated models are excluded from the posterior and reported in
/// `degenerate`.
pub fn score_models(data: &Dataset, method: &Method) -> Result<Selection> {
    if !method.is_model_scoring() {
        return Err(Error::Domain(format!(
            "{} does not score the model space",
            method.name()
        )));
    }
    let n = data.n();
    let p = data.p();
    let models = enumerate_models(p, n, method.includes_null(), None)?;

    let mut kept: Vec<(ModelIndicator, ModelStats)> = Vec::with_capacity(models.len());
    let mut degenerate = Vec::new();
    for gamma in models {
        match model_stats(data, &gamma) {
            Ok(stats) => {
                let saturated = match method.convention() {
                    Some(Convention::MGamma) => stats.saturated_uncentered(),
                    _ => stats.saturated_centered(),
                };
                if saturated {
                    degenerate.push(gamma);
                } else {
                    kept.push((gamma, stats));
                }
            }
            Err(Error::RankDeficient { .. }) => degenerate.push(gamma),
            Err(e) => return Err(e),
        }
    }
    if kept.is_empty() {
        return Err(Error::AllDegenerate);
    }

    let mut eb_g = None;
    let full_stats = match method {
        Method::ZsFull => Some(model_stats(data, &ModelIndicator::full(p))?),
        _ => None,
    };

    let scored: Vec<(f64, Option<f64>)> = match method {
        Method::Nims => kept
            .iter()
            .map(|(_, s)| Ok((score_nims(s, n)?, Some(shrinkage_nims(s, n)?))))
            .collect::<Result<_>>()?,
        Method::HyperG { a } => kept
            .iter()
            .map(|(_, s)| Ok((score_hyper_g(s, n, *a)?, Some(shrinkage_hyper_g(s, n, *a)?))))
            .collect::<Result<_>>()?,
        Method::Bric => {
            let g = bric_g(n, p);
            kept.iter()
                .map(|(_, s)| Ok((score_fixed_g(s, n, g)?, Some(g / (g + 1.0)))))
                .collect::<Result<_>>()?
        }
        Method::FixedG { g } => kept
            .iter()
            .map(|(_, s)| Ok((score_fixed_g(s, n, *g)?, Some(g / (g + 1.0)))))
            .collect::<Result<_>>()?,
        Method::EbLocal | Method::EbGlobal => {
            let mode = if matches!(method, Method::EbLocal) {
                EbMode::Local
            } else {
                EbMode::Global
            };
            let stats_only: Vec<ModelStats> = kept.iter().map(|(_, s)| *s).collect();
            let pairs = score_eb(&stats_only, n, mode)?;
            if matches!(method, Method::EbGlobal) {
                eb_g = pairs.first().map(|(_, g)| *g);
            }
            pairs
                .into_iter()
                .map(|(score, g)| (score, Some(g / (g + 1.0))))
                .collect()
        }
        Method::ZsNull | Method::ZsFull => {
            let base = if matches!(method, Method::ZsNull) {
                ZsBase::Null
            } else {
                ZsBase::Full
            };
            kept.iter()
                .map(|(_, s)| {
                    Ok((
                        score_zellner_siow(s, n, base, full_stats.as_ref())?,
                        Some(shrinkage_zs(s, n)?),
                    ))
                })
                .collect::<Result<_>>()?
        }
        Method::Aic | Method::Bic => {
            let kind = if matches!(method, Method::Aic) {
                IcKind::Aic
            } else {
                IcKind::Bic
            };
            kept.iter()
                .map(|(_, s)| Ok((information_criterion_score(s.rss, n, s.p_gamma, kind)?, Some(1.0))))
                .collect::<Result<_>>()?
        }
        _ => unreachable!("non-scoring methods rejected above"),
    };

    let log_scores: Vec<f64> = scored.iter().map(|(s, _)| *s).collect();
    let probs = normalize_posterior(&log_scores)?;
    let scores: Vec<ModelScore> = kept
        .into_iter()
        .zip(scored)
        .zip(probs)
        .map(|(((gamma, _), (log_marginal, shrinkage)), posterior_prob)| ModelScore {
            gamma,
            log_marginal,
            posterior_prob,
            shrinkage,
        })
        .collect();
    let map_index = map_model(&scores);
    Ok(Selection {
        method: *method,
        scores,
        map_index,
        degenerate,
        eb_g,
    })
}

/// Per-model ordinary least squares on the convention the method uses,
/// baked into a prediction closure over new rows.
fn model_predictor(
    data: &Dataset,
    gamma: &ModelIndicator,
    convention: Convention,
    x_new: &DesignMatrix,
) -> Result<Vec<f64>> {
    match convention {
        Convention::MGamma => {
            let x = design_for(data, gamma)?.assemble()?;
            let fit = qr_least_squares(&x, &data.y)?;
            let idx = gamma.active_indices();
            let q = x_new.columns.first().map_or(x_new.n, |c| c.values.len());
            let mut out = vec![fit.coefficients[0]; q];
            for (k, &j) in idx.iter().enumerate() {
                let beta = fit.coefficients[k + 1];
                for (o, v) in out.iter_mut().zip(&x_new.columns[j].values) {
                    *o += beta * v;
                }
            }
            Ok(out)
        }
        Convention::MInv => {
            let (yc, _) = center(&data.y);
            let idx = gamma.active_indices();
            let q = x_new.columns.first().map_or(x_new.n, |c| c.values.len());
            if idx.is_empty() {
                return Ok(vec![0.0; q]);
            }
            let centered: Vec<(Vec<f64>, f64)> = idx
                .iter()
                .map(|&j| center(&data.columns[j].values))
                .collect();
            let refs: Vec<&[f64]> = centered.iter().map(|(c, _)| c.as_slice()).collect();
            let xc = Mat::from_columns(&refs)?;
            let fit = qr_least_squares(&xc, &yc)?;
            let mut out = vec![0.0; q];
            for (k, &j) in idx.iter().enumerate() {
                let beta = fit.coefficients[k];
                let mean = centered[k].1;
                for (o, v) in out.iter_mut().zip(&x_new.columns[j].values) {
                    *o += beta * (v - mean);
                }
            }
            Ok(out)
        }
    }
}

/// Model-averaged prediction: Σ_γ π(γ|X,y) · shrink(γ) · fit_γ(new rows),
/// with the intercept handled per convention (for the centered convention
/// E[α|X,γ,y] = ȳ is added once).
pub fn bma_predict(
    selection: &Selection,
    data: &Dataset,
    x_new: &DesignMatrix,
) -> Result<Vec<f64>> {
    if x_new.columns.len() != data.p() {
        return Err(Error::ShapeMismatch(format!(
            "new design has {} predictors, training data has {}",
            x_new.columns.len(),
            data.p()
        )));
    }
    let convention = selection
        .method
        .convention()
        .ok_or_else(|| Error::Domain("method has no model-space convention".into()))?;
    let q = x_new.columns.first().map_or(x_new.n, |c| c.values.len());
    let mut out = vec![0.0; q];
    for score in &selection.scores {
        if score.posterior_prob == 0.0 {
            continue;
        }
        let shrink = score.shrinkage.unwrap_or(1.0);
        let fit = model_predictor(data, &score.gamma, convention, x_new)?;
        let w = score.posterior_prob * shrink;
        for (o, f) in out.iter_mut().zip(fit) {
            *o += w * f;
        }
    }
    if convention == Convention::MInv {
        let ybar = data.y.iter().sum::<f64>() / data.n() as f64;
        for o in out.iter_mut() {
            *o += ybar;
        }
    }
    Ok(out)
}

/// Prediction rule per method: model averaging for the g-prior family,
/// the single criterion-selected model for AIC/BIC.
pub fn predict(selection: &Selection, data: &Dataset, x_new: &DesignMatrix) -> Result<Vec<f64>> {
    match selection.method {
        Method::Aic | Method::Bic => {
            model_predictor(data, selection.map(), Convention::MGamma, x_new)
        }
        _ => bma_predict(selection, data, x_new),
    }
}

/// OLS prediction from a fixed support (the ORACLE row and the shift probe
/// both use it).
pub fn ols_predict(
    data: &Dataset,
    gamma: &ModelIndicator,
    x_new: &DesignMatrix,
) -> Result<Vec<f64>> {
    model_predictor(data, gamma, Convention::MGamma, x_new)
}

#[cfg(test)]
mod tests;
