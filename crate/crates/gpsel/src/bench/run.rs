//! Replicated benchmark protocols. Replicates are independent work units
//! keyed only by (seed, example id, replicate index), so reports do not
//! depend on scheduling order or worker count.

use rayon::prelude::*;

use super::{generate_example, BenchmarkReport, Metrics, MethodSummary, SimExample};
use crate::data::{Dataset, DesignMatrix};
use crate::linalg::{center, norm2_sq, qr_least_squares};
use crate::model::{design_for, ModelIndicator};
use crate::regularizer::{tune, FoldScheme};
use crate::rng::{derive, mix, Purpose};
use crate::selector::{ols_predict, predict, score_models, Method};
use crate::{Error, Result};
use rand::seq::SliceRandom;

/// Outcome of one method on one replicate.
struct MethodRep {
    mse: f64,
    selected: Vec<bool>,
}

fn rmse(truth: &[f64], pred: &[f64]) -> f64 {
    let n = truth.len() as f64;
    (truth
        .iter()
        .zip(pred)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n)
        .sqrt()
}

/// Run one method on a prepared train/test pair, returning the selected
/// support and the test root-mean-squared prediction error.
fn run_method(
    method: &Method,
    train: &Dataset,
    test: &Dataset,
    truth: Option<&ModelIndicator>,
    cv: FoldScheme,
) -> Result<MethodRep> {
    let x_new = DesignMatrix::from_dataset(test);
    let (selected, pred) = match method {
        Method::Oracle => {
            let gamma = truth
                .ok_or_else(|| Error::Domain("ORACLE requires a known truth support".into()))?
                .clone();
            let pred = ols_predict(train, &gamma, &x_new)?;
            (gamma, pred)
        }
        Method::Lasso | Method::Dantzig | Method::Enet => {
            let fit = tune(train, method, cv)?;
            let pred = fit.predict(&x_new)?;
            (fit.support, pred)
        }
        _ => {
            let sel = score_models(train, method)?;
            let pred = predict(&sel, train, &x_new)?;
            (sel.map().clone(), pred)
        }
    };
    Ok(MethodRep {
        mse: rmse(&test.y, &pred),
        selected: selected.bits().to_vec(),
    })
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Fold per-replicate outcomes into report rows. `truth = None` marks the
/// real-data protocol (no HITS/FP columns).
fn summarize(
    methods: &[Method],
    reps_out: Vec<Vec<Result<MethodRep>>>,
    truth: Option<&ModelIndicator>,
    p: usize,
) -> Result<Vec<MethodSummary>> {
    let total = reps_out.len();
    let mut rows = Vec::with_capacity(methods.len());
    for (mi, method) in methods.iter().enumerate() {
        let mut mses = Vec::new();
        let mut hits = Vec::new();
        let mut fps = Vec::new();
        let mut freq = vec![0.0_f64; p];
        let mut failures = 0usize;
        for rep in &reps_out {
            match &rep[mi] {
                Ok(out) => {
                    mses.push(out.mse);
                    for (f, &sel) in freq.iter_mut().zip(&out.selected) {
                        if sel {
                            *f += 1.0;
                        }
                    }
                    if let Some(truth) = truth {
                        let tbits = truth.bits();
                        let h = out
                            .selected
                            .iter()
                            .zip(tbits)
                            .filter(|(&s, &t)| s && t)
                            .count();
                        let f = out
                            .selected
                            .iter()
                            .zip(tbits)
                            .filter(|(&s, &t)| s && !t)
                            .count();
                        hits.push(h as f64);
                        fps.push(f as f64);
                    }
                }
                Err(_) => failures += 1,
            }
        }
        if failures * 20 > total {
            return Err(Error::ReplicateFailure {
                failed: failures,
                total,
            });
        }
        let ok = mses.len().max(1) as f64;
        for f in freq.iter_mut() {
            *f /= ok;
        }
        let (mse, mse_se) = mean_se(&mses);
        let metrics = match truth {
            Some(t) => {
                let (fp, fp_se) = mean_se(&fps);
                if t.is_null() {
                    // Null-truth layout: HITS column absent.
                    Metrics {
                        mse,
                        mse_se,
                        hits: None,
                        hits_se: None,
                        fp: Some(fp),
                        fp_se: Some(fp_se),
                    }
                } else {
                    let (h, h_se) = mean_se(&hits);
                    Metrics {
                        mse,
                        mse_se,
                        hits: Some(h),
                        hits_se: Some(h_se),
                        fp: Some(fp),
                        fp_se: Some(fp_se),
                    }
                }
            }
            None => Metrics {
                mse,
                mse_se,
                hits: None,
                hits_se: None,
                fp: None,
                fp_se: None,
            },
        };
        rows.push(MethodSummary {
            method: method.name(),
            metrics,
            freqs: freq,
            failures,
        });
    }
    Ok(rows)
}

/// The replicated simulated-data protocol: every method sees the same
/// per-replicate draws; selection quality is counted against the generating
/// support and prediction error on the paired test set.
pub fn run_replicates(
    ex: &SimExample,
    methods: &[Method],
    n: usize,
    n_test: usize,
    reps: usize,
    seed: u64,
) -> Result<BenchmarkReport> {
    if reps == 0 {
        return Err(Error::Domain("need at least one replicate".into()));
    }
    let truth = ex.truth_support();
    let reps_out: Vec<Vec<Result<MethodRep>>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = mix(seed, ex.id as u64, rep as u64);
            let (train, test) = generate_example(ex, n, n_test, rep_seed);
            methods
                .iter()
                .map(|m| run_method(m, &train, &test, Some(&truth), FoldScheme::LeaveOneOut))
                .collect()
        })
        .collect();
    let rows = summarize(methods, reps_out, Some(&truth), ex.p)?;
    Ok(BenchmarkReport {
        title: format!("example {} ({} train / {} test)", ex.id, n, n_test),
        var_names: (1..=ex.p).map(|j| format!("x{j}")).collect(),
        rows,
        reps,
        seed,
    })
}

/// Translation probe: shift the response (train and paired test) by
/// 10^k times the full-model regression sum of squares of the training
/// draw, then measure how selection degrades. The target method is the
/// non-location-invariant Jeffreys selector.
pub fn shift_probe(
    ex: &SimExample,
    k_values: &[u32],
    n: usize,
    n_test: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<(u32, BenchmarkReport)>> {
    shift_probe_with_method(ex, &Method::Nims, k_values, n, n_test, reps, seed)
}

/// Probe body, parameterized over the method so invariance control arms can
/// reuse it in tests.
pub(crate) fn shift_probe_with_method(
    ex: &SimExample,
    method: &Method,
    k_values: &[u32],
    n: usize,
    n_test: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<(u32, BenchmarkReport)>> {
    let truth = ex.truth_support();
    let methods = vec![*method];
    let mut out = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let reps_out: Vec<Vec<Result<MethodRep>>> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let rep_seed = mix(seed, ex.id as u64, rep as u64);
                let (train, test) = generate_example(ex, n, n_test, rep_seed);
                let run = || -> Result<MethodRep> {
                    // Regression sum of squares of the full-model training
                    // fit: centered total SS minus full-model residual SS.
                    let x_full = design_for(&train, &ModelIndicator::full(ex.p))?.assemble()?;
                    let rss_full = qr_least_squares(&x_full, &train.y)?.rss;
                    let (yc, _) = center(&train.y);
                    let reg_ss = (norm2_sq(&yc) - rss_full).max(0.0);
                    let shift = 10.0_f64.powi(k as i32) * reg_ss;
                    let train = train
                        .with_response(train.y.iter().map(|v| v + shift).collect())?;
                    let test =
                        test.with_response(test.y.iter().map(|v| v + shift).collect())?;
                    run_method(&methods[0], &train, &test, Some(&truth), FoldScheme::LeaveOneOut)
                };
                vec![run()]
            })
            .collect();
        let rows = summarize(&methods, reps_out, Some(&truth), ex.p)?;
        out.push((
            k,
            BenchmarkReport {
                title: format!("example {} shifted by 10^{k} x regression SS", ex.id),
                var_names: (1..=ex.p).map(|j| format!("x{j}")).collect(),
                rows,
                reps,
                seed,
            },
        ));
    }
    Ok(out)
}

/// Repeated random-split protocol for a real dataset: per split, fit every
/// method on `n_train` rows, record the selected variables and the test
/// error. Frequentist tuning uses 10-fold cross-validation here.
pub fn real_data_protocol(
    data: &Dataset,
    n_train: usize,
    n_test: usize,
    splits: usize,
    methods: &[Method],
    seed: u64,
) -> Result<BenchmarkReport> {
    if n_train + n_test != data.n() {
        return Err(Error::ShapeMismatch(format!(
            "train {} + test {} != {} rows",
            n_train,
            n_test,
            data.n()
        )));
    }
    if splits == 0 {
        return Err(Error::Domain("need at least one split".into()));
    }
    if methods.iter().any(|m| matches!(m, Method::Oracle)) {
        return Err(Error::Domain(
            "ORACLE requires a known generating truth; not available on real data".into(),
        ));
    }
    let reps_out: Vec<Vec<Result<MethodRep>>> = (0..splits)
        .into_par_iter()
        .map(|s| {
            let mut idx: Vec<usize> = (0..data.n()).collect();
            let mut rng = derive(seed, 0xda7a, s as u64, Purpose::SplitShuffle);
            idx.shuffle(&mut rng);
            let run = || -> Result<(Dataset, Dataset)> {
                let train = data.subset_rows(&idx[..n_train])?;
                let test = data.subset_rows(&idx[n_train..])?;
                Ok((train, test))
            };
            match run() {
                Ok((train, test)) => methods
                    .iter()
                    .map(|m| {
                        run_method(
                            m,
                            &train,
                            &test,
                            None,
                            FoldScheme::KFold {
                                k: 10,
                                seed: mix(seed, 0xf01d5, s as u64),
                            },
                        )
                    })
                    .collect(),
                Err(e) => methods.iter().map(|_| Err(e.clone())).collect(),
            }
        })
        .collect();
    let rows = summarize(methods, reps_out, None, data.p())?;
    Ok(BenchmarkReport {
        title: format!(
            "{}: {} splits of {} train / {} test",
            data.name, splits, n_train, n_test
        ),
        var_names: data.var_names(),
        rows,
        reps: splits,
        seed,
    })
}
