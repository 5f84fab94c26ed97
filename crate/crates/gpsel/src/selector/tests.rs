use super::*;
use crate::data::Column;
use crate::model::SATURATION_EPS;
use crate::special::g_integral_oracle;
use approx::assert_relative_eq;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

/// Hand-built statistics for formula-level tests.
fn stats(n: usize, p_gamma: usize, r2u: f64, r2c: f64) -> ModelStats {
    ModelStats {
        n,
        p_gamma,
        rss: 1.0,
        r2_uncentered: r2u,
        omr2_uncentered: 1.0 - r2u,
        r2_centered: r2c,
        omr2_centered: 1.0 - r2c,
    }
}

/// Small dataset with a planted signal on x1/x2, dyadic-grid values so shift
/// tests are exact in f64.
fn toy_dataset(n: usize, p: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let grid = (1u64 << 26) as f64;
    let snap = |v: f64| (v * grid).round() / grid;
    let columns: Vec<Column> = (0..p)
        .map(|j| Column {
            name: format!("x{}", j + 1),
            values: (0..n).map(|_| snap(rng.gen::<f64>() * 2.0 - 1.0)).collect(),
        })
        .collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            snap(
                2.0 + 2.0 * columns[0].values[i] - 1.5 * columns[1 % p].values[i]
                    + 0.5 * (rng.gen::<f64>() - 0.5),
            )
        })
        .collect();
    Dataset::new("toy", y, columns).unwrap()
}

#[test]
fn nims_at_zero_r2_is_size_penalty() {
    for p in [0usize, 1, 3] {
        let s = stats(12, p, 0.0, 0.0);
        assert_relative_eq!(
            score_nims(&s, 12).unwrap(),
            -((p as f64) + 1.0).ln(),
            epsilon = 1e-14
        );
    }
}

#[test]
fn nims_matches_quadrature_oracle() {
    // score = ln ∫ joint dg − ln 2 via the Euler-integral identity.
    for (n, p, r2) in [(12usize, 1usize, 0.5), (15, 3, 0.85), (20, 2, 0.2)] {
        let s = stats(n, p, r2, r2);
        let closed = score_nims(&s, n).unwrap();
        let quad = g_integral_oracle(n, p, r2, 0.0).unwrap() - 2.0_f64.ln();
        assert_relative_eq!(closed, quad, max_relative = 1e-8);
    }
}

#[test]
fn nims_guards() {
    let saturated = stats(12, 1, 1.0 - 0.5 * SATURATION_EPS, 0.5);
    assert!(matches!(score_nims(&saturated, 12), Err(Error::DegenerateModel)));
    let s = stats(6, 3, 0.4, 0.4);
    assert!(matches!(
        score_nims(&s, 6),
        Err(Error::Integrability { .. })
    ));
}

#[test]
fn hyper_g_zero_r2_and_null_rules() {
    // a = 3, r2 = 0: ln((a−2)/(p+a−2)) = −ln(p+1).
    for p in [0usize, 2, 4] {
        let s = stats(15, p, 0.0, 0.0);
        assert_relative_eq!(
            score_hyper_g(&s, 15, 3.0).unwrap(),
            -((p as f64) + 1.0).ln(),
            epsilon = 1e-14
        );
    }
    let null = stats(15, 0, 0.0, 0.0);
    assert!(matches!(
        score_hyper_g(&null, 15, 2.0),
        Err(Error::NullModelNotAllowed)
    ));
}

#[test]
fn hyper_g_matches_quadrature_oracle() {
    // a = 2 and a = 4 against ∫ (a−2)/2 (1+g)^{(n−1−p−a)/2} (1+g(1−r²))^{−(n−1)/2} dg
    // (improper a = 2 case drops the constant; both sides drop ln 2).
    let cases = [(15usize, 2usize, 2.0, 0.6), (15, 1, 4.0, 0.8), (18, 3, 3.0, 0.4)];
    for (n, p, a, r2) in cases {
        let s = stats(n, p, r2, r2);
        let closed = score_hyper_g(&s, n, a).unwrap();
        let quad = g_integral_oracle(n - 1, p, r2, (3.0 - a) / 2.0).unwrap();
        let expected = if a == 2.0 {
            quad - 2.0_f64.ln()
        } else {
            (a - 2.0).ln() - 2.0_f64.ln() + quad
        };
        assert_relative_eq!(closed, expected, max_relative = 1e-8);
    }
}

#[test]
fn fixed_g_formula_and_bartlett_collapse() {
    // r2 = 0 penalizes size only.
    let s = stats(15, 3, 0.0, 0.0);
    for g in [1.0, 64.0, 1e4] {
        assert_relative_eq!(
            score_fixed_g(&s, 15, g).unwrap(),
            -(3.0 / 2.0) * (1.0 + g).ln(),
            epsilon = 1e-12
        );
    }
    assert_eq!(bric_g(15, 10), 100.0);
    assert_eq!(bric_g(120, 10), 120.0);

    // Growing g drives the MAP model to the null model regardless of the
    // data: moderate signal-to-noise here so the collapse shows within the
    // scanned range.
    let mut rng = ChaCha12Rng::seed_from_u64(42);
    let columns: Vec<Column> = (0..5)
        .map(|j| Column {
            name: format!("x{}", j + 1),
            values: (0..15).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
        })
        .collect();
    let y: Vec<f64> = (0..15)
        .map(|i| {
            let noise: f64 = (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0;
            2.0 + columns[0].values[i] - 0.8 * columns[1].values[i] + noise
        })
        .collect();
    let data = Dataset::new("noisy", y, columns).unwrap();
    let mut sizes = Vec::new();
    for g in [1e2, 1e4, 1e8] {
        let sel = score_models(&data, &Method::FixedG { g }).unwrap();
        sizes.push(sel.map().p_gamma());
    }
    assert_eq!(*sizes.last().unwrap(), 0, "g -> inf must select the null model");
    assert!(sizes[0] >= sizes[2]);
}

#[test]
fn information_criteria_penalty_ordering() {
    // Equal rss: smaller model wins both criteria.
    let small = information_criterion_score(4.0, 15, 1, IcKind::Aic).unwrap();
    let large = information_criterion_score(4.0, 15, 3, IcKind::Aic).unwrap();
    assert!(small > large);
    // Null-model instantiation.
    let n = 15usize;
    let rss = 7.3;
    let crit = information_criterion_score(rss, n, 0, IcKind::Bic).unwrap();
    let expect = -(n as f64 * (rss / n as f64).ln() + (n as f64).ln() * 2.0) / 2.0;
    assert_relative_eq!(crit, expect, epsilon = 1e-12);
    assert!(matches!(
        information_criterion_score(0.0, 10, 1, IcKind::Aic),
        Err(Error::ZeroResidual)
    ));

    // BIC's heavier penalty never picks a strictly larger model than AIC.
    for seed in 0..20 {
        let data = toy_dataset(15, 5, 1000 + seed);
        let aic = score_models(&data, &Method::Aic).unwrap();
        let bic = score_models(&data, &Method::Bic).unwrap();
        assert!(bic.map().p_gamma() <= aic.map().p_gamma());
    }
}

#[test]
fn normalize_posterior_analytic_cases() {
    assert_eq!(normalize_posterior(&[3.7]).unwrap(), vec![1.0]);
    let two = normalize_posterior(&[1.0, 1.0]).unwrap();
    assert_relative_eq!(two[0], 0.5, epsilon = 1e-15);
    let odds = normalize_posterior(&[0.0, 3.0_f64.ln()]).unwrap();
    assert_relative_eq!(odds[0], 0.25, epsilon = 1e-14);
    assert_relative_eq!(odds[1], 0.75, epsilon = 1e-14);
    assert!(matches!(
        normalize_posterior(&[f64::NEG_INFINITY, f64::NAN]),
        Err(Error::AllDegenerate)
    ));
    // Sums to one over a larger random set.
    let mut rng = ChaCha12Rng::seed_from_u64(4);
    let v: Vec<f64> = (0..200).map(|_| rng.gen::<f64>() * 300.0 - 150.0).collect();
    let p = normalize_posterior(&v).unwrap();
    assert_relative_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
}

#[test]
fn map_model_tie_rules() {
    let mk = |bits: &[usize], p: f64| ModelScore {
        gamma: ModelIndicator::from_indices(3, bits),
        log_marginal: 0.0,
        posterior_prob: p,
        shrinkage: Some(1.0),
    };
    let scores = vec![mk(&[0, 1], 0.4), mk(&[2], 0.4), mk(&[1], 0.2)];
    // Exact tie: the smaller model wins.
    assert_eq!(map_model(&scores), 1);
    // Equal size tie: lexicographic bit order (earlier active variable wins
    // because [true,..] > [false,..] puts the false-leading pattern first).
    let scores = vec![mk(&[1], 0.5), mk(&[0], 0.5)];
    let win = map_model(&scores);
    let bits = scores[win].gamma.bits().to_vec();
    assert_eq!(bits, vec![false, true, false]);
}

#[test]
fn shrinkage_nims_values_and_monotonicity() {
    let s = stats(10, 1, 0.0, 0.0);
    assert_relative_eq!(shrinkage_nims(&s, 10).unwrap(), 0.5, epsilon = 1e-12);
    // Quadrature ratio: E[g/(1+g)] = 1 − I(pe=−1)/I(pe=0).
    for (n, p, r2) in [(12usize, 2usize, 0.7), (15, 1, 0.3)] {
        let s = stats(n, p, r2, r2);
        let closed = shrinkage_nims(&s, n).unwrap();
        let i0 = g_integral_oracle(n, p, r2, 0.0).unwrap();
        let i1 = g_integral_oracle(n, p, r2, -1.0).unwrap();
        assert_relative_eq!(closed, 1.0 - (i1 - i0).exp(), max_relative = 1e-7);
    }
    let mut prev = 0.0;
    for i in 0..=20 {
        let r2 = 0.99 * i as f64 / 20.0;
        let s = stats(12, 2, r2, r2);
        let v = shrinkage_nims(&s, 12).unwrap();
        assert!(v > prev && v < 1.0);
        prev = v;
    }
}

/// Independent Zellner–Siow oracle: composite Simpson over u = ln g on a
/// wide interval, entirely separate from the adaptive Gauss–Kronrod path.
fn zs_simpson_oracle(stats: &ModelStats, n: usize) -> f64 {
    let nf = n as f64;
    let pf = stats.p_gamma as f64;
    let omr2 = stats.omr2_centered;
    let ln_const = 0.5 * (nf / (2.0 * std::f64::consts::PI)).ln();
    let ln_f = |u: f64| -> f64 {
        let g = u.exp();
        // extra +u from dg = g du
        ln_const + (nf - 1.0 - pf) / 2.0 * (1.0 + g).ln()
            - (nf - 1.0) / 2.0 * (1.0 + g * omr2).ln()
            - 1.5 * g.ln()
            - nf / (2.0 * g)
            + u
    };
    let (a, b) = (-16.0 * std::f64::consts::LN_10 / 2.0, 18.5);
    let m = 1 << 21;
    let h = (b - a) / m as f64;
    let mut vals = Vec::with_capacity(m + 1);
    let mut maxv = f64::NEG_INFINITY;
    for i in 0..=m {
        let v = ln_f(a + i as f64 * h);
        maxv = maxv.max(v);
        vals.push(v);
    }
    let mut acc = 0.0;
    for (i, v) in vals.iter().enumerate() {
        let w = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * (v - maxv).exp();
    }
    maxv + (acc * h / 3.0).ln()
}

#[test]
fn zellner_siow_null_and_oracle_agreement() {
    let null = stats(15, 0, 0.0, 0.0);
    assert_eq!(zs_log_bf_null(&null, 15).unwrap(), 0.0);

    for (n, p, r2) in [(15usize, 2usize, 0.5), (12, 1, 0.8), (20, 4, 0.35)] {
        let s = stats(n, p, r2, r2);
        let adaptive = zs_log_bf_null(&s, n).unwrap();
        let simpson = zs_simpson_oracle(&s, n);
        assert_relative_eq!(adaptive, simpson, max_relative = 1e-5, epsilon = 1e-7);
    }

    // Monotone in r² at fixed size.
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=20 {
        let r2 = 0.95 * i as f64 / 20.0;
        let s = stats(15, 2, r2, r2);
        let v = zs_log_bf_null(&s, 15).unwrap();
        assert!(v > prev);
        prev = v;
    }
}

#[test]
fn zellner_siow_full_base_is_constant_offset() {
    let data = toy_dataset(14, 4, 7);
    let zn = score_models(&data, &Method::ZsNull).unwrap();
    let zf = score_models(&data, &Method::ZsFull).unwrap();
    // Same posterior, scores shifted by BF(full : null).
    for (a, b) in zn.scores.iter().zip(&zf.scores) {
        assert_relative_eq!(a.posterior_prob, b.posterior_prob, epsilon = 1e-10);
    }
    let shift = zn.scores[0].log_marginal - zf.scores[0].log_marginal;
    for (a, b) in zn.scores.iter().zip(&zf.scores) {
        assert_relative_eq!(a.log_marginal - b.log_marginal, shift, epsilon = 1e-7);
    }
}

#[test]
fn eb_plugin_and_global_bracket() {
    // r² = 0 on every model: ĝ = 0, flat scores, uniform posterior.
    let flat: Vec<ModelStats> = (0..4).map(|p| stats(15, p, 0.0, 0.0)).collect();
    for (score, g) in score_eb(&flat, 15, EbMode::Local).unwrap() {
        assert_eq!(g, 0.0);
        assert_eq!(score, 0.0);
    }
    // Single-model universe: global and local agree.
    let lone = vec![stats(15, 2, 0.8, 0.8)];
    let local = score_eb(&lone, 15, EbMode::Local).unwrap()[0];
    let global = score_eb(&lone, 15, EbMode::Global).unwrap()[0];
    assert_relative_eq!(local.1, global.1, max_relative = 1e-4, epsilon = 1e-9);

    // Grid oracle for the shared maximizer on a toy model set.
    let data = toy_dataset(15, 5, 99);
    let sel_stats: Vec<ModelStats> = enumerate_models(5, 15, true, None)
        .unwrap()
        .iter()
        .map(|g| model_stats(&data, g).unwrap())
        .collect();
    let ghat = eb_global_g(&sel_stats, 15).unwrap();
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..1_000_000 {
        let g = 1e8_f64.powf(i as f64 / 999_999.0) - 1.0 + 1e-9 * i as f64 / 1e6;
        let v: Vec<f64> = sel_stats
            .iter()
            .map(|s| score_fixed_g(s, 15, g).unwrap())
            .collect();
        let obj = log_sum_exp(&v);
        if obj > best.1 {
            best = (g, obj);
        }
    }
    assert_relative_eq!(ghat, best.0, max_relative = 0.01);
}

#[test]
fn single_model_universe_posterior_is_one() {
    // p = 0: only the null model competes.
    let y: Vec<f64> = vec![1.0, 2.5, 0.5, 3.0, 1.5];
    let data = Dataset::new("nullonly", y, vec![]).unwrap();
    let sel = score_models(&data, &Method::Nims).unwrap();
    assert_eq!(sel.scores.len(), 1);
    assert_relative_eq!(sel.scores[0].posterior_prob, 1.0, epsilon = 1e-14);
}

#[test]
fn bma_reduces_to_single_model_and_hand_expansion() {
    let data = toy_dataset(12, 2, 3);
    let x_new = DesignMatrix::from_dataset(&data);

    // Hand-expanded double sum for the Jeffreys selector on p = 2.
    let sel = score_models(&data, &Method::Nims).unwrap();
    let bma = bma_predict(&sel, &data, &x_new).unwrap();
    let n = data.n();
    let mut num = vec![0.0; n];
    let mut den = 0.0;
    for gamma in enumerate_models(2, n, true, None).unwrap() {
        let s = model_stats(&data, &gamma).unwrap();
        let pf = s.p_gamma as f64;
        let f1 = crate::special::log_hyp2f1(&crate::special::Hyp2f1Params {
            a: n as f64 / 2.0,
            b: 1.0,
            c: (pf + 3.0) / 2.0,
            x: s.r2_uncentered,
        })
        .unwrap()
        .exp();
        let f2 = crate::special::log_hyp2f1(&crate::special::Hyp2f1Params {
            a: n as f64 / 2.0,
            b: 2.0,
            c: (pf + 3.0) / 2.0 + 1.0,
            x: s.r2_uncentered,
        })
        .unwrap()
        .exp();
        let fit = ols_predict(&data, &gamma, &x_new).unwrap();
        for (acc, f) in num.iter_mut().zip(fit) {
            *acc += 2.0 * f2 / ((pf + 1.0) * (pf + 3.0)) * f;
        }
        den += f1 / (pf + 1.0);
    }
    for (b, expect) in bma.iter().zip(num.iter().map(|v| v / den)) {
        assert_relative_eq!(b, &expect, max_relative = 1e-8);
    }

    // Degenerate average: single surviving probability reproduces the
    // shrunken single-model prediction, with the ȳ offset for M_inv.
    let sel_hg = score_models(&data, &Method::HyperG { a: 3.0 }).unwrap();
    let mut fake = sel_hg.clone();
    for s in fake.scores.iter_mut() {
        s.posterior_prob = 0.0;
    }
    fake.scores[2].posterior_prob = 1.0;
    let single = bma_predict(&fake, &data, &x_new).unwrap();
    let gamma = fake.scores[2].gamma.clone();
    let shrink = fake.scores[2].shrinkage.unwrap();
    let ybar = data.y.iter().sum::<f64>() / data.n() as f64;
    let (yc, _) = center(&data.y);
    let idx = gamma.active_indices();
    let centered: Vec<(Vec<f64>, f64)> = idx
        .iter()
        .map(|&j| center(&data.columns[j].values))
        .collect();
    let refs: Vec<&[f64]> = centered.iter().map(|(c, _)| c.as_slice()).collect();
    let xc = Mat::from_columns(&refs).unwrap();
    let fit = qr_least_squares(&xc, &yc).unwrap();
    for (i, s) in single.iter().enumerate() {
        let mut v = 0.0;
        for (k, &j) in idx.iter().enumerate() {
            v += fit.coefficients[k] * (data.columns[j].values[i] - centered[k].1);
        }
        assert_relative_eq!(*s, ybar + shrink * v, max_relative = 1e-10);
    }
}

#[test]
fn scale_invariance_of_posteriors() {
    let data = toy_dataset(15, 4, 21);
    for method in [
        Method::Nims,
        Method::HyperG { a: 2.0 },
        Method::HyperG { a: 3.0 },
        Method::Bric,
        Method::ZsNull,
        Method::EbLocal,
    ] {
        let base = score_models(&data, &method).unwrap();
        for c in [1e-3, 1e3] {
            let scaled = data
                .with_response(data.y.iter().map(|v| c * v).collect())
                .unwrap();
            let sel = score_models(&scaled, &method).unwrap();
            for (a, b) in base.scores.iter().zip(&sel.scores) {
                assert_relative_eq!(a.posterior_prob, b.posterior_prob, epsilon = 1e-9);
            }
        }
    }
}

#[test]
fn location_invariance_of_centered_methods_and_nims_collapse() {
    let data = toy_dataset(15, 4, 63);
    for method in [Method::HyperG { a: 2.0 }, Method::Bric, Method::ZsNull] {
        let base = score_models(&data, &method).unwrap();
        for c in [1.0, 1e3, 1e6] {
            let shifted = data
                .with_response(data.y.iter().map(|v| v + c).collect())
                .unwrap();
            let sel = score_models(&shifted, &method).unwrap();
            for (a, b) in base.scores.iter().zip(&sel.scores) {
                assert_relative_eq!(a.posterior_prob, b.posterior_prob, epsilon = 1e-9);
            }
        }
    }
    // The uncentered Jeffreys selector drifts to the null model instead.
    let shifted = data
        .with_response(data.y.iter().map(|v| v + 1e6).collect())
        .unwrap();
    let sel = score_models(&shifted, &Method::Nims).unwrap();
    assert!(sel.map().is_null());
}
