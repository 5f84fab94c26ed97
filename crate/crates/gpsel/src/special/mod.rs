//! Special-function kernels: the Gaussian hypergeometric function ₂F₁ in log
//! scale, its supporting gamma/digamma helpers, and an independent adaptive
//! quadrature oracle for the g-integrals that ₂F₁ summarizes in closed form.

mod gamma;
mod hyp2f1;
mod quad;

pub use gamma::{digamma, ln_gamma, signed_ln_gamma};
pub use hyp2f1::{log_hyp2f1, Hyp2f1Params};
pub(crate) use hyp2f1::log_hyp2f1_cpl;
pub use quad::{g_integral_oracle, log_integral_01, QuadOpts};

#[cfg(test)]
mod cross_tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lh(a: f64, b: f64, c: f64, x: f64) -> f64 {
        log_hyp2f1(&Hyp2f1Params { a, b, c, x }).unwrap()
    }

    /// The g-integral behind the non-invariant Jeffreys posterior equals
    /// 2/(p+1) · 2F1(n/2, 1; (p+3)/2; r2); the hyper-g integral equals
    /// 2/(p+a-2) · 2F1((n-1)/2, 1; (p+a)/2; r2) on n-1 degrees of freedom.
    /// Two independent evaluation routes, so this is the core correctness
    /// gate for both kernels.
    #[test]
    fn closed_forms_match_quadrature() {
        for n in [8usize, 15, 30] {
            for p in [0usize, 1, 3, 5] {
                for r2 in [0.0, 0.2, 0.55, 0.9, 0.999] {
                    if n <= p + 3 {
                        continue;
                    }
                    let quad = g_integral_oracle(n, p, r2, 0.0).unwrap();
                    let closed = 2.0_f64.ln() - ((p + 1) as f64).ln()
                        + lh(n as f64 / 2.0, 1.0, (p as f64 + 3.0) / 2.0, r2);
                    assert_relative_eq!(quad, closed, max_relative = 1e-8, epsilon = 1e-9);

                    for a in [2.0_f64, 3.0, 4.0] {
                        if p == 0 && a <= 2.0 {
                            continue;
                        }
                        let quad = g_integral_oracle(n - 1, p, r2, (3.0 - a) / 2.0).unwrap();
                        let closed = 2.0_f64.ln() - (p as f64 + a - 2.0).ln()
                            + lh((n as f64 - 1.0) / 2.0, 1.0, (p as f64 + a) / 2.0, r2);
                        assert_relative_eq!(quad, closed, max_relative = 1e-8, epsilon = 1e-9);
                    }
                }
            }
        }
    }

    /// Shrinkage identity: E[g/(1+g)] under the Jeffreys posterior equals
    /// the two-2F1 ratio; the numerator decomposes into two g-integrals.
    #[test]
    fn shrinkage_ratio_matches_quadrature() {
        for (n, p, r2) in [(10usize, 1usize, 0.0), (12, 2, 0.7), (15, 4, 0.95), (9, 0, 0.5)] {
            let nf = n as f64;
            let pf = p as f64;
            // g·(g+1)^{E-1} = (g+1)^E − (g+1)^{E-1}, so the numerator is
            // I(pe=0) − I(pe=−1) and the ratio collapses to 1 − e^{I(−1)−I(0)}.
            let den = g_integral_oracle(n, p, r2, 0.0).unwrap();
            let i1 = g_integral_oracle(n, p, r2, -1.0).unwrap();
            let shrink_quad = 1.0 - (i1 - den).exp();
            let shrink_closed = (2.0_f64.ln() - (pf + 3.0).ln()
                + lh(nf / 2.0, 2.0, (pf + 3.0) / 2.0 + 1.0, r2)
                - lh(nf / 2.0, 1.0, (pf + 3.0) / 2.0, r2))
            .exp();
            assert_relative_eq!(shrink_quad, shrink_closed, max_relative = 1e-7, epsilon = 1e-9);
            assert!(shrink_closed > 0.0 && shrink_closed < 1.0);
            if r2 == 0.0 {
                assert_relative_eq!(shrink_closed, 2.0 / (pf + 3.0), max_relative = 1e-10);
            }
        }
    }
}
