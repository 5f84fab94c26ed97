//! Log-gamma and digamma helpers used by the hypergeometric kernels.

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    libm::lgamma_r(x).0
}

/// Signed log-gamma: returns `(ln|Γ(x)|, sign)` for any real x.
/// At the poles (x = 0, -1, -2, …) the sign is 0, so `sign * exp(-ln_abs)`
/// correctly collapses reciprocal factors to zero.
pub fn signed_ln_gamma(x: f64) -> (f64, f64) {
    if x <= 0.0 && x == x.floor() {
        return (f64::INFINITY, 0.0);
    }
    let (ln_abs, sign) = libm::lgamma_r(x);
    (ln_abs, sign as f64)
}

/// Digamma ψ(x) for non-pole real x.
///
/// Recurrence up to x ≥ 10 followed by the asymptotic series; negative
/// arguments go through the reflection ψ(x) = ψ(1−x) − π·cot(πx).
pub fn digamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.0 {
        // cot(πx) is 1-periodic: reduce to the nearest integer first.
        let r = x - x.round();
        return digamma(1.0 - x) - std::f64::consts::PI / (std::f64::consts::PI * r).tan();
    }
    let mut value = 0.0;
    let mut z = x;
    while z < 10.0 {
        value -= 1.0 / z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // ψ(z) ~ ln z − 1/(2z) − Σ B_{2k}/(2k z^{2k})
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    value + z.ln() - 0.5 * inv - tail
}
